#pragma once
// Dense univariate polynomials over Q, plus the exact characteristic
// polynomial of a rational matrix (Hessenberg reduction).

#include <string>
#include <utility>
#include <vector>

#include "sdem/rational.hpp"

namespace sdem {

/// Coefficients in ascending degree; no trailing zeros (the zero polynomial is empty).
class UPoly {
public:
    UPoly() = default;
    explicit UPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

    /// x - root
    static UPoly linear(const Rational& root) { return UPoly({-root, Rational(1)}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    const Rational& leading() const { return c_.back(); }

    Rational eval(const Rational& x) const {
        Rational acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    double eval(double x) const {
        double acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->get_d();
        return acc;
    }

    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> r(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return UPoly(std::move(r));
    }

    friend UPoly operator-(const UPoly& a, const UPoly& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] - b[i];
        return UPoly(std::move(r));
    }

    /// Synthetic division by (x - root): returns (quotient, remainder).
    std::pair<UPoly, Rational> divide_linear(const Rational& root) const {
        if (c_.empty()) return {UPoly(), Rational(0)};
        std::vector<Rational> q(c_.size() - 1);
        Rational carry = 0;
        for (std::size_t k = c_.size() - 1; k >= 1; --k) {
            carry = carry * root + c_[k];
            q[k - 1] = carry;
        }
        Rational rem = carry * root + c_[0];
        return {UPoly(std::move(q)), std::move(rem)};
    }

    /// First `count` Taylor coefficients of p(root + u) in u.
    std::vector<Rational> taylor(const Rational& root, std::size_t count) const {
        std::vector<Rational> out;
        UPoly cur = *this;
        for (std::size_t k = 0; k < count; ++k) {
            auto [q, r] = cur.divide_linear(root);
            out.push_back(r);
            cur = std::move(q);
        }
        return out;
    }

    std::string to_string(const std::string& var = "s") const {
        if (c_.empty()) return "0";
        std::string s;
        for (std::size_t k = c_.size(); k-- > 0;) {
            const Rational& c = c_[k];
            if (c == 0) continue;
            Rational mag = abs(c);
            if (s.empty()) {
                if (c < 0) s += "-";
            } else {
                s += c < 0 ? " - " : " + ";
            }
            std::string mono = k == 0 ? "" : (k == 1 ? var : var + "^" + std::to_string(k));
            if (mono.empty()) {
                s += mag.get_str();
            } else {
                s += (mag == 1 ? "" : mag.get_str() + "*") + mono;
            }
        }
        return s;
    }

    friend bool operator==(const UPoly&, const UPoly&) = default;

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rational> c_;
};

using RationalMatrix = std::vector<std::vector<Rational>>;

/// det(x I - M), computed by similarity reduction to upper Hessenberg form
/// followed by the standard Hessenberg determinant recurrence.
inline UPoly characteristic_polynomial(RationalMatrix h) {
    const std::size_t n = h.size();
    for (std::size_t m = 1; m + 1 < n; ++m) {
        std::size_t piv = m;
        while (piv < n && h[piv][m - 1] == 0) ++piv;
        if (piv == n) continue;
        if (piv != m) {
            std::swap(h[piv], h[m]);
            for (std::size_t r = 0; r < n; ++r) std::swap(h[r][piv], h[r][m]);
        }
        for (std::size_t j = m + 1; j < n; ++j) {
            if (h[j][m - 1] == 0) continue;
            const Rational u = h[j][m - 1] / h[m][m - 1];
            for (std::size_t col = 0; col < n; ++col) h[j][col] -= u * h[m][col];
            for (std::size_t row = 0; row < n; ++row) h[row][m] += u * h[row][j];
        }
    }
    std::vector<UPoly> p;
    p.emplace_back(std::vector<Rational>{Rational(1)});
    for (std::size_t m = 1; m <= n; ++m) {
        UPoly next = UPoly::linear(h[m - 1][m - 1]) * p[m - 1];
        Rational prod = 1;
        for (std::size_t i = m - 1; i >= 1; --i) {
            prod *= h[i][i - 1];  // h_{i+1,i} in 1-based terms
            if (prod == 0) break;
            const Rational coef = h[i - 1][m - 1] * prod;
            if (coef != 0) next = next - UPoly({coef}) * p[i - 1];
        }
        p.push_back(std::move(next));
    }
    return p[n];
}

}  // namespace sdem
