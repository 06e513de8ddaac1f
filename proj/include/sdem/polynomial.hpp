#pragma once
// Sparse multivariate polynomials with exact rational coefficients.
//
// A Polynomial is a finite map Monomial -> Rational kept in canonical form:
// no zero coefficient is ever stored and every key has the polynomial's
// dimension. Terms are ordered by GrlexLess, so iteration, printing and
// equality are deterministic.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdem/monomial.hpp"
#include "sdem/rational.hpp"

namespace sdem {

class Polynomial {
public:
    using Terms = std::map<Monomial, Rational, GrlexLess>;

    Polynomial() = default;
    explicit Polynomial(std::size_t dim) : dim_(dim) {}

    static Polynomial constant(std::size_t dim, const Rational& c) {
        Polynomial p(dim);
        p.add_term(Monomial(dim), c);
        return p;
    }
    static Polynomial monomial(const Monomial& m, const Rational& c = 1) {
        Polynomial p(m.dim());
        p.add_term(m, c);
        return p;
    }
    static Polynomial variable(std::size_t dim, std::size_t i) {
        return monomial(Monomial::unit(dim, i));
    }

    std::size_t dim() const { return dim_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_constant());
    }

    Rational coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational constant_term() const { return coefficient(Monomial(dim_)); }

    std::uint64_t degree() const {
        // grlex order puts the highest total degree last
        return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
    }

    /// Adds c*m in place, dropping the term if it cancels.
    void add_term(const Monomial& m, const Rational& c) {
        if (m.dim() != dim_) throw Error("polynomial term has wrong dimension");
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& q) {
        check_dim(q, "add");
        for (const auto& [m, c] : q.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& q) {
        check_dim(q, "subtract");
        for (const auto& [m, c] : q.terms_) add_term(m, -c);
        return *this;
    }
    Polynomial& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
        } else {
            for (auto& [m, c] : terms_) c *= s;
        }
        return *this;
    }

    friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
    friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
    friend Polynomial operator*(Polynomial p, const Rational& s) { return p *= s; }
    friend Polynomial operator*(const Rational& s, Polynomial p) { return p *= s; }
    Polynomial operator-() const { return *this * Rational(-1); }

    friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
        p.check_dim(q, "multiply");
        Polynomial r(p.dim_);
        for (const auto& [mp, cp] : p.terms_)
            for (const auto& [mq, cq] : q.terms_) r.add_term(mp * mq, cp * cq);
        return r;
    }

    /// p * c * x^m, the shift used when applying differential operators.
    Polynomial times_monomial(const Monomial& m, const Rational& c) const {
        Polynomial r(dim_);
        if (c == 0) return r;
        // multiplying by a monomial preserves grlex order, so a hinted insert is linear
        for (const auto& [mp, cp] : terms_) r.terms_.emplace_hint(r.terms_.end(), mp * m, cp * c);
        return r;
    }

    Polynomial pow(unsigned e) const {
        Polynomial r = constant(dim_, 1);
        for (unsigned k = 0; k < e; ++k) r = r * *this;
        return r;
    }

    /// Formal partial derivative with respect to x_i.
    Polynomial partial(std::size_t i) const {
        if (i >= dim_) throw Error("partial derivative: variable index out of range");
        Polynomial r(dim_);
        for (const auto& [m, c] : terms_) {
            if (m[i] == 0) continue;
            Monomial d = m;
            d[i] -= 1;
            r.add_term(d, c * m[i]);
        }
        return r;
    }

    Rational eval(std::span<const Rational> point) const {
        if (point.size() != dim_) throw Error("polynomial evaluation: dimension mismatch");
        Rational acc = 0;
        for (const auto& [m, c] : terms_) acc += c * m.eval(point);
        return acc;
    }

    /// Variables (by index) that occur in at least one term.
    std::vector<bool> support() const {
        std::vector<bool> used(dim_, false);
        for (const auto& [m, c] : terms_)
            for (std::size_t i = 0; i < dim_; ++i)
                if (m[i]) used[i] = true;
        return used;
    }

    /// Canonical text in the input grammar, highest grlex term first:
    /// "x^2 + x - 2*y", "-1/2*x*y + 3".
    std::string to_string(std::span<const std::string> names) const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [m, c] = *it;
            Rational mag = abs(c);
            if (first) {
                if (c < 0) s += "-";
            } else {
                s += c < 0 ? " - " : " + ";
            }
            first = false;
            if (m.is_constant()) {
                s += mag.get_str();
            } else if (mag == 1) {
                s += m.to_string(names);
            } else {
                s += mag.get_str() + "*" + m.to_string(names);
            }
        }
        return s;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }

private:
    void check_dim(const Polynomial& q, const char* op) const {
        if (q.dim_ != dim_)
            throw Error(std::string("cannot ") + op + " polynomials of dimension " + std::to_string(dim_) +
                        " and " + std::to_string(q.dim_));
    }

    std::size_t dim_ = 0;
    Terms terms_;
};

/// Default variable names x1..xn, used when a polynomial is printed without a model.
inline std::vector<std::string> default_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    return names;
}

}  // namespace sdem
