#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sdem/rational.hpp"

namespace sdem {

/// A multi-index alpha in N^n, i.e. the monomial x1^a1 * ... * xn^an.
class Monomial {
public:
    using Exponent = std::uint32_t;

    Monomial() = default;
    explicit Monomial(std::size_t dim) : exps_(dim, 0) {}
    Monomial(std::initializer_list<Exponent> e) : exps_(e) {}
    explicit Monomial(std::vector<Exponent> e) : exps_(std::move(e)) {}

    static Monomial unit(std::size_t dim, std::size_t i, Exponent power = 1) {
        Monomial m(dim);
        m.exps_.at(i) = power;
        return m;
    }

    std::size_t dim() const { return exps_.size(); }
    Exponent operator[](std::size_t i) const { return exps_[i]; }
    Exponent& operator[](std::size_t i) { return exps_[i]; }
    std::span<const Exponent> exponents() const { return exps_; }

    std::uint64_t degree() const {
        return std::accumulate(exps_.begin(), exps_.end(), std::uint64_t{0});
    }
    bool is_constant() const {
        return std::all_of(exps_.begin(), exps_.end(), [](Exponent e) { return e == 0; });
    }

    Monomial operator*(const Monomial& o) const {
        check_dim(o);
        Monomial r(*this);
        for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += o.exps_[i];
        return r;
    }

    /// x^a / x^b when b divides a.
    bool divisible_by(const Monomial& o) const {
        check_dim(o);
        for (std::size_t i = 0; i < exps_.size(); ++i)
            if (exps_[i] < o.exps_[i]) return false;
        return true;
    }

    friend bool operator==(const Monomial&, const Monomial&) = default;

    /// "(i,j,...)", the key format used by JSON moment tables and reports.
    std::string to_tuple() const {
        std::string s = "(";
        for (std::size_t i = 0; i < exps_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(exps_[i]);
        }
        return s + ")";
    }

    /// "x^2*y", or "1" for the constant monomial.
    std::string to_string(std::span<const std::string> names) const {
        std::string s;
        for (std::size_t i = 0; i < exps_.size(); ++i) {
            if (exps_[i] == 0) continue;
            if (!s.empty()) s += '*';
            s += i < names.size() ? names[i] : "x" + std::to_string(i + 1);
            if (exps_[i] > 1) s += "^" + std::to_string(exps_[i]);
        }
        return s.empty() ? "1" : s;
    }

    /// Exact value of x^alpha at the given point.
    Rational eval(std::span<const Rational> point) const {
        if (point.size() != exps_.size()) throw Error("monomial evaluation: dimension mismatch");
        Rational r = 1;
        for (std::size_t i = 0; i < exps_.size(); ++i)
            if (exps_[i]) r *= sdem::pow(point[i], exps_[i]);
        return r;
    }

private:
    void check_dim(const Monomial& o) const {
        if (o.dim() != dim()) throw Error("monomial dimension mismatch");
    }

    std::vector<Exponent> exps_;
};

/// Graded lexicographic order: total degree first, then lexicographic with x1 > x2 > ...
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        auto da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        auto ea = a.exponents(), eb = b.exponents();
        return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
    }
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (auto e : m.exponents()) {
            h ^= e + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace sdem
