#pragma once
// Closed-form moment expressions sum_i p_i(t) exp(lambda_i t).

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "sdem/rational.hpp"

namespace sdem {

template <class Scalar>
struct ExpTerm {
    Scalar lambda{};
    std::vector<Scalar> coeffs;  // coeffs[d] multiplies t^d

    friend bool operator==(const ExpTerm&, const ExpTerm&) = default;
};

/// sum over terms of (sum_d coeffs[d] t^d) * exp(lambda t).
/// ClosedForm<Rational> is exact; ClosedForm<std::complex<double>> comes from a
/// floating eigendecomposition and may carry complex-conjugate pairs.
template <class Scalar>
struct ClosedForm {
    std::vector<ExpTerm<Scalar>> terms;

    static constexpr bool exact = std::is_same_v<Scalar, Rational>;

    friend bool operator==(const ClosedForm&, const ClosedForm&) = default;
};

using ExactClosedForm = ClosedForm<Rational>;
using FloatClosedForm = ClosedForm<std::complex<double>>;

namespace detail {

inline bool lambda_before(const Rational& a, const Rational& b) { return a > b; }
inline bool lambda_before(const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

inline bool is_zero_scalar(const Rational& x) { return x == 0; }
inline bool is_zero_scalar(const std::complex<double>& x) { return x == std::complex<double>(0.0, 0.0); }

inline std::complex<double> as_complex(const Rational& x) { return {x.get_d(), 0.0}; }
inline std::complex<double> as_complex(const std::complex<double>& x) { return x; }

inline std::string scalar_text(const std::complex<double>& z) {
    std::ostringstream os;
    os.precision(17);
    if (z.imag() == 0.0) {
        os << z.real();
    } else {
        os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
    }
    return os.str();
}

}  // namespace detail

/// Sorts terms by descending lambda, merges equal lambdas, trims trailing zero
/// coefficients and drops empty terms.
template <class Scalar>
ClosedForm<Scalar> canonicalize(ClosedForm<Scalar> cf) {
    std::stable_sort(cf.terms.begin(), cf.terms.end(),
                     [](const auto& a, const auto& b) { return detail::lambda_before(a.lambda, b.lambda); });
    ClosedForm<Scalar> out;
    for (auto& t : cf.terms) {
        if (!out.terms.empty() && out.terms.back().lambda == t.lambda) {
            auto& c = out.terms.back().coeffs;
            if (c.size() < t.coeffs.size()) c.resize(t.coeffs.size());
            for (std::size_t d = 0; d < t.coeffs.size(); ++d) c[d] += t.coeffs[d];
        } else {
            out.terms.push_back(std::move(t));
        }
    }
    for (auto& t : out.terms)
        while (!t.coeffs.empty() && detail::is_zero_scalar(t.coeffs.back())) t.coeffs.pop_back();
    std::erase_if(out.terms, [](const auto& t) { return t.coeffs.empty(); });
    return out;
}

template <class Scalar>
double eval_closed_form(const ClosedForm<Scalar>& cf, double t) {
    std::complex<double> acc = 0.0;
    for (const auto& term : cf.terms) {
        std::complex<double> p = 0.0;
        for (std::size_t d = term.coeffs.size(); d-- > 0;) p = p * t + detail::as_complex(term.coeffs[d]);
        acc += p * std::exp(detail::as_complex(term.lambda) * t);
    }
    return acc.real();
}

/// Exact coefficients are summed in long double from a two-double split, since
/// the terms of high-order moments cancel heavily near t = 0.
inline double eval_closed_form(const ExactClosedForm& cf, double t) {
    auto wide = [](const Rational& x) {
        const double hi = x.get_d();
        const Rational rest = x - Rational(hi);
        return static_cast<long double>(hi) + static_cast<long double>(rest.get_d());
    };
    const long double tl = t;
    long double acc = 0;
    for (const auto& term : cf.terms) {
        long double p = 0;
        for (std::size_t d = term.coeffs.size(); d-- > 0;) p = p * tl + wide(term.coeffs[d]);
        acc += p * std::exp(wide(term.lambda) * tl);
    }
    return static_cast<double>(acc);
}

/// d/dt of an exact closed form: (p' + lambda p) exp(lambda t) per term.
inline ExactClosedForm derivative(const ExactClosedForm& cf) {
    ExactClosedForm out;
    for (const auto& term : cf.terms) {
        ExpTerm<Rational> d{term.lambda, std::vector<Rational>(term.coeffs.size())};
        for (std::size_t k = 0; k < term.coeffs.size(); ++k) {
            d.coeffs[k] += term.lambda * term.coeffs[k];
            if (k > 0) d.coeffs[k - 1] += term.coeffs[k] * static_cast<unsigned long>(k);
        }
        out.terms.push_back(std::move(d));
    }
    return canonicalize(std::move(out));
}

inline ExactClosedForm scaled_sum(const std::vector<std::pair<Rational, const ExactClosedForm*>>& parts,
                                  const Rational& constant = 0) {
    ExactClosedForm out;
    if (constant != 0) out.terms.push_back({Rational(0), {constant}});
    for (const auto& [w, cf] : parts) {
        if (w == 0) continue;
        for (const auto& term : cf->terms) {
            ExpTerm<Rational> t = term;
            for (auto& c : t.coeffs) c *= w;
            out.terms.push_back(std::move(t));
        }
    }
    return canonicalize(std::move(out));
}

/// Exact value at t = 0 (sum of the constant coefficients).
inline Rational value_at_zero(const ExactClosedForm& cf) {
    Rational v = 0;
    for (const auto& t : cf.terms)
        if (!t.coeffs.empty()) v += t.coeffs[0];
    return v;
}

/// Canonical text, e.g.
///   1/3 + (-11/8 - 1/4*t)*exp(-2*t) + 2/3*exp(-3*t) + (3/8 + t + 3/4*t^2)*exp(-4*t)
/// Terms by descending lambda; coefficients by ascending power of t.
inline std::string to_string(const ExactClosedForm& cf) {
    auto poly_text = [](const std::vector<Rational>& c, bool& negated_single) {
        // single-term coefficients are printed without parentheses; the caller handles the sign
        std::vector<std::size_t> nz;
        for (std::size_t d = 0; d < c.size(); ++d)
            if (c[d] != 0) nz.push_back(d);
        auto mono = [](std::size_t d) { return d == 0 ? std::string() : (d == 1 ? std::string("t") : "t^" + std::to_string(d)); };
        std::string s;
        negated_single = false;
        if (nz.size() == 1) {
            const std::size_t d = nz[0];
            Rational mag = abs(c[d]);
            negated_single = c[d] < 0;
            if (d == 0) return mag.get_str();
            return (mag == 1 ? std::string() : mag.get_str() + "*") + mono(d);
        }
        bool first = true;
        for (std::size_t d : nz) {
            Rational mag = abs(c[d]);
            if (first) {
                if (c[d] < 0) s += "-";
            } else {
                s += c[d] < 0 ? " - " : " + ";
            }
            first = false;
            s += d == 0 ? mag.get_str() : (mag == 1 ? std::string() : mag.get_str() + "*") + mono(d);
        }
        return "(" + s + ")";
    };
    auto exp_text = [](const Rational& l) -> std::string {
        if (l == 0) return "";
        if (l == 1) return "exp(t)";
        if (l == -1) return "exp(-t)";
        return "exp(" + l.get_str() + "*t)";
    };
    std::string out;
    for (const auto& term : cf.terms) {
        bool neg = false;
        std::string p = poly_text(term.coeffs, neg);
        std::string e = exp_text(term.lambda);
        std::string body;
        if (e.empty()) {
            body = p.front() == '(' ? p.substr(1, p.size() - 2) : p;
        } else if (p == "1") {
            body = e;
        } else {
            body = p + "*" + e;
        }
        if (out.empty()) {
            out = (neg ? "-" : "") + body;
        } else {
            out += (neg ? " - " : " + ") + body;
        }
    }
    return out.empty() ? "0" : out;
}

inline std::string to_string(const FloatClosedForm& cf) {
    std::string out;
    for (const auto& term : cf.terms) {
        std::string p;
        for (std::size_t d = 0; d < term.coeffs.size(); ++d) {
            if (d) p += " + ";
            p += detail::scalar_text(term.coeffs[d]);
            if (d == 1) p += "*t";
            if (d > 1) p += "*t^" + std::to_string(d);
        }
        if (term.coeffs.size() > 1) p = "(" + p + ")";
        if (!out.empty()) out += " + ";
        out += p + "*exp(" + detail::scalar_text(term.lambda) + "*t)";
    }
    return out.empty() ? "0" : out;
}

inline nlohmann::json to_json(const ExactClosedForm& cf) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : cf.terms) {
        nlohmann::json c = nlohmann::json::array();
        for (const auto& x : t.coeffs) c.push_back(x.get_str());
        terms.push_back({{"lambda", t.lambda.get_str()}, {"coeffs", c}});
    }
    return {{"scalar_kind", "exact-rational"}, {"terms", terms}, {"text", to_string(cf)}};
}

inline nlohmann::json to_json(const FloatClosedForm& cf) {
    auto z = [](const std::complex<double>& v) { return nlohmann::json::array({v.real(), v.imag()}); };
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : cf.terms) {
        nlohmann::json c = nlohmann::json::array();
        for (const auto& x : t.coeffs) c.push_back(z(x));
        terms.push_back({{"lambda", z(t.lambda)}, {"coeffs", c}});
    }
    return {{"scalar_kind", "float"}, {"terms", terms}, {"text", to_string(cf)}};
}

}  // namespace sdem
