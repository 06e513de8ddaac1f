#pragma once
// Solving dm/dt = A m + c: numeric evaluation through the augmented matrix
// exponential, and exact closed forms when the spectrum is rational.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sdem/closed_form.hpp"
#include "sdem/closure.hpp"
#include "sdem/expm.hpp"
#include "sdem/graph.hpp"
#include "sdem/upoly.hpp"

namespace sdem {

/// [[A, c], [0, 0]] and [m(0); 1]. The extra state stays at 1, which turns the
/// inhomogeneous solution into a single matrix exponential.
struct AugmentedSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd state0;

    explicit AugmentedSystem(const MomentSystem& ms) {
        const auto n = static_cast<Eigen::Index>(ms.size());
        matrix = Eigen::MatrixXd::Zero(n + 1, n + 1);
        state0 = Eigen::VectorXd::Zero(n + 1);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (const auto& [col, v] : ms.rows[r]) matrix(r, static_cast<Eigen::Index>(col)) = v.get_d();
            matrix(r, n) = ms.vector_c[r].get_d();
            state0(r) = ms.m0[r].get_d();
        }
        state0(n) = 1.0;
    }
};

inline RationalMatrix augmented_matrix_exact(const MomentSystem& ms) {
    const std::size_t n = ms.size();
    RationalMatrix a(n + 1, std::vector<Rational>(n + 1));
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto& [col, v] : ms.rows[r]) a[r][col] = v;
        a[r][n] = ms.vector_c[r];
    }
    return a;
}

namespace detail {

inline void check_times(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0) throw Error("times must be finite and non-negative");
        if (i > 0 && times[i] < times[i - 1]) throw Error("times must be sorted ascending");
    }
}

}  // namespace detail

/// m(t_j) for every requested time; each vector has one entry per closure index
/// (the target moment is entry 0). Every time point is computed independently.
inline std::vector<std::vector<double>> eval_numeric(const MomentSystem& ms, std::span<const double> times) {
    detail::check_times(times);
    const AugmentedSystem aug(ms);
    const auto n = static_cast<Eigen::Index>(ms.size());
    std::vector<std::vector<double>> out;
    out.reserve(times.size());
    for (double t : times) {
        const Eigen::VectorXd x = expm(aug.matrix * t) * aug.state0;
        out.emplace_back(x.data(), x.data() + n);
    }
    return out;
}

/// constant + sum_r weights[r] m_r(t_j).
inline std::vector<double> eval_numeric(const MomentSystem& ms, std::span<const double> times,
                                        std::span<const Rational> weights, const Rational& constant = 0) {
    if (weights.size() != ms.size()) throw Error("weight vector does not match the closure size");
    std::vector<double> out;
    for (const auto& m : eval_numeric(ms, times)) {
        double v = constant.get_d();
        for (std::size_t r = 0; r < m.size(); ++r)
            if (weights[r] != 0) v += weights[r].get_d() * m[r];
        out.push_back(v);
    }
    return out;
}

struct Unsupported {
    std::string reason;
    UPoly factor;                                        // part of the characteristic polynomial left unsplit
    std::vector<std::pair<Rational, unsigned>> roots;    // rational roots that were found
};

/// Characteristic polynomial of the augmented matrix with its rational roots split off.
struct RationalSpectrum {
    UPoly characteristic;
    std::vector<std::pair<Rational, unsigned>> roots;  // (root, multiplicity), descending
    UPoly leftover;                                     // degree 0 when the polynomial splits over Q

    bool splits() const { return leftover.degree() == 0; }
};

namespace detail {

/// Continued-fraction convergents of x with denominators up to max_den.
inline std::vector<Rational> convergents(double x, long max_den = 1000000) {
    std::vector<Rational> out;
    if (!std::isfinite(x) || std::abs(x) > 1e15) return out;
    BigInt h0 = 1, h1 = 0, k0 = 0, k1 = 1;
    double r = x;
    for (int it = 0; it < 40; ++it) {
        const double a = std::floor(r);
        const BigInt ai(a);
        BigInt h2 = ai * h0 + h1, k2 = ai * k0 + k1;
        if (k2 > max_den) break;
        out.emplace_back(h2, k2);
        out.back().canonicalize();
        h1 = h0;
        h0 = h2;
        k1 = k0;
        k0 = k2;
        const double frac = r - a;
        if (frac < 1e-12) break;
        r = 1.0 / frac;
    }
    return out;
}

inline std::vector<std::vector<std::size_t>> augmented_blocks(const MomentSystem& ms) {
    const std::size_t n = ms.size();
    Adjacency adj(n + 1);
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto& [col, v] : ms.rows[r])
            if (col != r) adj[r].push_back(col);
        if (ms.vector_c[r] != 0) adj[r].push_back(n);
    }
    return strongly_connected_components(adj).components;
}

}  // namespace detail

/// Exact characteristic polynomial of [[A, c], [0, 0]] (a product over the
/// strongly connected blocks of its sparsity graph) and its rational roots.
/// Root candidates come from a floating eigensolve of each block and are kept
/// only after exact verification, so the result never depends on rounding.
inline RationalSpectrum rational_spectrum(const MomentSystem& ms) {
    const RationalMatrix full = augmented_matrix_exact(ms);
    RationalSpectrum spec;
    spec.characteristic = UPoly({Rational(1)});
    std::map<Rational, unsigned> found;
    UPoly leftover({Rational(1)});
    for (const auto& block : detail::augmented_blocks(ms)) {
        const std::size_t b = block.size();
        RationalMatrix sub(b, std::vector<Rational>(b));
        Eigen::MatrixXd num(b, b);
        for (std::size_t i = 0; i < b; ++i)
            for (std::size_t j = 0; j < b; ++j) {
                sub[i][j] = full[block[i]][block[j]];
                num(i, j) = sub[i][j].get_d();
            }
        UPoly chi = b == 1 ? UPoly::linear(sub[0][0]) : characteristic_polynomial(sub);
        spec.characteristic = spec.characteristic * chi;
        std::vector<Rational> candidates;
        if (b == 1) {
            candidates.push_back(sub[0][0]);
        } else {
            const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(num, false).eigenvalues();
            for (Eigen::Index i = 0; i < ev.size(); ++i) {
                if (std::abs(ev(i).imag()) > 1e-3 * (1.0 + std::abs(ev(i).real()))) continue;
                for (auto& q : detail::convergents(ev(i).real())) candidates.push_back(std::move(q));
            }
        }
        for (const auto& q : candidates) {
            while (chi.degree() > 0) {
                auto [quot, rem] = chi.divide_linear(q);
                if (rem != 0) break;
                chi = std::move(quot);
                ++found[q];
            }
        }
        leftover = leftover * chi;
    }
    for (auto it = found.rbegin(); it != found.rend(); ++it) spec.roots.emplace_back(it->first, it->second);
    spec.leftover = leftover;
    return spec;
}

namespace detail {

/// Krylov vectors A~^j x~0 for j < N, exact.
inline std::vector<std::vector<Rational>> krylov(const MomentSystem& ms, std::size_t count) {
    const std::size_t n = ms.size();
    std::vector<Rational> x(ms.m0.begin(), ms.m0.end());
    x.emplace_back(1);
    std::vector<std::vector<Rational>> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        out.push_back(x);
        std::vector<Rational> y(n + 1);
        for (std::size_t r = 0; r < n; ++r) {
            Rational acc = ms.vector_c[r] * x[n];
            for (const auto& [col, v] : ms.rows[r]) acc += v * x[col];
            y[r] = std::move(acc);
        }
        x = std::move(y);
    }
    return out;
}

/// Inverse Laplace transform of N(s)/chi(s) by partial fractions over the given roots.
inline ExactClosedForm partial_fractions(const std::vector<Rational>& s_seq, const RationalSpectrum& spec) {
    const auto& chi = spec.characteristic;
    const std::size_t big_n = static_cast<std::size_t>(chi.degree());
    // N(s) = sum_d n_d s^d with n_d = sum_j chi_{d+j+1} s_j
    std::vector<Rational> num(big_n);
    for (std::size_t d = 0; d < big_n; ++d)
        for (std::size_t j = 0; d + j + 1 <= big_n; ++j) num[d] += chi[d + j + 1] * s_seq[j];
    const UPoly numer(std::move(num));
    ExactClosedForm cf;
    for (const auto& [lambda, mu] : spec.roots) {
        UPoly q = chi;
        for (unsigned k = 0; k < mu; ++k) q = q.divide_linear(lambda).first;
        const auto nt = numer.taylor(lambda, mu);
        const auto qt = q.taylor(lambda, mu);
        std::vector<Rational> g(mu);
        for (unsigned i = 0; i < mu; ++i) {
            Rational acc = nt[i];
            for (unsigned k = 1; k <= i; ++k) acc -= qt[k] * g[i - k];
            g[i] = acc / qt[0];
        }
        ExpTerm<Rational> term{lambda, std::vector<Rational>(mu)};
        for (unsigned d = 0; d < mu; ++d) term.coeffs[d] = g[mu - 1 - d] / factorial(d);
        cf.terms.push_back(std::move(term));
    }
    return canonicalize(std::move(cf));
}

inline Unsupported unsupported_from(const RationalSpectrum& spec) {
    return {"characteristic polynomial does not split over the rationals; irreducible part " +
                spec.leftover.to_string("s"),
            spec.leftover, spec.roots};
}

}  // namespace detail

using ExactSolveResult = std::variant<ExactClosedForm, Unsupported>;

/// Exact closed form of constant + sum_r weights[r] m_r(t).
inline ExactSolveResult solve_closed_form(const MomentSystem& ms, std::span<const Rational> weights,
                                          const Rational& constant = 0) {
    if (weights.size() != ms.size()) throw Error("weight vector does not match the closure size");
    const RationalSpectrum spec = rational_spectrum(ms);
    if (!spec.splits()) return detail::unsupported_from(spec);
    const auto kry = detail::krylov(ms, static_cast<std::size_t>(spec.characteristic.degree()));
    std::vector<Rational> s_seq;
    for (const auto& v : kry) {
        Rational acc = constant * v.back();
        for (std::size_t r = 0; r < weights.size(); ++r)
            if (weights[r] != 0) acc += weights[r] * v[r];
        s_seq.push_back(std::move(acc));
    }
    return detail::partial_fractions(s_seq, spec);
}

/// Exact closed form of the target moment (component 0).
inline ExactSolveResult solve_closed_form(const MomentSystem& ms) {
    std::vector<Rational> w(ms.size());
    w.at(0) = 1;
    return solve_closed_form(ms, w);
}

/// Exact closed forms of every component, sharing one spectrum and Krylov sequence.
inline std::variant<std::vector<ExactClosedForm>, Unsupported> solve_closed_form_all(const MomentSystem& ms) {
    const RationalSpectrum spec = rational_spectrum(ms);
    if (!spec.splits()) return detail::unsupported_from(spec);
    const auto kry = detail::krylov(ms, static_cast<std::size_t>(spec.characteristic.degree()));
    std::vector<ExactClosedForm> out;
    std::vector<Rational> s_seq(kry.size());
    for (std::size_t r = 0; r < ms.size(); ++r) {
        for (std::size_t j = 0; j < kry.size(); ++j) s_seq[j] = kry[j][r];
        out.push_back(detail::partial_fractions(s_seq, spec));
    }
    return out;
}

using FloatSolveResult = std::variant<FloatClosedForm, Unsupported>;

/// Closed form from a floating eigendecomposition of the augmented matrix.
/// Refuses when two eigenvalues are closer than 1e-8 (possible Jordan block).
inline FloatSolveResult solve_float_closed_form(const MomentSystem& ms, std::span<const Rational> weights,
                                                const Rational& constant = 0) {
    if (weights.size() != ms.size()) throw Error("weight vector does not match the closure size");
    const AugmentedSystem aug(ms);
    Eigen::EigenSolver<Eigen::MatrixXd> es(aug.matrix, true);
    if (es.info() != Eigen::Success) return Unsupported{"eigendecomposition did not converge", {}, {}};
    const Eigen::VectorXcd lambda = es.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        for (Eigen::Index j = i + 1; j < lambda.size(); ++j)
            if (std::abs(lambda(i) - lambda(j)) < 1e-8)
                return Unsupported{"eigenvalues closer than 1e-8; the spectrum may be defective", {}, {}};
    const Eigen::MatrixXcd v = es.eigenvectors();
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(lambda.size());
    for (std::size_t r = 0; r < weights.size(); ++r) w(static_cast<Eigen::Index>(r)) = weights[r].get_d();
    w(lambda.size() - 1) = constant.get_d();
    const Eigen::VectorXcd coords = v.partialPivLu().solve(aug.state0.cast<std::complex<double>>());
    const Eigen::VectorXcd proj = v.transpose() * w;
    std::vector<std::complex<double>> amp(static_cast<std::size_t>(lambda.size()));
    double biggest = 0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        amp[i] = proj(i) * coords(i);
        biggest = std::max(biggest, std::abs(amp[i]));
    }
    FloatClosedForm cf;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (std::abs(amp[i]) <= 1e-13 * biggest) continue;
        cf.terms.push_back({lambda(i), {amp[i]}});
    }
    return canonicalize(std::move(cf));
}

inline FloatSolveResult solve_float_closed_form(const MomentSystem& ms) {
    std::vector<Rational> w(ms.size());
    w.at(0) = 1;
    return solve_float_closed_form(ms, w);
}

/// E[f(X_t)] for a polynomial f, through one closure over the monomials of f.
struct FunctionalMoment {
    Polynomial functional;
    MomentSystem system;
    std::vector<Rational> weights;  // over system.indices
    Rational constant = 0;

    ExactSolveResult closed_form() const { return solve_closed_form(system, weights, constant); }
    FloatSolveResult float_closed_form() const { return solve_float_closed_form(system, weights, constant); }
    std::vector<double> eval(std::span<const double> times) const {
        return eval_numeric(system, times, weights, constant);
    }
};

using FunctionalResult = std::variant<FunctionalMoment, DivergenceReport>;

inline FunctionalResult linear_functional_moment(const Generator& gen, const Polynomial& f,
                                                 const ClosureBudget& budget = {}) {
    if (f.dim() != gen.model().dim()) throw Error("functional dimension does not match the model");
    std::vector<Monomial> targets;
    for (const auto& [m, c] : f.terms())
        if (!m.is_constant()) targets.push_back(m);
    FunctionalMoment fm;
    fm.functional = f;
    fm.constant = f.constant_term();
    // a constant functional still gets a (harmless) system so the evaluator shape is uniform
    if (targets.empty()) targets.push_back(Monomial::unit(f.dim(), 0));
    auto res = build_closure(gen, std::span<const Monomial>(targets), budget);
    if (auto* div = std::get_if<DivergenceReport>(&res)) return *div;
    fm.system = std::move(std::get<MomentSystem>(res));
    fm.weights.assign(fm.system.size(), Rational(0));
    for (const auto& [m, c] : f.terms())
        if (!m.is_constant()) fm.weights[*fm.system.find(m)] = c;
    return fm;
}

inline FunctionalResult linear_functional_moment(const SdeModel& model, const Polynomial& f,
                                                 const ClosureBudget& budget = {}) {
    return linear_functional_moment(Generator(model), f, budget);
}

/// P(|Z| >= threshold) <= E[|Z|^power] / threshold^power. The raw ratio is
/// returned; clamping to 1 is left to the caller.
inline double markov_tail_bound(double moment_value, double threshold, unsigned power = 2) {
    if (!(threshold > 0)) throw Error("markov_tail_bound: threshold must be positive");
    if (power == 0 || power % 2 != 0) throw Error("markov_tail_bound: power must be an even positive integer");
    if (moment_value < 0) throw Error("markov_tail_bound: moment value must be non-negative");
    return moment_value / std::pow(threshold, static_cast<double>(power));
}

}  // namespace sdem
