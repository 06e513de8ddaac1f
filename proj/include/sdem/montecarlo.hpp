#pragma once
// Euler-Maruyama simulation of dX = b(X) dt + sigma(X) dW, used as a
// statistical oracle for exact moments.
//
// Reproducibility: path p draws from std::mt19937_64 seeded with
// splitmix64(seed ^ splitmix64(p)); normals come from the Box-Muller transform
// (both outputs used in order). Per-path values are reduced by pairwise
// summation in path order, so results do not depend on the worker count.

#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sdem/model.hpp"

namespace sdem {

struct SimConfig {
    double dt = 1e-3;
    double horizon = 0;  // 0: the last record time
    std::size_t paths = 100000;
    std::uint64_t seed = 0;
    std::vector<double> record_times;
    unsigned workers = 1;
};

struct MomentEstimate {
    double time = 0;
    double mean = 0;
    double std_error = 0;
    std::size_t paths = 0;
};

class SimulationBlowUp : public Error {
public:
    using Error::Error;
};

/// Polynomial with double coefficients, evaluated term by term.
class CompiledPolynomial {
public:
    CompiledPolynomial() = default;
    explicit CompiledPolynomial(const Polynomial& p) {
        for (const auto& [m, c] : p.terms()) {
            Term t{c.get_d(), {}};
            for (std::size_t i = 0; i < m.dim(); ++i)
                if (m[i] > 0) t.factors.push_back({i, m[i]});
            terms_.push_back(std::move(t));
        }
    }

    bool is_zero() const { return terms_.empty(); }

    double eval(const double* x) const {
        double acc = 0;
        for (const auto& t : terms_) {
            double v = t.coeff;
            for (const auto& [i, e] : t.factors)
                for (std::uint32_t k = 0; k < e; ++k) v *= x[i];
            acc += v;
        }
        return acc;
    }

private:
    struct Term {
        double coeff;
        std::vector<std::pair<std::size_t, std::uint32_t>> factors;
    };
    std::vector<Term> terms_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Standard normals by Box-Muller on a per-path mt19937_64.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path) : gen_(splitmix64(seed ^ splitmix64(path))) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

private:
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 gen_;
    double spare_ = 0;
    bool has_spare_ = false;
};

/// Sum in a fixed binary tree; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace detail {

struct CompiledModel {
    std::size_t n = 0, m = 0;
    std::vector<CompiledPolynomial> drift;
    std::vector<std::vector<std::pair<std::size_t, CompiledPolynomial>>> diffusion;  // nonzero entries per row
    std::vector<double> x0;

    explicit CompiledModel(const SdeModel& model) : n(model.dim()), m(model.brownian_dim) {
        if (model.initial.kind != InitialCondition::Kind::point)
            throw ModelError("simulation needs a deterministic initial point, not a moment table");
        for (const auto& b : model.drift) drift.emplace_back(b);
        diffusion.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k)
                if (!model.diffusion[i][k].is_zero()) diffusion[i].emplace_back(k, CompiledPolynomial(model.diffusion[i][k]));
        for (const auto& v : model.initial.point) x0.push_back(v.get_d());
    }
};

}  // namespace detail

/// Estimates E[f(X_t)] at each record time from cfg.paths Euler-Maruyama paths.
/// Record time t is taken at step llround(t / dt).
inline std::vector<MomentEstimate> simulate_moment(const SdeModel& model, const Polynomial& target, const SimConfig& cfg) {
    if (!(cfg.dt > 0) || !std::isfinite(cfg.dt)) throw Error("dt must be positive");
    if (cfg.paths < 2) throw Error("simulation needs at least two paths");
    if (cfg.record_times.empty()) throw Error("no record times given");
    if (target.dim() != model.dim()) throw Error("target dimension does not match the model");
    const double horizon = cfg.horizon > 0 ? cfg.horizon : cfg.record_times.back();
    for (std::size_t j = 0; j < cfg.record_times.size(); ++j) {
        const double t = cfg.record_times[j];
        if (!(t >= 0) || t > horizon * (1 + 1e-12)) throw Error("record times must lie in [0, horizon]");
        if (j > 0 && t < cfg.record_times[j - 1]) throw Error("record times must be sorted ascending");
    }
    if (horizon > 0 && cfg.dt > horizon) throw Error("dt must not exceed the horizon");

    const detail::CompiledModel cm(model);
    const CompiledPolynomial f(target);
    std::vector<long long> record_step;
    for (double t : cfg.record_times) record_step.push_back(std::llround(t / cfg.dt));
    const long long total_steps = record_step.back();
    const double sqdt = std::sqrt(cfg.dt);
    const std::size_t nrec = record_step.size();

    std::vector<std::vector<double>> values(nrec, std::vector<double>(cfg.paths));

    auto run_path = [&](std::size_t p, std::vector<double>& x, std::vector<double>& dx, std::vector<double>& xi) {
        NormalStream rng(cfg.seed, p);
        x = cm.x0;
        std::size_t next = 0;
        for (long long step = 0;; ++step) {
            while (next < nrec && record_step[next] == step) values[next++][p] = f.eval(x.data());
            if (step == total_steps) break;
            for (std::size_t k = 0; k < cm.m; ++k) xi[k] = rng.next() * sqdt;
            for (std::size_t i = 0; i < cm.n; ++i) {
                double d = cm.drift[i].eval(x.data()) * cfg.dt;
                for (const auto& [k, s] : cm.diffusion[i]) d += s.eval(x.data()) * xi[k];
                dx[i] = d;
            }
            for (std::size_t i = 0; i < cm.n; ++i) {
                x[i] += dx[i];
                if (!(std::abs(x[i]) <= 1e12))
                    throw SimulationBlowUp("path " + std::to_string(p) + " blew up at t = " +
                                           std::to_string(static_cast<double>(step + 1) * cfg.dt) + " (|" +
                                           model.variables[i] + "| exceeded 1e12)");
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(cfg.paths)));
    std::vector<std::exception_ptr> errors(workers);
    auto run_range = [&](unsigned w) {
        const std::size_t lo = cfg.paths * w / workers, hi = cfg.paths * (w + 1) / workers;
        std::vector<double> x(cm.n), dx(cm.n), xi(cm.m);
        try {
            for (std::size_t p = lo; p < hi; ++p) run_path(p, x, dx, xi);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        run_range(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_range, w);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<MomentEstimate> out;
    const double np = static_cast<double>(cfg.paths);
    std::vector<double> sq(cfg.paths);
    for (std::size_t j = 0; j < nrec; ++j) {
        const double mean = pairwise_sum(values[j]) / np;
        for (std::size_t p = 0; p < cfg.paths; ++p) sq[p] = (values[j][p] - mean) * (values[j][p] - mean);
        const double var = pairwise_sum(sq) / (np - 1);
        out.push_back({cfg.record_times[j], mean, std::sqrt(var / np), cfg.paths});
    }
    return out;
}

inline std::vector<MomentEstimate> simulate_moment(const SdeModel& model, const Monomial& alpha, const SimConfig& cfg) {
    return simulate_moment(model, Polynomial::monomial(alpha), cfg);
}

}  // namespace sdem
