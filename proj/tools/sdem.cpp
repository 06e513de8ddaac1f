// Command-line front end: check, closure, moment, simulate, table1, verify.
//
// Exit codes: 0 success, 2 closure divergence, 3 model or input error,
// 4 verification mismatch, 1 anything else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdem.hpp"

using nlohmann::json;
using namespace sdem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_divergence = 2;
constexpr int exit_model = 3;
constexpr int exit_mismatch = 4;

class UsageError : public Error {
public:
    using Error::Error;
};

std::vector<double> parse_times(const std::string& spec) {
    std::vector<double> out;
    auto num = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw UsageError("bad number '" + s + "' in --times");
        }
    };
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw UsageError("--times range must be start:stop:step");
        const double a = num(parts[0]), b = num(parts[1]), h = num(parts[2]);
        if (!(h > 0) || b < a) throw UsageError("--times range needs step > 0 and stop >= start");
        const long long n = std::llround((b - a) / h);
        for (long long k = 0; k <= n; ++k) out.push_back(a + static_cast<double>(k) * h);
    } else {
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ',');) out.push_back(num(p));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] < 0) throw UsageError("--times must be non-negative");
        if (i && out[i] < out[i - 1]) throw UsageError("--times must be sorted ascending");
    }
    if (out.empty()) throw UsageError("--times is empty");
    return out;
}

/// "0,2" is a multi-index; anything else is a polynomial over the model variables.
Polynomial parse_target(const std::string& text, const SdeModel& model) {
    static const std::regex exps(R"(\s*\d+(\s*,\s*\d+)*\s*)");
    if (std::regex_match(text, exps)) {
        std::vector<Monomial::Exponent> e;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');) e.push_back(static_cast<Monomial::Exponent>(std::stoul(p)));
        if (e.size() != model.dim())
            throw UsageError("--alpha has " + std::to_string(e.size()) + " exponents but the model has " +
                             std::to_string(model.dim()) + " variables");
        Monomial m(std::move(e));
        if (m.is_constant()) throw UsageError("--alpha must have total degree at least 1");
        return Polynomial::monomial(m);
    }
    try {
        Polynomial f = parse_polynomial(text, model.variables);
        if (f.is_constant()) throw UsageError("--alpha functional must depend on a variable");
        return f;
    } catch (const ParseError& e) {
        throw UsageError(std::string("--alpha: ") + e.what());
    }
}

OrderedPartition partition_arg(const std::string& text, const SdeModel& model) {
    try {
        return parse_partition(text, model.variables);
    } catch (const Error& e) {
        throw UsageError(std::string("--partition: ") + e.what());
    }
}

std::string target_text(const Polynomial& f, const SdeModel& model) { return f.to_string(model.variables); }

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json partition_json(const OrderedPartition& p, const SdeModel& m) {
    json blocks = json::array();
    for (const auto& b : p.blocks) {
        json names = json::array();
        for (auto v : b) names.push_back(m.variables[v]);
        blocks.push_back(names);
    }
    return blocks;
}

struct Options {
    bool as_json = false;
    bool timing = false;
};

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------- check

int cmd_check(const std::string& file, const std::string& partition_text, const Options& opt) {
    const SdeModel model = load_model_file(file);
    json j{{"model", model.name}};
    std::ostringstream out;
    out << "model: " << model.name << "\n";

    const auto rep = check_prosolvable(model);
    json edges = json::array();
    for (const auto& e : rep.graph.edges)
        edges.push_back({{"from", model.variables[e.from]}, {"to", model.variables[e.to]}, {"nonlinear", e.nonlinear}});
    j["dependency_edges"] = edges;

    std::optional<OrderedPartition> partition;
    bool ok = rep.prosolvable;
    if (!partition_text.empty()) {
        OrderedPartition user = partition_arg(partition_text, model);
        const auto chk = verify_partition(model, user);
        ok = chk.ok;
        j["partition_check"] = {{"partition", partition_json(user, model)}, {"ok", chk.ok}, {"diagnostic", chk.diagnostic}};
        out << "partition " << user.to_string(model.variables) << ": " << (chk.ok ? "valid" : "invalid");
        if (!chk.ok) out << " (" << chk.diagnostic << ")";
        out << "\n";
        if (chk.ok) partition = user;
    } else {
        j["prosolvable"] = rep.prosolvable;
        out << "prosolvable: " << (rep.prosolvable ? "yes" : "no") << "\n";
        if (rep.partition) {
            j["partition"] = partition_json(*rep.partition, model);
            out << "partition: " << rep.partition->to_string(model.variables) << "\n";
            partition = rep.partition;
        }
        if (rep.violation) {
            const auto& e = rep.violation->edge;
            json scc = json::array();
            for (auto v : rep.violation->scc) scc.push_back(model.variables[v]);
            j["violation"] = {{"edge", {{"from", model.variables[e.from]}, {"to", model.variables[e.to]}}}, {"scc", scc}};
            out << "violation: nonlinear edge " << model.variables[e.from] << " -> " << model.variables[e.to]
                << " inside the strongly connected component {";
            for (std::size_t i = 0; i < rep.violation->scc.size(); ++i)
                out << (i ? "," : "") << model.variables[rep.violation->scc[i]];
            out << "}\n";
        }
        if (rep.note) {
            j["note"] = *rep.note;
            out << "note: " << *rep.note << "\n";
        }
    }
    out << "dependency edges:";
    for (const auto& e : rep.graph.edges)
        out << " " << model.variables[e.from] << "->" << model.variables[e.to] << (e.nonlinear ? "*" : "");
    out << "  (* nonlinear)\n";

    if (partition) {
        const auto bw = compute_block_weights(model, *partition);
        json c = json::array();
        out << "block weights: W = (";
        for (std::size_t p = 0; p < bw.W.size(); ++p) out << (p ? "," : "") << bw.W[p];
        out << ")";
        for (const auto& [pq, v] : bw.C) {
            c.push_back({{"p", pq.first + 1}, {"q", pq.second + 1}, {"value", v}});
            out << "  C[" << pq.first + 1 << "," << pq.second + 1 << "] = " << v;
        }
        out << "\n";
        j["weights"] = {{"W", bw.W}, {"C", c}};
    }
    if (opt.as_json) {
        print_json(j);
    } else {
        std::cout << out.str();
    }
    return ok ? exit_ok : exit_mismatch;
}

// ---------------------------------------------------------------- closure

int report_divergence(const DivergenceReport& d, const SdeModel& model, const Options& opt, bool header = true) {
    if (opt.as_json) {
        json chain = json::array();
        for (const auto& m : d.witness_chain) chain.push_back(m.to_string(model.variables));
        print_json({{"model", model.name},
                    {"diverged", true},
                    {"exceeded", d.exceeded == DivergenceReport::Exceeded::degree ? "degree" : "monomial-count"},
                    {"visited", d.visited_count},
                    {"witness_chain", chain}});
    } else {
        if (header) std::cout << "model: " << model.name << "\n";
        std::cout << d.describe(model.variables) << "\n";
    }
    return exit_divergence;
}

ClosureBudget make_budget(std::size_t max_monomials, std::uint64_t max_degree) {
    if (max_monomials == 0 || max_degree == 0) throw UsageError("budgets must be positive");
    return {max_monomials, max_degree};
}

int cmd_closure(const std::string& file, const std::string& alpha, const ClosureBudget& budget, const Options& opt) {
    const SdeModel model = load_model_file(file);
    const Polynomial f = parse_target(alpha, model);
    const auto start = std::chrono::steady_clock::now();
    auto res = linear_functional_moment(model, f, budget);
    const double ms_taken = elapsed_ms(start);
    if (auto* d = std::get_if<DivergenceReport>(&res)) return report_divergence(*d, model, opt);
    const auto& fm = std::get<FunctionalMoment>(res);
    if (opt.as_json) {
        json j = to_json(fm.system);
        j["target"] = target_text(f, model);
        json w = json::array();
        for (const auto& x : fm.weights) w.push_back(x.get_str());
        j["target_weights"] = w;
        j["target_constant"] = fm.constant.get_str();
        if (opt.timing) j["build_ms"] = ms_taken;
        print_json(j);
        return exit_ok;
    }
    std::cout << "model: " << model.name << "\n"
              << "target: " << target_text(f, model) << "\n"
              << "closure size: " << fm.system.size() << "\n";
    if (opt.timing) std::cout << "build time: " << fmt(ms_taken) << " ms\n";
    for (const auto& row : system_rows(fm.system)) std::cout << format_row(row) << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------- moment

struct SimFlags {
    double dt = 1e-3;
    std::size_t paths = 100000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

SimConfig make_sim_config(const SimFlags& s, const std::vector<double>& times) {
    SimConfig cfg;
    cfg.dt = s.dt;
    cfg.paths = s.paths;
    cfg.seed = s.seed;
    cfg.workers = s.workers;
    cfg.record_times = times;
    return cfg;
}

// Exact closed form if the spectrum is rational, else a float closed form if
// the spectrum is simple; nullopt text means only numeric evaluation is available.
struct SolvedForm {
    std::optional<ExactClosedForm> exact;
    std::optional<FloatClosedForm> floating;
    std::string note;

    json to_json_value() const {
        if (exact) return to_json(*exact);
        if (floating) {
            json j = to_json(*floating);
            j["note"] = note;
            return j;
        }
        return {{"unsupported", note}};
    }
};

SolvedForm solve_any(const FunctionalMoment& fm) {
    SolvedForm s;
    auto ex = fm.closed_form();
    if (auto* cf = std::get_if<ExactClosedForm>(&ex)) {
        s.exact = *cf;
        return s;
    }
    s.note = std::get<Unsupported>(ex).reason;
    auto fl = fm.float_closed_form();
    if (auto* cf = std::get_if<FloatClosedForm>(&fl)) {
        s.floating = *cf;
        s.note += "; floating eigendecomposition used";
    } else {
        s.note += "; " + std::get<Unsupported>(fl).reason + "; numeric evaluation only";
    }
    return s;
}

bool within_4se(double estimate, double std_error, double exact) {
    return std::abs(estimate - exact) <= 4.0 * std_error + 1e-12 * (1.0 + std::abs(exact));
}

int cmd_moment(const std::string& file, const std::string& alpha, const std::string& times_spec, bool closed_form,
               const ClosureBudget& budget, bool simulate, const SimFlags& sim, bool certify,
               const std::string& partition_text, const Options& opt) {
    const SdeModel model = load_model_file(file);
    const Polynomial f = parse_target(alpha, model);
    const auto times = parse_times(times_spec);
    int code = exit_ok;

    json j{{"model", model.name}, {"target", target_text(f, model)}};
    std::ostringstream out;
    out << "model: " << model.name << "\n" << "target: E[" << target_text(f, model) << "]\n";

    const auto rep = check_prosolvable(model);
    j["prosolvable"] = rep.prosolvable;
    out << "prosolvable: " << (rep.prosolvable ? "yes " + rep.partition->to_string(model.variables) : "no") << "\n";
    if (rep.partition) j["partition"] = partition_json(*rep.partition, model);

    const auto start = std::chrono::steady_clock::now();
    auto res = linear_functional_moment(model, f, budget);
    const double build_ms = elapsed_ms(start);
    if (auto* d = std::get_if<DivergenceReport>(&res)) {
        if (!opt.as_json) std::cout << out.str();
        return report_divergence(*d, model, opt, false);
    }
    const auto& fm = std::get<FunctionalMoment>(res);
    j["closure_size"] = fm.system.size();
    out << "closure size: " << fm.system.size() << "\n";
    if (opt.timing) {
        j["build_ms"] = build_ms;
        out << "build time: " << fmt(build_ms) << " ms\n";
    }

    if (certify) {
        std::optional<OrderedPartition> part = rep.partition;
        if (!partition_text.empty()) part = partition_arg(partition_text, model);
        if (!part) {
            j["certificate"] = {{"ok", false}, {"reason", "model is not pro-solvable and no --partition was given"}};
            out << "certificate: unavailable (not pro-solvable; pass --partition)\n";
            code = exit_mismatch;
        } else if (auto chk = verify_partition(model, *part); !chk.ok) {
            j["certificate"] = {{"ok", false}, {"reason", chk.diagnostic}};
            out << "certificate: partition rejected (" << chk.diagnostic << ")\n";
            code = exit_mismatch;
        } else {
            std::size_t ntargets = 0;
            for (const auto& [m, c] : f.terms()) ntargets += m.is_constant() ? 0 : 1;
            const auto cert = certify_closure(model, *part, fm.system, ntargets);
            j["certificate"] = {{"ok", cert.ok},
                                {"target_weighted_degree", cert.target_weighted_degree},
                                {"max_weighted_degree", cert.max_weighted_degree},
                                {"block_bounds", cert.block_bounds},
                                {"c0", cert.c0},
                                {"combinatorial_bound", cert.combinatorial_bound.get_str()},
                                {"checked_transitions", cert.checked_transitions}};
            if (cert.violation) j["certificate"]["violation"] = *cert.violation;
            out << "certificate: " << (cert.ok ? "ok" : "VIOLATED") << ", max deg_W " << cert.max_weighted_degree
                << " <= " << cert.target_weighted_degree << ", C0 = " << cert.c0 << ", bound |S| <= "
                << cert.combinatorial_bound.get_str() << "\n";
            if (cert.violation) out << "  " << *cert.violation << "\n";
            if (!cert.ok) code = exit_mismatch;
        }
    }

    if (closed_form) {
        const SolvedForm s = solve_any(fm);
        j["closed_form"] = s.to_json_value();
        if (s.exact) {
            out << "closed form: " << to_string(*s.exact) << "\n";
        } else if (s.floating) {
            out << "closed form (floating): " << to_string(*s.floating) << "\n" << "note: " << s.note << "\n";
        } else {
            out << "closed form: unavailable\nnote: " << s.note << "\n";
        }
    }

    const auto values = fm.eval(times);
    json samples = json::array();
    for (std::size_t i = 0; i < times.size(); ++i) samples.push_back({{"t", times[i]}, {"value", values[i]}});
    j["samples"] = samples;

    std::vector<MomentEstimate> mc;
    if (simulate) mc = simulate_moment(model, f, make_sim_config(sim, times));

    if (simulate) {
        out << "t,value,mc_mean,mc_std_error,within_4se\n";
        json mcj = json::array();
        for (std::size_t i = 0; i < times.size(); ++i) {
            const bool pass = within_4se(mc[i].mean, mc[i].std_error, values[i]);
            if (!pass) code = exit_mismatch;
            out << fmt(times[i]) << "," << fmt(values[i]) << "," << fmt(mc[i].mean) << "," << fmt(mc[i].std_error) << ","
                << (pass ? "pass" : "FAIL") << "\n";
            mcj.push_back({{"t", times[i]},
                           {"mean", mc[i].mean},
                           {"std_error", mc[i].std_error},
                           {"paths", mc[i].paths},
                           {"pass", pass}});
        }
        j["monte_carlo"] = {{"dt", sim.dt}, {"paths", sim.paths}, {"seed", sim.seed}, {"estimates", mcj}};
    } else {
        out << "t,value\n";
        for (std::size_t i = 0; i < times.size(); ++i) out << fmt(times[i]) << "," << fmt(values[i]) << "\n";
    }
    if (opt.as_json) {
        print_json(j);
    } else {
        std::cout << out.str();
    }
    return code;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& file, const std::string& alpha, const std::string& times_spec, const SimFlags& sim,
                 const Options& opt) {
    const SdeModel model = load_model_file(file);
    const Polynomial f = parse_target(alpha, model);
    const auto est = simulate_moment(model, f, make_sim_config(sim, parse_times(times_spec)));
    if (opt.as_json) {
        json rows = json::array();
        for (const auto& e : est)
            rows.push_back({{"time", e.time}, {"mean", e.mean}, {"std_error", e.std_error}, {"paths", e.paths}});
        print_json({{"model", model.name}, {"target", target_text(f, model)}, {"dt", sim.dt}, {"seed", sim.seed}, {"estimates", rows}});
    } else {
        std::cout << "time,mean,std_error,paths\n";
        for (const auto& e : est) std::cout << fmt(e.time) << "," << fmt(e.mean) << "," << fmt(e.std_error) << "," << e.paths << "\n";
    }
    return exit_ok;
}

// ---------------------------------------------------------------- table1

int cmd_table1(const std::string& dir, const Options& opt) {
    bool all_ok = true;
    json rows = json::array();
    std::ostringstream out;
    out << "benchmark   target        |S|  expected  p-s  expected  solve      status\n";
    for (const auto& row : table1_rows()) {
        const SdeModel model = load_benchmark(row.benchmark, dir);
        const Monomial alpha(row.alpha);
        const auto rep = check_prosolvable(model);
        const auto start = std::chrono::steady_clock::now();
        auto res = build_closure(model, alpha);
        const double build_ms = elapsed_ms(start);
        std::size_t size = 0;
        std::string solve = "diverged";
        if (auto* ms = std::get_if<MomentSystem>(&res)) {
            size = ms->size();
            if (std::holds_alternative<ExactClosedForm>(solve_closed_form(*ms)))
                solve = "exact";
            else if (std::holds_alternative<FloatClosedForm>(solve_float_closed_form(*ms)))
                solve = "float";
            else
                solve = "numeric";
        }
        const bool ok = size == row.expected_size && rep.prosolvable == row.expected_prosolvable;
        all_ok = all_ok && ok;
        const std::string target = alpha.to_string(model.variables);
        char line[256];
        std::snprintf(line, sizeof line, "%-11s %-12s %4zu  %8zu  %-3s  %-8s  %-9s  %s", row.benchmark.c_str(),
                      target.c_str(), size, row.expected_size, rep.prosolvable ? "yes" : "no",
                      row.expected_prosolvable ? "yes" : "no", solve.c_str(), ok ? "ok" : "MISMATCH");
        out << line;
        if (opt.timing) out << "  " << fmt(build_ms) << " ms";
        out << "\n";
        json r{{"benchmark", row.benchmark},
               {"alpha", row.alpha},
               {"target", target},
               {"size", size},
               {"expected_size", row.expected_size},
               {"prosolvable", rep.prosolvable},
               {"expected_prosolvable", row.expected_prosolvable},
               {"solve", solve},
               {"ok", ok}};
        if (opt.timing) r["build_ms"] = build_ms;
        rows.push_back(r);
    }
    if (opt.as_json) {
        print_json({{"rows", rows}, {"ok", all_ok}});
    } else {
        std::cout << out.str();
    }
    return all_ok ? exit_ok : exit_mismatch;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const std::string& file, const std::string& alpha, const std::string& times_spec,
               std::optional<std::size_t> expect_size, const std::string& expect_form, bool simulate,
               const SimFlags& sim, const Options& opt) {
    const SdeModel model = load_model_file(file);
    const Polynomial f = parse_target(alpha, model);
    const auto times = parse_times(times_spec);
    auto res = linear_functional_moment(model, f);
    if (auto* d = std::get_if<DivergenceReport>(&res)) return report_divergence(*d, model, opt);
    const auto& fm = std::get<FunctionalMoment>(res);

    json checks = json::array();
    bool all_ok = true;
    auto record = [&](const std::string& name, bool ok, const std::string& detail) {
        all_ok = all_ok && ok;
        checks.push_back({{"check", name}, {"ok", ok}, {"detail", detail}});
    };

    const auto closed = check_closedness(Generator(model), fm.system);
    record("closedness", !closed, closed.value_or("every generator image lies in the closure"));

    if (expect_size) {
        record("closure-size", fm.system.size() == *expect_size,
               "got " + std::to_string(fm.system.size()) + ", expected " + std::to_string(*expect_size));
    }

    const auto rep = check_prosolvable(model);
    if (rep.prosolvable) {
        std::size_t ntargets = 0;
        for (const auto& [m, c] : f.terms()) ntargets += m.is_constant() ? 0 : 1;
        const auto cert = certify_closure(model, *rep.partition, fm.system, ntargets);
        record("weighted-degree-certificate", cert.ok, cert.violation.value_or("deg_W never increases"));
    }

    const SolvedForm s = solve_any(fm);
    const auto numeric = fm.eval(times);
    if (s.exact || s.floating) {
        double worst = 0;
        bool ok = true;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double v = s.exact ? eval_closed_form(*s.exact, times[i]) : eval_closed_form(*s.floating, times[i]);
            const double err = std::abs(v - numeric[i]);
            worst = std::max(worst, err);
            if (err > 1e-10 && err > 1e-8 * std::abs(numeric[i])) ok = false;
        }
        record("closed-form-vs-expm", ok, "max abs difference " + fmt(worst));
    } else {
        record("closed-form-vs-expm", true, "skipped: " + s.note);
    }

    if (s.exact) {
        const Rational at0 = value_at_zero(*s.exact);
        Rational want = fm.constant;
        for (std::size_t r = 0; r < fm.system.size(); ++r) want += fm.weights[r] * fm.system.m0[r];
        record("initial-value", at0 == want, "closed form at t=0 is " + at0.get_str() + ", initial moment " + want.get_str());
        auto all = solve_closed_form_all(fm.system);
        if (auto* forms = std::get_if<std::vector<ExactClosedForm>>(&all)) {
            bool ok = true;
            for (std::size_t r = 0; r < fm.system.size() && ok; ++r) {
                std::vector<std::pair<Rational, const ExactClosedForm*>> parts;
                for (const auto& [col, v] : fm.system.rows[r]) parts.emplace_back(v, &(*forms)[col]);
                ok = derivative((*forms)[r]) == scaled_sum(parts, fm.system.vector_c[r]);
            }
            record("ode-residual", ok, ok ? "d/dt m - (A m + c) is identically zero" : "nonzero residual");
        }
    }

    if (!expect_form.empty()) {
        const std::string got = s.exact ? to_string(*s.exact) : std::string("(no exact closed form)");
        record("expected-closed-form", got == expect_form, "got " + got);
    }

    if (simulate) {
        const auto mc = simulate_moment(model, f, make_sim_config(sim, times));
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const bool pass = within_4se(mc[i].mean, mc[i].std_error, numeric[i]);
            ok = ok && pass;
            if (!pass) detail += "t=" + fmt(times[i]) + " off by " + fmt(std::abs(mc[i].mean - numeric[i]) / mc[i].std_error) + " SE; ";
        }
        record("monte-carlo-4se", ok, ok ? "all estimates within 4 standard errors" : detail);
    }

    if (opt.as_json) {
        print_json({{"model", model.name}, {"target", target_text(f, model)}, {"checks", checks}, {"ok", all_ok}});
    } else {
        std::cout << "model: " << model.name << "\ntarget: E[" << target_text(f, model) << "]\n";
        for (const auto& c : checks)
            std::cout << (c["ok"].get<bool>() ? "PASS " : "FAIL ") << c["check"].get<std::string>() << ": "
                      << c["detail"].get<std::string>() << "\n";
    }
    return all_ok ? exit_ok : exit_mismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact moments of polynomial SDEs"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_flag("--json", opt.as_json, "Machine-readable JSON output");
    app.add_flag("--timing", opt.timing, "Include wall-clock timings (makes output nondeterministic)");

    std::string file, alpha, times = "0:10:0.5", partition, expect_form, bench_dir = SDEM_BENCHMARK_DIR;
    std::size_t max_monomials = 10000;
    std::uint64_t max_degree = 200;
    bool closed_form = false, simulate = false, certify = false;
    std::optional<std::size_t> expect_size;
    SimFlags sim;

    auto add_budget = [&](CLI::App* c) {
        c->add_option("--budget", max_monomials, "Maximum number of monomials in the closure")->capture_default_str();
        c->add_option("--max-degree", max_degree, "Maximum total degree in the closure")->capture_default_str();
    };
    auto add_sim = [&](CLI::App* c) {
        c->add_option("--dt", sim.dt, "Euler-Maruyama step")->capture_default_str();
        c->add_option("--paths", sim.paths, "Number of simulated paths")->capture_default_str();
        c->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
        c->add_option("--workers", sim.workers, "Worker threads (results do not depend on this)")->capture_default_str();
    };
    const char* alpha_help = "Target: exponents such as 0,2 or a polynomial such as \"(x1 - x2)^2\"";
    const char* times_help = "Times as start:stop:step or a comma list";

    auto* check = app.add_subcommand("check", "Pro-solvability check and block weights");
    check->add_option("model", file, "Model JSON file")->required();
    check->add_option("--partition", partition, "Verify this ordered partition instead, e.g. \"x1|x2\"");

    auto* closure = app.add_subcommand("closure", "Build and print the closed moment system");
    closure->add_option("model", file, "Model JSON file")->required();
    closure->add_option("--alpha", alpha, alpha_help)->required();
    add_budget(closure);

    auto* moment = app.add_subcommand("moment", "Exact moment: closure, closed form, numeric samples");
    moment->add_option("model", file, "Model JSON file")->required();
    moment->add_option("--alpha", alpha, alpha_help)->required();
    moment->add_option("--times", times, times_help)->capture_default_str();
    moment->add_flag("--closed-form", closed_form, "Print the closed-form expression");
    moment->add_flag("--simulate", simulate, "Compare against Euler-Maruyama at 4 standard errors");
    moment->add_flag("--certify", certify, "Run the weighted-degree termination certificate");
    moment->add_option("--partition", partition, "Partition for --certify, e.g. \"v1|p1,p2,v2\"");
    add_budget(moment);
    add_sim(moment);

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo moment estimates as CSV");
    simulate_cmd->add_option("model", file, "Model JSON file")->required();
    simulate_cmd->add_option("--alpha", alpha, alpha_help)->required();
    simulate_cmd->add_option("--times", times, times_help)->capture_default_str();
    add_sim(simulate_cmd);

    auto* table1 = app.add_subcommand("table1", "Rerun the benchmark closure-size table");
    table1->add_option("--benchmarks", bench_dir, "Directory holding the benchmark JSON files")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Run the consistency checks for one target");
    verify->add_option("model", file, "Model JSON file")->required();
    verify->add_option("--alpha", alpha, alpha_help)->required();
    verify->add_option("--times", times, times_help)->capture_default_str();
    verify->add_option("--expect-size", expect_size, "Expected closure size");
    verify->add_option("--expect", expect_form, "Expected canonical closed-form text");
    verify->add_flag("--simulate", simulate, "Also compare against Euler-Maruyama");
    add_sim(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*check) return cmd_check(file, partition, opt);
        if (*closure) return cmd_closure(file, alpha, make_budget(max_monomials, max_degree), opt);
        if (*moment)
            return cmd_moment(file, alpha, times, closed_form, make_budget(max_monomials, max_degree), simulate, sim,
                              certify, partition, opt);
        if (*simulate_cmd) return cmd_simulate(file, alpha, times, sim, opt);
        if (*table1) return cmd_table1(bench_dir, opt);
        if (*verify) return cmd_verify(file, alpha, times, expect_size, expect_form, simulate, sim, opt);
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return exit_model;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_model;
    } catch (const UsageError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_model;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
