#pragma once
// Moment closure: the worklist that grows a set S of multi-indices until it is
// closed under the generator, then assembles dm/dt = A m + c over S.

#include <algorithm>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sdem/generator.hpp"

namespace sdem {

struct ClosureBudget {
    std::size_t max_monomials = 10000;
    std::uint64_t max_total_degree = 200;
};

enum class WorklistOrder { fifo, lifo };

/// Sparse row entry (column, coefficient).
using RowEntry = std::pair<std::size_t, Rational>;

/// The closed linear system dm/dt = A m + c with m_r(t) = E[X_t^{indices[r]}].
/// Rows of A are stored sparsely with ascending columns; entry() gives the dense view.
struct MomentSystem {
    std::string model_name;
    std::vector<std::string> variables;
    std::vector<Monomial> indices;
    std::vector<std::vector<RowEntry>> rows;  // A
    std::vector<Rational> vector_c;
    std::vector<Rational> m0;

    std::size_t size() const { return indices.size(); }

    Rational entry(std::size_t r, std::size_t s) const {
        for (const auto& [col, v] : rows.at(r))
            if (col == s) return v;
        return 0;
    }

    std::vector<std::vector<Rational>> dense_matrix() const {
        std::vector<std::vector<Rational>> a(size(), std::vector<Rational>(size()));
        for (std::size_t r = 0; r < size(); ++r)
            for (const auto& [col, v] : rows[r]) a[r][col] = v;
        return a;
    }

    std::optional<std::size_t> find(const Monomial& m) const {
        auto it = std::find(indices.begin(), indices.end(), m);
        if (it == indices.end()) return std::nullopt;
        return static_cast<std::size_t>(it - indices.begin());
    }
};

struct DivergenceReport {
    enum class Exceeded { monomial_count, degree };

    Exceeded exceeded = Exceeded::monomial_count;
    std::vector<Monomial> witness_chain;  // strictly increasing total degree
    std::size_t visited_count = 0;

    std::string describe(std::span<const std::string> names) const {
        std::string s = exceeded == Exceeded::degree ? "closure exceeded the total-degree budget"
                                                     : "closure exceeded the monomial budget";
        s += " after discovering " + std::to_string(visited_count) + " monomials; witness chain:";
        for (std::size_t i = 0; i < witness_chain.size(); ++i) {
            s += i ? " -> " : " ";
            s += witness_chain[i].to_string(names);
        }
        return s;
    }
};

using ClosureResult = std::variant<MomentSystem, DivergenceReport>;

namespace detail {

// Longest path along degree-increasing generator edges that ends at target.
inline std::vector<Monomial> witness_chain(const std::vector<Monomial>& nodes,
                                           const std::vector<std::pair<std::size_t, std::size_t>>& up_edges,
                                           std::size_t target) {
    std::vector<std::vector<std::size_t>> preds(nodes.size());
    for (auto [from, to] : up_edges) preds[to].push_back(from);
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return nodes[a].degree() < nodes[b].degree(); });
    std::vector<std::size_t> best(nodes.size(), 0);
    std::vector<std::size_t> parent(nodes.size(), nodes.size());
    for (std::size_t v : order)
        for (std::size_t u : preds[v])
            if (best[u] + 1 > best[v] || (best[u] + 1 == best[v] && u < parent[v])) {
                best[v] = best[u] + 1;
                parent[v] = u;
            }
    std::vector<Monomial> chain;
    for (std::size_t v = target; v < nodes.size(); v = parent[v]) chain.push_back(nodes[v]);
    std::reverse(chain.begin(), chain.end());
    return chain;
}

}  // namespace detail

/// Closure over several target monomials at once (the union of their
/// worklists). indices starts with the distinct targets in the given order.
inline ClosureResult build_closure(const Generator& gen, std::span<const Monomial> targets,
                                   const ClosureBudget& budget = {}, WorklistOrder order = WorklistOrder::fifo) {
    const SdeModel& model = gen.model();
    const std::size_t n = model.dim();
    if (budget.max_monomials == 0 || budget.max_total_degree == 0)
        throw Error("closure budget limits must be positive");
    if (targets.empty()) throw Error("closure needs at least one target multi-index");

    std::vector<Monomial> nodes;
    std::unordered_map<Monomial, std::size_t, MonomialHash> index;
    std::vector<std::optional<GeneratorImage>> images;
    std::vector<std::pair<std::size_t, std::size_t>> up_edges;
    std::deque<std::size_t> pending;

    for (const auto& a : targets) {
        if (a.dim() != n) throw Error("target " + a.to_tuple() + " has wrong dimension");
        if (a.degree() == 0) throw Error("target multi-index must have positive total degree");
        if (index.emplace(a, nodes.size()).second) {
            pending.push_back(nodes.size());
            nodes.push_back(a);
            images.emplace_back();
        }
    }

    auto diverged = [&](DivergenceReport::Exceeded why, std::size_t target) -> ClosureResult {
        DivergenceReport rep;
        rep.exceeded = why;
        rep.visited_count = nodes.size();
        rep.witness_chain = detail::witness_chain(nodes, up_edges, target);
        return rep;
    };

    while (!pending.empty()) {
        std::size_t cur;
        if (order == WorklistOrder::fifo) {
            cur = pending.front();
            pending.pop_front();
        } else {
            cur = pending.back();
            pending.pop_back();
        }
        GeneratorImage img = gen.apply(nodes[cur]);
        const auto cur_deg = nodes[cur].degree();
        // highest grlex term first, matching the usual hand expansion order
        for (auto term = img.linear_part.rbegin(); term != img.linear_part.rend(); ++term) {
            const Monomial& gamma = term->first;
            auto [it, inserted] = index.try_emplace(gamma, nodes.size());
            if (inserted) {
                nodes.push_back(gamma);
                images.emplace_back();
                pending.push_back(it->second);
            }
            if (gamma.degree() > cur_deg) up_edges.emplace_back(cur, it->second);
            if (inserted && gamma.degree() > budget.max_total_degree)
                return diverged(DivergenceReport::Exceeded::degree, it->second);
            if (inserted && nodes.size() > budget.max_monomials) {
                std::size_t top = 0;
                for (std::size_t v = 1; v < nodes.size(); ++v)
                    if (nodes[v].degree() > nodes[top].degree()) top = v;
                return diverged(DivergenceReport::Exceeded::monomial_count, top);
            }
        }
        images[cur] = std::move(img);
    }

    MomentSystem ms;
    ms.model_name = model.name;
    ms.variables = model.variables;
    ms.indices = nodes;
    ms.rows.resize(nodes.size());
    ms.vector_c.resize(nodes.size());
    ms.m0.reserve(nodes.size());
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        for (const auto& [gamma, coef] : images[r]->linear_part) ms.rows[r].emplace_back(index.at(gamma), coef);
        std::sort(ms.rows[r].begin(), ms.rows[r].end(),
                  [](const RowEntry& a, const RowEntry& b) { return a.first < b.first; });
        ms.vector_c[r] = images[r]->constant;
        ms.m0.push_back(initial_moment(model.initial, nodes[r]));
    }
    return ms;
}

inline ClosureResult build_closure(const Generator& gen, const Monomial& alpha, const ClosureBudget& budget = {},
                                   WorklistOrder order = WorklistOrder::fifo) {
    return build_closure(gen, std::span<const Monomial>(&alpha, 1), budget, order);
}

inline ClosureResult build_closure(const SdeModel& model, const Monomial& alpha, const ClosureBudget& budget = {},
                                   WorklistOrder order = WorklistOrder::fifo) {
    return build_closure(Generator(model), alpha, budget, order);
}

/// Checks that every generator image of an index stays inside the index set and
/// that the stored row reproduces it. Returns a description of the first violation.
inline std::optional<std::string> check_closedness(const Generator& gen, const MomentSystem& ms) {
    for (std::size_t r = 0; r < ms.size(); ++r) {
        GeneratorImage img = gen.apply(ms.indices[r]);
        if (img.constant != ms.vector_c[r]) return "constant mismatch in row " + ms.indices[r].to_tuple();
        std::size_t matched = 0;
        for (const auto& [gamma, coef] : img.linear_part) {
            auto s = ms.find(gamma);
            if (!s) return "row " + ms.indices[r].to_tuple() + " references " + gamma.to_tuple() + " outside S";
            if (ms.entry(r, *s) != coef) return "coefficient mismatch at " + ms.indices[r].to_tuple() + "/" + gamma.to_tuple();
            ++matched;
        }
        std::size_t nonzero = 0;
        for (const auto& e : ms.rows[r]) nonzero += e.second != 0;
        if (nonzero != matched) return "row " + ms.indices[r].to_tuple() + " has extra entries";
    }
    for (std::size_t a = 0; a < ms.size(); ++a)
        for (std::size_t b = a + 1; b < ms.size(); ++b)
            if (ms.indices[a] == ms.indices[b]) return "duplicate index " + ms.indices[a].to_tuple();
    return std::nullopt;
}

struct SystemRow {
    Monomial index;
    std::vector<std::pair<Monomial, Rational>> terms;
    Rational constant;
};

/// One auditable row per index: dm_index/dt = sum coef * m_gamma + constant.
inline std::vector<SystemRow> system_rows(const MomentSystem& ms) {
    std::vector<SystemRow> out;
    for (std::size_t r = 0; r < ms.size(); ++r) {
        SystemRow row{ms.indices[r], {}, ms.vector_c[r]};
        for (const auto& [col, v] : ms.rows[r]) row.terms.emplace_back(ms.indices[col], v);
        out.push_back(std::move(row));
    }
    return out;
}

inline std::string format_row(const SystemRow& row) {
    std::string s = "d/dt m" + row.index.to_tuple() + " =";
    bool first = true;
    auto emit = [&](const Rational& c, const std::string& what) {
        Rational mag = abs(c);
        if (first) {
            s += c < 0 ? " -" : " ";
        } else {
            s += c < 0 ? " - " : " + ";
        }
        first = false;
        if (what.empty()) {
            s += mag.get_str();
        } else {
            s += (mag == 1 ? std::string() : mag.get_str() + "*") + what;
        }
    };
    if (row.constant != 0) emit(row.constant, "");
    for (const auto& [m, c] : row.terms) emit(c, "m" + m.to_tuple());
    if (first) s += " 0";
    return s;
}

inline nlohmann::json to_json(const MomentSystem& ms) {
    using nlohmann::json;
    json j;
    j["model"] = ms.model_name;
    j["variables"] = ms.variables;
    j["indices"] = json::array();
    for (const auto& m : ms.indices) j["indices"].push_back(std::vector<Monomial::Exponent>(m.exponents().begin(), m.exponents().end()));
    j["matrix_A"] = json::array();
    for (const auto& row : ms.dense_matrix()) {
        json r = json::array();
        for (const auto& v : row) r.push_back(v.get_str());
        j["matrix_A"].push_back(r);
    }
    auto vec = [](const std::vector<Rational>& v) {
        json a = json::array();
        for (const auto& x : v) a.push_back(x.get_str());
        return a;
    };
    j["vector_c"] = vec(ms.vector_c);
    j["m0"] = vec(ms.m0);
    return j;
}

}  // namespace sdem
