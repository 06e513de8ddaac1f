#pragma once
// Pro-solvability: the block-triangular affine structure that guarantees the
// moment closure terminates, decided on the variable dependency graph, plus
// the weighted block degree used as a runtime termination certificate.

#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "sdem/closure.hpp"
#include "sdem/graph.hpp"

namespace sdem {

struct DependencyEdge {
    std::size_t from = 0;  // x_from occurs in the coefficients of variable `to`
    std::size_t to = 0;
    bool nonlinear = false;

    friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

struct DependencyGraph {
    std::size_t n = 0;
    std::vector<DependencyEdge> edges;  // sorted by (from, to)

    Adjacency adjacency() const {
        Adjacency adj(n);
        for (const auto& e : edges) adj[e.from].push_back(e.to);
        return adj;
    }
    std::optional<DependencyEdge> edge(std::size_t from, std::size_t to) const {
        for (const auto& e : edges)
            if (e.from == from && e.to == to) return e;
        return std::nullopt;
    }
};

inline DependencyGraph build_dependency_graph(const SdeModel& model) {
    const std::size_t n = model.dim();
    // flags[to][from]: 0 = absent, 1 = linear, 2 = nonlinear
    std::vector<std::vector<int>> flags(n, std::vector<int>(n, 0));
    auto scan = [&](std::size_t to, const Polynomial& p) {
        for (const auto& [m, c] : p.terms())
            for (std::size_t j = 0; j < n; ++j)
                if (m[j]) flags[to][j] = std::max(flags[to][j], m.degree() >= 2 ? 2 : 1);
    };
    for (std::size_t i = 0; i < n; ++i) {
        scan(i, model.drift[i]);
        for (const auto& s : model.diffusion[i]) scan(i, s);
    }
    DependencyGraph g;
    g.n = n;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            if (flags[i][j]) g.edges.push_back({j, i, flags[i][j] == 2});
    return g;
}

/// Blocks G_1 < ... < G_r of 0-based variable indices.
struct OrderedPartition {
    std::vector<std::vector<std::size_t>> blocks;

    std::size_t size() const { return blocks.size(); }

    /// Throws unless the blocks are non-empty, disjoint and cover 0..n-1.
    void validate(std::size_t n) const {
        std::vector<int> seen(n, 0);
        for (const auto& b : blocks) {
            if (b.empty()) throw Error("ordered partition has an empty block");
            for (auto v : b) {
                if (v >= n) throw Error("ordered partition references variable index out of range");
                if (seen[v]++) throw Error("ordered partition blocks are not disjoint");
            }
        }
        for (std::size_t v = 0; v < n; ++v)
            if (!seen[v]) throw Error("ordered partition does not cover variable " + std::to_string(v + 1));
    }

    std::vector<std::size_t> block_of(std::size_t n) const {
        std::vector<std::size_t> out(n, 0);
        for (std::size_t p = 0; p < blocks.size(); ++p)
            for (auto v : blocks[p]) out[v] = p;
        return out;
    }

    /// "({x1},{x2})"
    std::string to_string(std::span<const std::string> names) const {
        std::string s = "(";
        for (std::size_t p = 0; p < blocks.size(); ++p) {
            if (p) s += ",";
            s += "{";
            for (std::size_t k = 0; k < blocks[p].size(); ++k) {
                if (k) s += ",";
                s += names[blocks[p][k]];
            }
            s += "}";
        }
        return s + ")";
    }

    friend bool operator==(const OrderedPartition&, const OrderedPartition&) = default;
};

/// Parses "x1|x2,x3" (blocks separated by '|', variables by ',') against the model's names.
inline OrderedPartition parse_partition(const std::string& text, std::span<const std::string> names) {
    OrderedPartition part;
    std::vector<std::size_t> cur;
    std::string tok;
    auto flush_tok = [&] {
        auto b = tok.find_first_not_of(" \t{}()");
        auto e = tok.find_last_not_of(" \t{}()");
        std::string name = b == std::string::npos ? "" : tok.substr(b, e - b + 1);
        tok.clear();
        if (name.empty()) return;
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw Error("partition names unknown variable '" + name + "'");
        cur.push_back(static_cast<std::size_t>(it - names.begin()));
    };
    for (char c : text) {
        if (c == ',') {
            flush_tok();
        } else if (c == '|') {
            flush_tok();
            part.blocks.push_back(cur);
            cur.clear();
        } else {
            tok += c;
        }
    }
    flush_tok();
    part.blocks.push_back(cur);
    part.validate(names.size());
    return part;
}

struct ProsolvabilityReport {
    struct Violation {
        DependencyEdge edge;
        std::vector<std::size_t> scc;
    };

    bool prosolvable = false;
    std::optional<OrderedPartition> partition;
    std::optional<Violation> violation;
    std::optional<std::string> note;  // set when the inferred order fails re-verification
    DependencyGraph graph;
};

struct PartitionCheck {
    bool ok = true;
    std::string diagnostic;
    explicit operator bool() const { return ok; }
};

namespace detail {

// Splits a coefficient polynomial of a block-p variable into its affine
// own-block part and the remainder; reports the first monomial that is neither.
struct BlockSplit {
    Polynomial linear;     // sum_{j in G_p} L_j x_j
    Polynomial remainder;  // polynomial in earlier blocks
    std::optional<std::pair<Monomial, Rational>> offending;
};

inline BlockSplit split_by_block(const Polynomial& f, std::size_t p, const std::vector<std::size_t>& block_of) {
    BlockSplit out{Polynomial(f.dim()), Polynomial(f.dim()), std::nullopt};
    for (const auto& [m, c] : f.terms()) {
        std::uint64_t own = 0, later = 0;
        for (std::size_t v = 0; v < m.dim(); ++v) {
            if (!m[v]) continue;
            if (block_of[v] == p) own += m[v];
            if (block_of[v] > p) later += m[v];
        }
        if (later == 0 && own == 1 && m.degree() == 1) {
            out.linear.add_term(m, c);
        } else if (later == 0 && own == 0) {
            out.remainder.add_term(m, c);
        } else if (!out.offending) {
            out.offending = std::make_pair(m, c);
        }
    }
    return out;
}

}  // namespace detail

/// Checks the block-triangular affine structure for the given ordered partition.
inline PartitionCheck verify_partition(const SdeModel& model, const OrderedPartition& partition) {
    const std::size_t n = model.dim();
    partition.validate(n);
    const auto block_of = partition.block_of(n);
    const auto& names = model.variables;
    for (std::size_t p = 0; p < partition.size(); ++p) {
        for (std::size_t i : partition.blocks[p]) {
            auto check = [&](const Polynomial& f, const std::string& what) -> std::optional<std::string> {
                auto split = detail::split_by_block(f, p, block_of);
                if (!split.offending) return std::nullopt;
                const auto& [m, c] = *split.offending;
                return what + " contains " + c.get_str() + "*" + m.to_string(names) +
                       ", which is not affine in block " + std::to_string(p + 1) +
                       " plus a polynomial in earlier blocks";
            };
            if (auto d = check(model.drift[i], "drift of " + names[i])) return {false, *d};
            for (std::size_t k = 0; k < model.brownian_dim; ++k)
                if (auto d = check(model.diffusion[i][k],
                                   "diffusion (" + names[i] + ", W" + std::to_string(k + 1) + ")"))
                    return {false, *d};
        }
    }
    return {true, {}};
}

/// Decides pro-solvability: no strongly connected component of the dependency
/// graph may contain a nonlinear edge. On success the partition is the
/// condensation in topological order.
inline ProsolvabilityReport check_prosolvable(const SdeModel& model) {
    ProsolvabilityReport rep;
    rep.graph = build_dependency_graph(model);
    const Adjacency adj = rep.graph.adjacency();
    const SccResult scc = strongly_connected_components(adj);
    for (const auto& e : rep.graph.edges) {
        if (e.nonlinear && scc.component_of[e.from] == scc.component_of[e.to]) {
            rep.prosolvable = false;
            rep.violation = ProsolvabilityReport::Violation{e, scc.components[scc.component_of[e.from]]};
            return rep;
        }
    }
    OrderedPartition part;
    for (std::size_t c : condensation_order(scc, adj)) part.blocks.push_back(scc.components[c]);
    if (auto check = verify_partition(model, part); !check) {
        rep.prosolvable = false;
        rep.note = "inferred partition failed verification: " + check.diagnostic;
        return rep;
    }
    rep.prosolvable = true;
    rep.partition = std::move(part);
    return rep;
}

/// A polynomial-produced primitive term x^gamma d_i (second = npos) or
/// x^gamma d_i d_j, attributed to its source block.
struct PrimitiveTerm {
    static constexpr std::size_t none = static_cast<std::size_t>(-1);

    Monomial coefficient;
    std::size_t first = 0;
    std::size_t second = none;
    std::size_t source_block = 0;  // 0-based

    auto key() const { return std::tie(first, second, source_block, coefficient); }
    friend bool operator==(const PrimitiveTerm& a, const PrimitiveTerm& b) { return a.key() == b.key(); }
};

/// Enumerates the polynomial-produced primitive terms of the generator under a
/// verified partition: monomials of B_i (first order), and the monomials of
/// L_ik P_jk, P_ik L_jk and P_ik P_jk for the second-order terms, where
/// sigma_ik = L_ik + P_ik splits into own-block affine part and earlier-block part.
inline std::vector<PrimitiveTerm> polynomial_produced_terms(const SdeModel& model, const OrderedPartition& partition) {
    if (auto check = verify_partition(model, partition); !check)
        throw Error("partition is not block-triangular affine: " + check.diagnostic);
    const std::size_t n = model.dim();
    const auto block_of = partition.block_of(n);
    std::vector<PrimitiveTerm> out;
    auto push = [&](const Polynomial& poly, std::size_t i, std::size_t j, std::size_t src) {
        for (const auto& [m, c] : poly.terms()) {
            PrimitiveTerm t{m, i, j, src};
            if (t.second != PrimitiveTerm::none && t.second < t.first) std::swap(t.first, t.second);
            if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        auto split = detail::split_by_block(model.drift[i], block_of[i], block_of);
        push(split.remainder, i, PrimitiveTerm::none, block_of[i]);
    }
    for (std::size_t k = 0; k < model.brownian_dim; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            auto si = detail::split_by_block(model.diffusion[i][k], block_of[i], block_of);
            for (std::size_t j = i; j < n; ++j) {
                auto sj = detail::split_by_block(model.diffusion[j][k], block_of[j], block_of);
                push(si.linear * sj.remainder, i, j, block_of[j]);
                push(si.remainder * sj.linear, i, j, block_of[i]);
                push(si.remainder * sj.remainder, i, j, std::max(block_of[i], block_of[j]));
            }
        }
    }
    return out;
}

struct BlockWeights {
    OrderedPartition partition;
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> C;  // (p, q), q < p, 0-based
    std::vector<std::uint64_t> W;

    std::uint64_t c(std::size_t p, std::size_t q) const {
        auto it = C.find({p, q});
        return it == C.end() ? 0 : it->second;
    }
};

/// C_{p,q} is the largest block-q degree among coefficient monomials of
/// primitive terms with source block p; W_1 = 1 and W_p = 1 + sum_{q<p} C_{p,q} W_q.
inline BlockWeights compute_block_weights(const SdeModel& model, const OrderedPartition& partition) {
    const auto terms = polynomial_produced_terms(model, partition);
    const auto block_of = partition.block_of(model.dim());
    BlockWeights bw;
    bw.partition = partition;
    const std::size_t r = partition.size();
    for (std::size_t p = 1; p < r; ++p)
        for (std::size_t q = 0; q < p; ++q) bw.C[{p, q}] = 0;
    for (const auto& t : terms) {
        std::vector<std::uint64_t> deg(r, 0);
        for (std::size_t v = 0; v < model.dim(); ++v) deg[block_of[v]] += t.coefficient[v];
        for (std::size_t q = 0; q < t.source_block; ++q) {
            auto& cpq = bw.C[{t.source_block, q}];
            cpq = std::max(cpq, deg[q]);
        }
    }
    bw.W.assign(r, 1);
    for (std::size_t p = 1; p < r; ++p) {
        std::uint64_t w = 1;
        for (std::size_t q = 0; q < p; ++q) w += bw.c(p, q) * bw.W[q];
        bw.W[p] = w;
    }
    return bw;
}

/// s_p(beta) for every block.
inline std::vector<std::uint64_t> block_sums(const OrderedPartition& partition, const Monomial& beta) {
    std::vector<std::uint64_t> s(partition.size(), 0);
    for (std::size_t p = 0; p < partition.size(); ++p)
        for (auto v : partition.blocks[p]) s[p] += beta[v];
    return s;
}

inline std::uint64_t weighted_degree(const BlockWeights& bw, const Monomial& beta) {
    const auto s = block_sums(bw.partition, beta);
    std::uint64_t d = 0;
    for (std::size_t p = 0; p < s.size(); ++p) d += bw.W[p] * s[p];
    return d;
}

struct ClosureCertificate {
    bool ok = true;
    std::optional<std::string> violation;
    std::uint64_t target_weighted_degree = 0;     // max over the system's targets
    std::uint64_t max_weighted_degree = 0;        // max over all indices
    std::vector<std::uint64_t> block_bounds;      // floor(deg_W(alpha) / W_p)
    std::uint64_t c0 = 0;                         // |beta| <= c0 * |alpha|
    BigInt combinatorial_bound;                   // binom(n + c0|alpha|, c0|alpha|)
    BigInt weighted_count;                        // #{beta : deg_W(beta) <= deg_W(alpha)}
    std::size_t checked_transitions = 0;
};

/// Counts multi-indices with sum_i w_i beta_i <= budget (beta = 0 included).
inline BigInt count_weighted_monomials(const std::vector<std::uint64_t>& weights, std::uint64_t budget) {
    std::vector<BigInt> ways(budget + 1, 0);
    ways[0] = 1;
    for (auto w : weights)
        for (std::uint64_t d = w; d <= budget; ++d) ways[d] += ways[d - w];
    BigInt total = 0;
    for (const auto& x : ways) total += x;
    return total;
}

/// Runtime check that the weighted block degree never increases along the
/// generator transitions of a constructed closure. A violation means the
/// weights or the closure are wrong, so it is reported loudly.
inline ClosureCertificate certify_closure(const SdeModel& model, const OrderedPartition& partition,
                                          const MomentSystem& ms, std::size_t target_count = 1) {
    const BlockWeights bw = compute_block_weights(model, partition);
    const Generator gen(model);
    ClosureCertificate cert;
    std::uint64_t target_abs = 0;
    for (std::size_t t = 0; t < std::min(target_count, ms.size()); ++t) {
        cert.target_weighted_degree = std::max(cert.target_weighted_degree, weighted_degree(bw, ms.indices[t]));
        target_abs = std::max(target_abs, ms.indices[t].degree());
    }
    for (const auto& beta : ms.indices) {
        const auto db = weighted_degree(bw, beta);
        cert.max_weighted_degree = std::max(cert.max_weighted_degree, db);
        for (const auto& [gamma, c] : gen.apply(beta).linear_part) {
            ++cert.checked_transitions;
            if (weighted_degree(bw, gamma) > db && !cert.violation) {
                cert.ok = false;
                cert.violation = "deg_W increases from " + beta.to_tuple() + " (" + std::to_string(db) + ") to " +
                                 gamma.to_tuple() + " (" + std::to_string(weighted_degree(bw, gamma)) + ")";
            }
        }
    }
    for (auto w : bw.W) cert.block_bounds.push_back(cert.target_weighted_degree / w);
    for (const auto& beta : ms.indices) {
        const auto s = block_sums(partition, beta);
        for (std::size_t p = 0; p < s.size(); ++p)
            if (s[p] > cert.block_bounds[p] && !cert.violation) {
                cert.ok = false;
                cert.violation = "block sum bound violated at " + beta.to_tuple();
            }
    }
    if (cert.max_weighted_degree > cert.target_weighted_degree && !cert.violation) {
        cert.ok = false;
        cert.violation = "an index exceeds the target weighted degree";
    }
    // c0 = ceil(W_max * sum_p 1/W_p)
    const std::uint64_t wmax = *std::max_element(bw.W.begin(), bw.W.end());
    Rational c0 = 0;
    for (auto w : bw.W) {
        Rational term(static_cast<unsigned long>(wmax), static_cast<unsigned long>(w));
        term.canonicalize();
        c0 += term;
    }
    BigInt ceil_c0;
    mpz_cdiv_q(ceil_c0.get_mpz_t(), c0.get_num_mpz_t(), c0.get_den_mpz_t());
    cert.c0 = ceil_c0.get_ui();
    const std::uint64_t top = cert.c0 * target_abs;
    mpz_bin_uiui(cert.combinatorial_bound.get_mpz_t(), model.dim() + top, top);
    std::vector<std::uint64_t> var_weights(model.dim());
    const auto block_of = partition.block_of(model.dim());
    for (std::size_t v = 0; v < model.dim(); ++v) var_weights[v] = bw.W[block_of[v]];
    cert.weighted_count = count_weighted_monomials(var_weights, cert.target_weighted_degree);
    return cert;
}

}  // namespace sdem
