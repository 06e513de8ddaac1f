#pragma once
// Small directed-graph utilities: Tarjan SCCs and a deterministic
// topological order of the condensation.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <vector>

namespace sdem {

using Adjacency = std::vector<std::vector<std::size_t>>;

struct SccResult {
    std::vector<std::size_t> component_of;           // node -> component id
    std::vector<std::vector<std::size_t>> components; // sorted node lists
};

/// Tarjan's algorithm, iterative so that large moment matrices cannot overflow the stack.
inline SccResult strongly_connected_components(const Adjacency& adj) {
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    const std::size_t n = adj.size();
    std::vector<std::size_t> index(n, unset), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    SccResult res;
    res.component_of.assign(n, unset);
    std::size_t counter = 0;

    struct Frame {
        std::size_t node;
        std::size_t next_edge;
    };
    std::vector<Frame> call;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unset) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            const std::size_t v = f.node;
            if (f.next_edge < adj[v].size()) {
                const std::size_t w = adj[v][f.next_edge++];
                if (index[w] == unset) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    res.component_of[w] = res.components.size();
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                res.components.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                const std::size_t parent = call.back().node;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return res;
}

/// Components in a topological order of the condensation (an edge u -> v puts
/// comp(u) first). Ties go to the component holding the smallest node index.
inline std::vector<std::size_t> condensation_order(const SccResult& scc, const Adjacency& adj) {
    const std::size_t k = scc.components.size();
    std::vector<std::set<std::size_t>> succ(k);
    std::vector<std::size_t> indegree(k, 0);
    for (std::size_t u = 0; u < adj.size(); ++u)
        for (std::size_t v : adj[u]) {
            const auto cu = scc.component_of[u], cv = scc.component_of[v];
            if (cu != cv && succ[cu].insert(cv).second) ++indegree[cv];
        }
    using Key = std::pair<std::size_t, std::size_t>;  // (smallest node, component)
    std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
    for (std::size_t c = 0; c < k; ++c)
        if (indegree[c] == 0) ready.emplace(scc.components[c].front(), c);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto [_, c] = ready.top();
        ready.pop();
        order.push_back(c);
        for (std::size_t d : succ[c])
            if (--indegree[d] == 0) ready.emplace(scc.components[d].front(), d);
    }
    return order;
}

}  // namespace sdem
