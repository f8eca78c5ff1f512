#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "confair/model.hpp"
#include "confair/rational.hpp"

namespace confair {

// Per-agent maximin share and a witnessing feasible partition each.
struct MmsProfile {
    std::vector<Rational> mu;
    std::vector<Allocation> partitions;  // partitions[i] is an MMS partition for agent i
    bool infeasible = false;
};

// Directed envy relation: edge i -> i' iff v_i(A_i) < v_i(A_{i'}).
struct EnvyGraph {
    int n_agents = 0;
    std::vector<std::pair<int, int>> envy_edges;

    bool has_edge(int from, int to) const {
        for (auto [a, b] : envy_edges)
            if (a == from && b == to) return true;
        return false;
    }
};

// v_i(A_i) >= v_i(A_{i'}) - max_{j in A_{i'}} v_ij for all i, i' with A_{i'}
// nonempty. Works on partial allocations.
inline bool is_ef1(const Instance& inst, const Allocation& alloc) {
    int n = inst.n_agents;
    std::vector<Rational> own(n);
    for (int i = 0; i < n; ++i) own[i] = inst.bundle_value(i, alloc.bundles[i]);
    for (int i = 0; i < n; ++i)
        for (int o = 0; o < n; ++o) {
            if (o == i || alloc.bundles[o].empty()) continue;
            Rational other = 0, best = 0;
            for (int j : alloc.bundles[o]) {
                other += inst.value(i, j);
                if (inst.value(i, j) > best) best = inst.value(i, j);
            }
            if (own[i] < other - best) return false;
        }
    return true;
}

// min_i v_i(A_i) / (v_i(M)/n); agents with v_i(M) = 0 contribute 1.
inline Rational prop_ratio(const Instance& inst, const Allocation& alloc) {
    Rational worst = -1;
    for (int i = 0; i < inst.n_agents; ++i) {
        Rational total = inst.total_value(i);
        Rational r = total == 0
                         ? Rational(1)
                         : inst.bundle_value(i, alloc.bundles[i]) * inst.n_agents / total;
        if (worst < 0 || r < worst) worst = r;
    }
    return worst;
}

// Nash welfare with the lexicographic zero convention: the number of agents
// with positive bundle value, then the product of the positive values.
struct NashWelfare {
    int count_positive = 0;
    Rational product = 1;  // empty product

    bool operator>(const NashWelfare& o) const {
        if (count_positive != o.count_positive) return count_positive > o.count_positive;
        return product > o.product;
    }
    bool operator==(const NashWelfare& o) const {
        return count_positive == o.count_positive && product == o.product;
    }
};

inline NashWelfare nash_welfare(const Instance& inst, const Allocation& alloc) {
    NashWelfare nw;
    for (int i = 0; i < inst.n_agents; ++i) {
        Rational v = inst.bundle_value(i, alloc.bundles[i]);
        if (v > 0) {
            ++nw.count_positive;
            nw.product *= v;
        }
    }
    return nw;
}

// min_i v_i(A_i)/mu_i; agents with mu_i = 0 contribute 1 (vacuously met).
inline Rational alpha_mms(const Instance& inst, const Allocation& alloc,
                          const MmsProfile& mms) {
    Rational worst = -1;
    for (int i = 0; i < inst.n_agents; ++i) {
        Rational r = mms.mu[i] == 0
                         ? Rational(1)
                         : inst.bundle_value(i, alloc.bundles[i]) / mms.mu[i];
        if (worst < 0 || r < worst) worst = r;
    }
    return worst;
}

// Everything the checkers can say about one allocation.
struct FairnessReport {
    bool ef1 = false;
    Rational prop_ratio = 0;
    NashWelfare nash;
    std::optional<Rational> mms_ratio;  // only when an MmsProfile was supplied
};

inline FairnessReport fairness_report(const Instance& inst, const Allocation& alloc,
                                      const MmsProfile* mms = nullptr) {
    FairnessReport rep;
    rep.ef1 = is_ef1(inst, alloc);
    rep.prop_ratio = prop_ratio(inst, alloc);
    rep.nash = nash_welfare(inst, alloc);
    if (mms) rep.mms_ratio = alpha_mms(inst, alloc, *mms);
    return rep;
}

inline EnvyGraph envy_graph(const Instance& inst, const Allocation& alloc) {
    EnvyGraph g;
    g.n_agents = inst.n_agents;
    std::vector<Rational> own(inst.n_agents);
    for (int i = 0; i < inst.n_agents; ++i) own[i] = inst.bundle_value(i, alloc.bundles[i]);
    for (int i = 0; i < inst.n_agents; ++i)
        for (int o = 0; o < inst.n_agents; ++o)
            if (o != i && own[i] < inst.bundle_value(i, alloc.bundles[o]))
                g.envy_edges.emplace_back(i, o);
    return g;
}

namespace detail {

inline bool envy_cycle_dfs(int v, const std::vector<std::vector<int>>& adj,
                           std::vector<int>& state, std::vector<int>& path,
                           std::vector<int>& cycle) {
    state[v] = 1;
    path.push_back(v);
    for (int u : adj[v]) {
        if (state[u] == 1) {
            auto it = std::find(path.begin(), path.end(), u);
            cycle.assign(it, path.end());
            return true;
        }
        if (state[u] == 0 && envy_cycle_dfs(u, adj, state, path, cycle)) return true;
    }
    state[v] = 2;
    path.pop_back();
    return false;
}

inline std::optional<std::vector<int>> find_envy_cycle(const EnvyGraph& g) {
    int n = g.n_agents;
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : g.envy_edges) adj[a].push_back(b);
    std::vector<int> state(n, 0), path, cycle;
    for (int s = 0; s < n; ++s)
        if (state[s] == 0 && envy_cycle_dfs(s, adj, state, path, cycle)) return cycle;
    return std::nullopt;
}

}  // namespace detail

// Rotates bundles along envy cycles until the envy graph is acyclic (Lipton
// et al.): every agent on a cycle takes the bundle of the agent it envies, so
// all of them strictly gain and unenvious agents keep their bundles.
inline Allocation decycle(const Instance& inst, const Allocation& alloc) {
    Allocation cur = alloc;
    while (true) {
        EnvyGraph g = envy_graph(inst, cur);
        auto cycle = detail::find_envy_cycle(g);
        if (!cycle) return cur;
        Allocation next = cur;
        int len = static_cast<int>(cycle->size());
        for (int t = 0; t < len; ++t)
            next.bundles[(*cycle)[t]] = cur.bundles[(*cycle)[(t + 1) % len]];
        // each rotation strictly raises utilitarian welfare, so this terminates
        cur = std::move(next);
    }
}

// Lexicographically smallest topological order of the envy graph with every
// envy edge pointing forward: no agent envies an earlier agent.
inline std::vector<int> envy_topological_order(const EnvyGraph& g) {
    int n = g.n_agents;
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : g.envy_edges) {
        adj[a].push_back(b);
        ++indegree[b];
    }
    std::vector<int> order;
    std::vector<bool> done(n, false);
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        for (int v = 0; v < n; ++v)
            if (!done[v] && indegree[v] == 0) { pick = v; break; }
        if (pick < 0) throw std::logic_error("envy graph has a cycle; decycle first");
        done[pick] = true;
        order.push_back(pick);
        for (int u : adj[pick]) --indegree[u];
    }
    return order;
}

}  // namespace confair
