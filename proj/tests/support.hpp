#pragma once

// Shared fixtures and brute-force oracles for the test suites. The oracles
// enumerate allocations exhaustively and stay independent of the search code
// they are used to check.

#include <functional>
#include <vector>

#include "confair/criteria.hpp"
#include "confair/graph.hpp"
#include "confair/model.hpp"
#include "confair/rng.hpp"

namespace confair::testing {

inline Instance make(int n, int m, const std::vector<std::vector<long>>& values,
                     std::vector<std::pair<int, int>> edges) {
    std::vector<std::vector<Rational>> vals;
    for (const auto& row : values) {
        vals.emplace_back();
        for (long v : row) vals.back().emplace_back(v);
    }
    return validate_instance(n, m, std::move(vals), std::move(edges));
}

// P3 on items 0-1-2 with the two-agent valuations where MNW is not EF1.
inline Instance fig2_p3() {
    return make(2, 3, {{2, 2, 3}, {6, 5, 6}}, {{0, 1}, {1, 2}});
}

// Complement of P3: a single edge (0,1), right-hand valuation table.
inline Instance fig2_p3_complement() {
    return make(2, 3, {{2, 1, 3}, {6, 5, 6}}, {{0, 1}});
}

inline std::vector<std::pair<int, int>> k33_edges() {
    std::vector<std::pair<int, int>> e;
    for (int a = 0; a < 3; ++a)
        for (int b = 3; b < 6; ++b) e.emplace_back(a, b);
    return e;
}

// K_{3,3}, 4 agents, items 0..2 worth 2 and 3..5 worth 3 to everyone; the
// smallest instance with n > Delta(G) and no EF1 allocation.
inline Instance example2_k33() {
    std::vector<std::vector<long>> vals(4, {2, 2, 2, 3, 3, 3});
    return make(4, 6, vals, k33_edges());
}

// K_{4,4}, 5 agents, values 2 and 2n-5 = 5; no EF1 allocation.
inline Instance k44_no_ef1() {
    std::vector<std::pair<int, int>> e;
    for (int a = 0; a < 4; ++a)
        for (int b = 4; b < 8; ++b) e.emplace_back(a, b);
    std::vector<std::vector<long>> vals(5, {5, 5, 5, 5, 2, 2, 2, 2});
    return make(5, 8, vals, e);
}

// C4 with weights (5,3,5,3); the submodularity counterexample graph.
inline Instance example5_c4() {
    return make(1, 4, {{5, 3, 5, 3}}, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
}

// Calls fn for every feasible complete allocation.
inline void enumerate_feasible(const Instance& inst,
                               const std::function<void(const Allocation&)>& fn) {
    std::vector<ItemMask> masks(inst.n_agents, 0);
    std::vector<int> owner(inst.n_items, -1);
    std::function<void(int)> rec = [&](int j) {
        if (j == inst.n_items) {
            Allocation a = Allocation::empty(inst.n_agents);
            for (int t = 0; t < inst.n_items; ++t) a.bundles[owner[t]].push_back(t);
            fn(a);
            return;
        }
        for (int i = 0; i < inst.n_agents; ++i) {
            if (masks[i] & inst.conflicts[j]) continue;
            masks[i] |= ItemMask{1} << j;
            owner[j] = i;
            rec(j + 1);
            masks[i] &= ~(ItemMask{1} << j);
        }
    };
    rec(0);
}

// mu_i by full enumeration.
inline Rational brute_mms(const Instance& inst, int agent) {
    Rational best = -1;
    enumerate_feasible(inst, [&](const Allocation& a) {
        Rational worst = -1;
        for (const auto& b : a.bundles) {
            Rational v = inst.bundle_value(agent, b);
            if (worst < 0 || v < worst) worst = v;
        }
        if (worst > best) best = worst;
    });
    return best;
}

// Maximum-weight independent set weight by subset enumeration.
inline Rational brute_mwis(const Instance& inst, const std::vector<Rational>& weights,
                           ItemMask subset) {
    Rational best = 0;
    for (ItemMask s = 0;; s = (s - subset) & subset) {
        if (inst.independent(s)) {
            Rational w = 0;
            for (int j = 0; j < inst.n_items; ++j)
                if (s >> j & 1) w += weights[j];
            if (w > best) best = w;
        }
        if (s == subset) break;
    }
    return best;
}

// Small random instance for property tests: integer values in [0, hi].
inline Instance random_instance(Rng& rng, int n, int m, double edge_prob, long hi = 20) {
    std::vector<std::vector<long>> vals(n, std::vector<long>(m));
    for (auto& row : vals)
        for (auto& v : row) v = static_cast<long>(rng.uniform_index(hi + 1));
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            if (rng.bernoulli(edge_prob)) edges.emplace_back(a, b);
    return make(n, m, vals, edges);
}

// Random instance regenerated until n > Delta(G).
inline Instance random_low_degree_instance(Rng& rng, int n, int m, double edge_prob,
                                           long hi = 20) {
    while (true) {
        Instance inst = random_instance(rng, n, m, edge_prob, hi);
        if (inst.max_degree() < n) return inst;
    }
}

}  // namespace confair::testing
