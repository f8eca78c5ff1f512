#pragma once

// Polynomial-time allocation procedures: randomized coloring with symmetry
// breaking, bag filling over feasible sources, the high-value item reduction,
// the polynomial alpha-MMS algorithm (with a bipartite specialization), and
// the two EF1 constructions for restricted graph classes.

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "confair/criteria.hpp"
#include "confair/graph.hpp"
#include "confair/model.hpp"
#include "confair/rng.hpp"

namespace confair {

// One run of the randomized procedure, kept for inspection: the random item
// order, the tentative owners, and which items survived deallocation.
struct TrialTrace {
    std::vector<int> permutation;   // permutation[r] = item drawn at rank r
    std::vector<int> tentative;     // tentative[j] = random owner of item j
    std::vector<bool> survivors;    // survivors[j] = kept after deallocation
};

// Random permutation, random tentative owners, then for every pair of
// conflicting items with the same tentative owner drop the one ranked later.
// Deallocations are judged on the tentative assignment only, so their order
// is irrelevant. Completion is deterministic (lowest-index rule).
inline std::pair<Allocation, TrialTrace> randomized_allocation(const Instance& inst,
                                                               std::uint64_t seed) {
    if (inst.n_agents <= inst.max_degree())
        throw PreconditionViolated("randomized_allocation requires n > Delta(G)");
    Rng rng(seed);
    TrialTrace trace;
    trace.permutation.resize(inst.n_items);
    for (int j = 0; j < inst.n_items; ++j) trace.permutation[j] = j;
    rng.shuffle(trace.permutation);
    std::vector<int> rank(inst.n_items);
    for (int r = 0; r < inst.n_items; ++r) rank[trace.permutation[r]] = r;

    trace.tentative.resize(inst.n_items);
    for (int j = 0; j < inst.n_items; ++j)
        trace.tentative[j] = static_cast<int>(rng.uniform_index(inst.n_agents));

    trace.survivors.assign(inst.n_items, true);
    for (auto [a, b] : inst.edges) {
        if (trace.tentative[a] != trace.tentative[b]) continue;
        trace.survivors[rank[a] < rank[b] ? b : a] = false;
    }

    Allocation partial = Allocation::empty(inst.n_agents);
    for (int j = 0; j < inst.n_items; ++j)
        if (trace.survivors[j]) partial.bundles[trace.tentative[j]].push_back(j);
    return {complete_partial(inst, partial), std::move(trace)};
}

// Guaranteed proportionality fraction for identical valuations into [0,1]:
// 1 - 1/e - c n sqrt(ln n / W), valid for any c > sqrt(8). Analysis-only;
// the single floating-point surface in the library.
inline double randprop_lower_bound(int n, double total_weight, double c) {
    if (n < 1) throw PreconditionViolated("need n >= 1");
    if (!(total_weight > 0)) throw PreconditionViolated("need W > 0");
    if (!(c > std::sqrt(8.0))) throw PreconditionViolated("need c > sqrt(8)");
    return 1.0 - 1.0 / std::exp(1.0) - c * n * std::sqrt(std::log(n) / total_weight);
}

// Input to bag filling: disjoint feasible source sets, the participating
// agents, and a positive limit per agent. The assignment policy is ascending
// agent index with one agent optionally moved last (used by the MMS proofs
// to protect the partition owner).
struct BagFillingInput {
    std::vector<int> agents;       // participating agent indices
    std::vector<ItemSet> sources;  // pairwise disjoint, each independent in G
    std::vector<Rational> limits;  // parallel to agents, all > 0
    int protected_last = -1;       // agent index moved last in tie-breaks
    int value_order_agent = -1;    // if >= 0, fill by this agent's value, descending
};

struct BagFillingResult {
    std::vector<std::pair<int, ItemSet>> assigned;  // (agent, bundle)
    std::vector<ItemSet> leftovers;                 // per source, unused items

    ItemSet bundle_of(int agent) const {
        for (const auto& [a, b] : assigned)
            if (a == agent) return b;
        return {};
    }
};

// Repeatedly: take the lowest-index source worth >= x_i to some remaining
// agent, fill a bag item by item until a remaining agent's limit is met, give
// the bag to the first such agent in policy order. Stops when no source
// qualifies; some agents may stay unserved (the caller checks the totality
// precondition).
inline BagFillingResult bag_filling(const Instance& inst, const BagFillingInput& in) {
    if (in.agents.size() != in.limits.size())
        throw PreconditionViolated("one limit per agent required");
    for (const auto& x : in.limits)
        if (x <= 0) throw PreconditionViolated("limits must be positive");
    ItemMask seen = 0;
    for (const auto& src : in.sources) {
        ItemMask m = mask_of(src);
        if (m & seen) throw PreconditionViolated("sources must be disjoint");
        if (!inst.independent(m)) throw PreconditionViolated("sources must be independent");
        seen |= m;
    }

    std::vector<int> order = in.agents;  // policy order for recipients
    std::sort(order.begin(), order.end());
    if (in.protected_last >= 0) {
        auto it = std::find(order.begin(), order.end(), in.protected_last);
        if (it != order.end()) {
            order.erase(it);
            order.push_back(in.protected_last);
        }
    }
    std::vector<Rational> limit_of(inst.n_agents);
    for (std::size_t t = 0; t < in.agents.size(); ++t) limit_of[in.agents[t]] = in.limits[t];

    BagFillingResult res;
    res.leftovers = in.sources;
    for (auto& src : res.leftovers) {
        std::sort(src.begin(), src.end());
        if (in.value_order_agent >= 0) {
            int va = in.value_order_agent;
            std::stable_sort(src.begin(), src.end(), [&](int a, int b) {
                return inst.value(va, a) > inst.value(va, b);
            });
        }
    }

    while (!order.empty()) {
        // lowest-index source still worth a full limit to someone remaining
        int k = -1;
        for (std::size_t s = 0; s < res.leftovers.size() && k < 0; ++s)
            for (int i : order)
                if (inst.bundle_value(i, res.leftovers[s]) >= limit_of[i]) {
                    k = static_cast<int>(s);
                    break;
                }
        if (k < 0) break;

        ItemSet bag;
        int winner = -1;
        ItemSet& src = res.leftovers[k];
        while (winner < 0) {
            bag.push_back(src.front());
            src.erase(src.begin());
            for (int i : order)
                if (inst.bundle_value(i, bag) >= limit_of[i]) {
                    winner = i;
                    break;
                }
        }
        std::sort(bag.begin(), bag.end());
        res.assigned.emplace_back(winner, std::move(bag));
        order.erase(std::find(order.begin(), order.end(), winner));
    }
    for (auto& src : res.leftovers) std::sort(src.begin(), src.end());
    return res;
}

// Outcome of the high-value reduction: matched (agent, item) pairs, the
// surviving agents and items, and the instance with surviving agents rescaled
// to v_i(M') = |N'|.
struct ReduceResult {
    std::vector<std::pair<int, int>> matched;  // (agent, item)
    std::vector<int> agents;                   // remaining agents
    ItemMask items = 0;                        // remaining items
    Instance scaled;                           // remaining rows rescaled
};

// Greedy maximal matching of single items worth at least alpha: scan items
// ascending, give each qualifying item to the lowest-index remaining agent
// valuing it at >= alpha, rescale the remaining agents, restart the scan.
// Expects valuations already normalized to v_i(M) = n for agents with
// positive total value; zero-total agents never match and stay unscaled.
inline ReduceResult reduce_high_value(const Instance& inst, const Rational& alpha) {
    if (inst.n_agents <= inst.max_degree())
        throw PreconditionViolated("reduce_high_value requires n > Delta(G)");
    ReduceResult res;
    res.scaled = inst;
    res.items = full_mask(inst.n_items);
    std::vector<bool> active(inst.n_agents, true);
    int n_active = inst.n_agents;

    bool changed = true;
    while (changed) {
        changed = false;
        for (int j = 0; j < inst.n_items && !changed; ++j) {
            if (!(res.items >> j & 1)) continue;
            for (int i = 0; i < inst.n_agents; ++i) {
                if (!active[i] || res.scaled.value(i, j) < alpha) continue;
                res.matched.emplace_back(i, j);
                active[i] = false;
                --n_active;
                res.items &= ~(ItemMask{1} << j);
                for (int o = 0; o < inst.n_agents; ++o) {
                    if (!active[o]) continue;
                    Rational rem = res.scaled.bundle_value(o, res.items);
                    if (rem > 0)
                        for (int t = 0; t < inst.n_items; ++t)
                            res.scaled.valuations[o][t] *= Rational(n_active) / rem;
                }
                changed = true;
                break;
            }
        }
    }
    for (int i = 0; i < inst.n_agents; ++i)
        if (active[i]) res.agents.push_back(i);
    return res;
}

struct MmsApproxResult {
    Rational alpha;
    Allocation alloc;
};

namespace detail {

// Guarantee of the polynomial algorithm: 1/2 for bipartite conflict graphs
// (which covers Delta <= 1), 3/7 for Delta = 2, 2/(Delta+2) above.
inline Rational poly_alpha(int delta, bool bipartite) {
    if (bipartite || delta <= 1) return Rational(1, 2);
    if (delta == 2) return Rational(3, 7);
    return Rational(2, delta + 2);
}

}  // namespace detail

// Polynomial-time alpha-approximate MMS allocation for n > Delta(G): scale
// to v_i(M) = n, strip high-value items via reduce_high_value, then serve the
// rest by bag filling on a cheap coloring (a 2-coloring when bipartite, a
// Delta- or (Delta+1)-coloring otherwise, with a one-item repair bundle when
// some component blocks the Delta-coloring), and complete. Never computes an
// exact chromatic number or an exact maximin share.
inline MmsApproxResult mms_approx_poly(const Instance& inst) {
    int delta = inst.max_degree();
    if (inst.n_agents <= delta)
        throw PreconditionViolated("mms_approx_poly requires n > Delta(G)");
    bool bipartite = is_bipartite(inst);
    Rational alpha = detail::poly_alpha(delta, bipartite);

    // step 1: per-agent normalization v_i(M) = n (zero-total agents excluded)
    std::vector<Rational> factors(inst.n_agents, 1);
    for (int i = 0; i < inst.n_agents; ++i) {
        Rational total = inst.total_value(i);
        if (total > 0) factors[i] = Rational(inst.n_agents) / total;
    }
    Instance work = scale_valuations(inst, factors);

    // step 2
    ReduceResult red = reduce_high_value(work, alpha);
    Allocation partial = Allocation::empty(inst.n_agents);
    for (auto [i, j] : red.matched) partial.bundles[i].push_back(j);

    // agents with no remaining value have mu = 0 and are served trivially
    std::vector<int> hungry;
    for (int i : red.agents)
        if (red.scaled.bundle_value(i, red.items) > 0) hungry.push_back(i);

    const Instance& cur = red.scaled;
    ItemMask rest = red.items;
    auto fill_with = [&](const std::vector<ItemSet>& sources, int protect) {
        BagFillingInput in;
        in.agents = hungry;
        in.limits.assign(hungry.size(), alpha);
        in.sources = sources;
        in.protected_last = protect;
        BagFillingResult out = bag_filling(cur, in);
        for (const auto& [i, b] : out.assigned)
            for (int j : b) partial.bundles[i].push_back(j);
    };

    if (hungry.size() == 1) {
        // step 3a: one agent left; an approximate MWIS beats every bound here
        int i = hungry.front();
        std::vector<Rational> w(inst.n_items, 0);
        for (int j = 0; j < inst.n_items; ++j)
            if (rest >> j & 1) w[j] = cur.value(i, j);
        WeightedIsResult s = mwis_approx(cur, w, rest);
        for (int j : s.set) partial.bundles[i].push_back(j);
    } else if (hungry.size() >= 2) {
        if (bipartite) {
            // 2-coloring replaces the Delta-coloring throughout
            Coloring col = bipartite_2coloring(cur, rest);
            fill_with(col.classes(), -1);
        } else {
            auto offenders = delta_coloring_offenders(cur, rest, delta);
            if (offenders.empty()) {
                // step 3b
                fill_with(delta_coloring(cur, rest, delta).classes(), -1);
            } else if (delta >= static_cast<int>(hungry.size())) {
                // step 3c: repair bundle of one item per blocking component
                int i = hungry.front();
                ItemSet repair;
                for (const auto& comp : offenders) {
                    int pick = comp.front();
                    for (int j : comp)
                        if (cur.value(i, j) < cur.value(i, pick)) pick = j;
                    repair.push_back(pick);
                }
                ItemMask rem = rest & ~mask_of(repair);
                Instance adj = cur;
                Rational keep = adj.bundle_value(i, rem);
                Rational whole = adj.bundle_value(i, rest);
                int n_h = static_cast<int>(hungry.size());
                Rational c = keep > 0 ? Rational(n_h) / keep : Rational(0);
                if (c > 0 && c * whole > n_h + 1) c = Rational(n_h + 1) / whole;
                if (c > 0)
                    for (int t = 0; t < adj.n_items; ++t) adj.valuations[i][t] *= c;
                std::vector<ItemSet> sources{repair};
                for (auto& cls : delta_coloring(adj, rem, delta).classes())
                    sources.push_back(std::move(cls));
                BagFillingInput in;
                in.agents = hungry;
                in.limits.assign(hungry.size(), alpha);
                in.sources = sources;
                in.protected_last = i;
                BagFillingResult out = bag_filling(adj, in);
                for (const auto& [a, b] : out.assigned)
                    for (int j : b) partial.bundles[a].push_back(j);
            } else {
                // step 3d: greedy (Delta+1)-coloring of the remaining items
                Coloring col;
                col.color_of.assign(cur.n_items, -1);
                detail::greedy_color_order(cur, set_of(rest, cur.n_items), col.color_of);
                int k = 0;
                for (int j = 0; j < cur.n_items; ++j) k = std::max(k, col.color_of[j] + 1);
                col.k = k;
                fill_with(col.classes(), -1);
            }
        }
    }

    // step 4
    MmsApproxResult res;
    res.alpha = alpha;
    res.alloc = complete_partial(inst, partial);
    return res;
}

// EF1 allocation for binary valuations on a union of paths, n > 2. Items no
// one values are set aside and placed by the completion rule at the end; the
// rest are walked path by path, each item going to the first agent in the
// current envy order that values it (with the two fallback rules when only
// the previous recipient does), decycling after every step.
inline Allocation path_ef1(const Instance& inst) {
    if (inst.n_agents <= 2) throw PreconditionViolated("path_ef1 requires n > 2");
    for (int i = 0; i < inst.n_agents; ++i)
        for (int j = 0; j < inst.n_items; ++j)
            if (inst.value(i, j) != 0 && inst.value(i, j) != 1)
                throw PreconditionViolated("path_ef1 requires binary valuations");
    for (int j = 0; j < inst.n_items; ++j)
        if (inst.degree(j) > 2)
            throw PreconditionViolated("path_ef1 requires components to be paths");
    {
        auto off = delta_coloring_offenders(inst, full_mask(inst.n_items), 2);
        if (!off.empty())  // a 2-regular component is a cycle, not a path
            throw PreconditionViolated("path_ef1 requires components to be paths");
        for (ItemMask comp : detail::component_masks(inst, full_mask(inst.n_items))) {
            int verts = popcount(comp), edges = 0;
            for (auto [a, b] : inst.edges)
                if (comp >> a & 1 && comp >> b & 1) ++edges;
            if (edges >= verts)
                throw PreconditionViolated("path_ef1 requires components to be paths");
        }
    }

    ItemMask wanted = 0;
    for (int j = 0; j < inst.n_items; ++j)
        for (int i = 0; i < inst.n_agents; ++i)
            if (inst.value(i, j) == 1) {
                wanted |= ItemMask{1} << j;
                break;
            }

    Allocation alloc = Allocation::empty(inst.n_agents);
    auto place = [&](int item, int agent) {
        alloc.bundles[agent].push_back(item);
        alloc.normalize();
        alloc = decycle(inst, alloc);
    };

    for (ItemMask comp : detail::component_masks(inst, wanted)) {
        // walk from the lowest-index endpoint (or the lone vertex)
        std::vector<int> walk;
        int start = -1;
        for (int v = 0; v < inst.n_items && start < 0; ++v)
            if ((comp >> v & 1) && popcount(inst.conflicts[v] & comp) <= 1) start = v;
        int prev = -1, v = start;
        while (v >= 0) {
            walk.push_back(v);
            ItemMask nb = inst.conflicts[v] & comp;
            int nxt = -1;
            for (int u = 0; u < inst.n_items; ++u)
                if ((nb >> u & 1) && u != prev) nxt = u;
            prev = v;
            v = nxt;
        }

        int last_agent = -1;  // recipient of the last allocated item in walk
        for (std::size_t pos = 0; pos < walk.size(); ++pos) {
            int j = walk[pos];
            std::vector<int> order = envy_topological_order(envy_graph(inst, alloc));
            int first_wanting = -1;
            for (int a : order)
                if (a != last_agent && inst.value(a, j) == 1) {
                    first_wanting = a;
                    break;
                }
            if (first_wanting >= 0) {
                place(j, first_wanting);
                last_agent = first_wanting;
            } else if (pos + 1 == walk.size()) {
                for (int a : order)
                    if (a != last_agent) {
                        place(j, a);
                        last_agent = a;
                        break;
                    }
            } else {
                int j2 = walk[pos + 1];
                int taker = -1;
                for (int a : order)
                    if (inst.value(a, j2) == 1) {
                        taker = a;
                        break;
                    }
                int filler = -1;
                for (int a = 0; a < inst.n_agents; ++a)
                    if (a != taker && a != last_agent) {
                        filler = a;
                        break;
                    }
                alloc.bundles[filler].push_back(j);
                place(j2, taker);
                last_agent = taker;
                ++pos;  // j2 handled here
            }
        }
    }
    return complete_partial(inst, alloc);
}

// EF1 allocation when every component has at most n items: treat components
// as categories with a per-agent quota of one. Components are processed in
// order of smallest member; within a component, the envy graph is decycled
// and agents pick their favorite remaining item in topological order, one
// item each, until the component is exhausted.
inline Allocation component_ef1(const Instance& inst) {
    auto comps = detail::component_masks(inst, full_mask(inst.n_items));
    for (ItemMask comp : comps)
        if (popcount(comp) > inst.n_agents)
            throw PreconditionViolated("component_ef1 requires CC(G) <= n");

    Allocation alloc = Allocation::empty(inst.n_agents);
    for (ItemMask comp : comps) {
        alloc = decycle(inst, alloc);
        std::vector<int> order = envy_topological_order(envy_graph(inst, alloc));
        ItemMask left = comp;
        for (int a : order) {
            if (!left) break;
            int pick = -1;
            for (int j = 0; j < inst.n_items; ++j)
                if ((left >> j & 1) && (pick < 0 || inst.value(a, j) > inst.value(a, pick)))
                    pick = j;
            alloc.bundles[a].push_back(pick);
            left &= ~(ItemMask{1} << pick);
        }
    }
    alloc.normalize();
    return alloc;
}

}  // namespace confair
