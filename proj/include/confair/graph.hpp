#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "confair/errors.hpp"
#include "confair/model.hpp"
#include "confair/rational.hpp"

namespace confair {

struct GraphStats {
    std::vector<int> degrees;
    int max_degree = 0;
    std::vector<ItemSet> components;  // ordered by smallest member
    int largest_component = 0;        // CC(G)
};

// A proper vertex coloring of (a subset of) the items. color_of[j] == -1 for
// items outside the colored subset.
struct Coloring {
    std::vector<int> color_of;
    int k = 0;

    std::vector<ItemSet> classes() const {
        std::vector<ItemSet> cls(k);
        for (int j = 0; j < static_cast<int>(color_of.size()); ++j)
            if (color_of[j] >= 0) cls[color_of[j]].push_back(j);
        return cls;
    }

    bool proper(const Instance& inst) const {
        for (auto [a, b] : inst.edges)
            if (color_of[a] >= 0 && color_of[a] == color_of[b]) return false;
        return true;
    }
};

struct WeightedIsResult {
    ItemSet set;
    Rational weight;
};

inline ItemMask full_mask(int n_items) {
    return n_items == 64 ? ~ItemMask{0} : (ItemMask{1} << n_items) - 1;
}

inline int popcount(ItemMask m) {
    int c = 0;
    while (m) { m &= m - 1; ++c; }
    return c;
}

inline int degree_in(const Instance& inst, int j, ItemMask subset) {
    return popcount(inst.conflicts[j] & subset);
}

namespace detail {

inline std::vector<ItemMask> component_masks(const Instance& inst, ItemMask subset) {
    std::vector<ItemMask> comps;
    ItemMask seen = 0;
    for (int s = 0; s < inst.n_items; ++s) {
        if (!(subset >> s & 1) || (seen >> s & 1)) continue;
        ItemMask comp = 0;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (comp >> v & 1) continue;
            comp |= ItemMask{1} << v;
            ItemMask nb = inst.conflicts[v] & subset & ~comp;
            for (int u = 0; u < inst.n_items; ++u)
                if (nb >> u & 1) stack.push_back(u);
        }
        comps.push_back(comp);
        seen |= comp;
    }
    return comps;
}

inline bool connected_within(const Instance& inst, ItemMask subset) {
    if (!subset) return true;
    return component_masks(inst, subset).size() == 1;
}

// Reverse-BFS vertex order from root: every non-root vertex has a neighbor
// placed after it, so greedy coloring there sees at most deg-1 colors.
inline std::vector<int> reverse_bfs_order(const Instance& inst, ItemMask comp, int root) {
    std::vector<int> order;
    ItemMask seen = ItemMask{1} << root;
    std::vector<int> queue{root};
    for (std::size_t h = 0; h < queue.size(); ++h) {
        int v = queue[h];
        order.push_back(v);
        ItemMask nb = inst.conflicts[v] & comp & ~seen;
        for (int u = 0; u < inst.n_items; ++u)
            if (nb >> u & 1) {
                seen |= ItemMask{1} << u;
                queue.push_back(u);
            }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

inline void greedy_color_order(const Instance& inst, const std::vector<int>& order,
                               std::vector<int>& color_of) {
    for (int v : order) {
        std::uint64_t used = 0;
        ItemMask nb = inst.conflicts[v];
        for (int u = 0; u < inst.n_items; ++u)
            if ((nb >> u & 1) && color_of[u] >= 0) used |= std::uint64_t{1} << color_of[u];
        int c = 0;
        while (used >> c & 1) ++c;
        color_of[v] = c;
    }
}

}  // namespace detail

inline GraphStats graph_stats(const Instance& inst) {
    GraphStats st;
    st.degrees.resize(inst.n_items);
    for (int j = 0; j < inst.n_items; ++j) {
        st.degrees[j] = inst.degree(j);
        st.max_degree = std::max(st.max_degree, st.degrees[j]);
    }
    for (ItemMask comp : detail::component_masks(inst, full_mask(inst.n_items))) {
        st.components.push_back(set_of(comp, inst.n_items));
        st.largest_component =
            std::max(st.largest_component, static_cast<int>(st.components.back().size()));
    }
    return st;
}

// Ascending item index, lowest available color; uses at most Delta(G)+1 colors.
inline Coloring greedy_coloring(const Instance& inst) {
    Coloring col;
    col.color_of.assign(inst.n_items, -1);
    std::vector<int> order(inst.n_items);
    for (int j = 0; j < inst.n_items; ++j) order[j] = j;
    detail::greedy_color_order(inst, order, col.color_of);
    col.k = *std::max_element(col.color_of.begin(), col.color_of.end()) + 1;
    return col;
}

// Components of G[subset] that block a k-coloring by Brooks' theorem:
// K_{k+1}, or odd cycles when k = 2.
inline std::vector<std::vector<int>> delta_coloring_offenders(const Instance& inst,
                                                              ItemMask subset, int k) {
    std::vector<std::vector<int>> offenders;
    for (ItemMask comp : detail::component_masks(inst, subset)) {
        int size = popcount(comp);
        bool regular_k = true;
        for (int v = 0; v < inst.n_items; ++v)
            if ((comp >> v & 1) && degree_in(inst, v, comp) != k) regular_k = false;
        if (k >= 1 && size == k + 1 && regular_k)
            offenders.push_back(set_of(comp, inst.n_items));  // K_{k+1}
        else if (k == 2 && regular_k && size % 2 == 1)
            offenders.push_back(set_of(comp, inst.n_items));  // odd cycle
    }
    return offenders;
}

struct DeltaColorableResult {
    bool colorable;
    std::vector<std::vector<int>> offending_components;
};

inline DeltaColorableResult is_delta_colorable(const Instance& inst) {
    int delta = inst.max_degree();
    auto off = delta_coloring_offenders(inst, full_mask(inst.n_items), delta);
    return {off.empty(), off};
}

namespace detail {

// Colors one connected component of G[subset] with at most k colors, k >= the
// component's max degree. Constructive Brooks: non-regular components are
// colored greedily from a low-degree root; 2-connected regular ones via two
// non-adjacent neighbors a, c of a vertex b, colored first and identically;
// regular components with a cut vertex are split at it and recolored to agree.
inline void brooks_color_component(const Instance& inst, ItemMask comp, int k,
                                   std::vector<int>& color_of) {
    int size = popcount(comp);
    if (size == 1) {
        for (int v = 0; v < inst.n_items; ++v)
            if (comp >> v & 1) color_of[v] = 0;
        return;
    }
    int low = -1;  // vertex with degree < k, if any
    for (int v = 0; v < inst.n_items && low < 0; ++v)
        if ((comp >> v & 1) && degree_in(inst, v, comp) < k) low = v;
    if (low >= 0) {
        greedy_color_order(inst, reverse_bfs_order(inst, comp, low), color_of);
        return;
    }

    // k-regular. K_{k+1} and odd cycles (k=2) were screened out by the caller.
    if (k == 2) {
        // Even cycle: alternate colors around it.
        int start = -1;
        for (int v = 0; v < inst.n_items && start < 0; ++v)
            if (comp >> v & 1) start = v;
        int prev = -1, cur = start, c = 0;
        while (color_of[cur] < 0) {
            color_of[cur] = c;
            c ^= 1;
            ItemMask nb = inst.conflicts[cur] & comp;
            int nxt = -1;
            for (int u = 0; u < inst.n_items; ++u)
                if ((nb >> u & 1) && u != prev) nxt = u;
            prev = cur;
            cur = nxt;
        }
        return;
    }

    // Try the 2-connected construction: b with non-adjacent neighbors a, c
    // such that comp - {a, c} stays connected.
    for (int b = 0; b < inst.n_items; ++b) {
        if (!(comp >> b & 1)) continue;
        ItemSet nbrs = set_of(inst.conflicts[b] & comp, inst.n_items);
        for (std::size_t x = 0; x < nbrs.size(); ++x)
            for (std::size_t y = x + 1; y < nbrs.size(); ++y) {
                int a = nbrs[x], c = nbrs[y];
                if (inst.conflicts[a] >> c & 1) continue;
                ItemMask rest = comp & ~(ItemMask{1} << a) & ~(ItemMask{1} << c);
                if (!connected_within(inst, rest)) continue;
                color_of[a] = 0;
                color_of[c] = 0;
                greedy_color_order(inst, reverse_bfs_order(inst, rest, b), color_of);
                return;
            }
    }

    // Regular but not 2-connected: split at a cut vertex x; each piece has x
    // with reduced degree, so the non-regular path applies; then rename each
    // piece's colors so x agrees.
    for (int x = 0; x < inst.n_items; ++x) {
        if (!(comp >> x & 1)) continue;
        auto pieces = component_masks(inst, comp & ~(ItemMask{1} << x));
        if (pieces.size() < 2) continue;
        bool first = true;
        int x_color = -1;
        for (ItemMask piece : pieces) {
            ItemMask sub = piece | (ItemMask{1} << x);
            std::vector<int> local(inst.n_items, -1);
            greedy_color_order(inst, reverse_bfs_order(inst, sub, x), local);
            if (first) {
                x_color = local[x];
                first = false;
            } else if (local[x] != x_color) {
                for (int v = 0; v < inst.n_items; ++v) {
                    if (!(sub >> v & 1) || v == x) continue;
                    if (local[v] == x_color) local[v] = local[x];
                    else if (local[v] == local[x]) local[v] = x_color;
                }
                local[x] = x_color;
            }
            for (int v = 0; v < inst.n_items; ++v)
                if ((piece >> v & 1)) color_of[v] = local[v];
        }
        color_of[x] = x_color;
        return;
    }
    throw std::logic_error("brooks_color_component: unreachable");
}

}  // namespace detail

// Proper coloring of G[subset] with at most target_k colors; throws
// NotDeltaColorable when some component forbids it. target_k must be at least
// the max degree of G[subset].
inline Coloring delta_coloring(const Instance& inst, ItemMask subset, int target_k) {
    auto off = delta_coloring_offenders(inst, subset, target_k);
    if (!off.empty()) throw NotDeltaColorable(std::move(off));
    Coloring col;
    col.color_of.assign(inst.n_items, -1);
    for (ItemMask comp : detail::component_masks(inst, subset)) {
        int comp_delta = 0;
        for (int v = 0; v < inst.n_items; ++v)
            if (comp >> v & 1) comp_delta = std::max(comp_delta, degree_in(inst, v, comp));
        if (comp_delta < target_k) {
            int root = -1;
            for (int v = 0; v < inst.n_items && root < 0; ++v)
                if (comp >> v & 1) root = v;
            detail::greedy_color_order(inst, detail::reverse_bfs_order(inst, comp, root),
                                       col.color_of);
        } else {
            detail::brooks_color_component(inst, comp, target_k, col.color_of);
        }
    }
    col.k = target_k;
    return col;
}

// Delta(G)-coloring of the whole graph, per Brooks' theorem.
inline Coloring brooks_coloring(const Instance& inst) {
    return delta_coloring(inst, full_mask(inst.n_items), inst.max_degree());
}

// 2-colors G[subset] by BFS; throws NotBipartite with an odd-cycle witness.
inline Coloring bipartite_2coloring(const Instance& inst,
                                    ItemMask subset = ~ItemMask{0}) {
    subset &= full_mask(inst.n_items);
    Coloring col;
    col.color_of.assign(inst.n_items, -1);
    std::vector<int> parent(inst.n_items, -1), depth(inst.n_items, 0);
    bool any_edge = false;
    for (int s = 0; s < inst.n_items; ++s) {
        if (!(subset >> s & 1) || col.color_of[s] >= 0) continue;
        col.color_of[s] = 0;
        std::vector<int> queue{s};
        for (std::size_t h = 0; h < queue.size(); ++h) {
            int v = queue[h];
            ItemMask nb = inst.conflicts[v] & subset;
            for (int u = 0; u < inst.n_items; ++u) {
                if (!(nb >> u & 1)) continue;
                any_edge = true;
                if (col.color_of[u] < 0) {
                    col.color_of[u] = 1 - col.color_of[v];
                    parent[u] = v;
                    depth[u] = depth[v] + 1;
                    queue.push_back(u);
                } else if (col.color_of[u] == col.color_of[v]) {
                    // Walk both endpoints to their common ancestor.
                    std::vector<int> pv, pu;
                    int a = v, b = u;
                    while (depth[a] > depth[b]) { pv.push_back(a); a = parent[a]; }
                    while (depth[b] > depth[a]) { pu.push_back(b); b = parent[b]; }
                    while (a != b) {
                        pv.push_back(a); a = parent[a];
                        pu.push_back(b); b = parent[b];
                    }
                    pv.push_back(a);
                    std::vector<int> cycle(pv);
                    cycle.insert(cycle.end(), pu.rbegin(), pu.rend());
                    throw NotBipartite(std::move(cycle));
                }
            }
        }
    }
    col.k = any_edge ? 2 : 1;
    return col;
}

inline bool is_bipartite(const Instance& inst, ItemMask subset = ~ItemMask{0}) {
    try {
        bipartite_2coloring(inst, subset);
        return true;
    } catch (const NotBipartite&) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// Exact search with node/time budgets.

struct SearchBudget {
    std::uint64_t max_nodes = 200'000'000;
    double seconds = 300.0;
};

namespace detail {

struct BudgetClock {
    std::uint64_t nodes = 0;
    std::uint64_t max_nodes;
    std::chrono::steady_clock::time_point deadline;

    explicit BudgetClock(const SearchBudget& b)
        : max_nodes(b.max_nodes),
          deadline(std::chrono::steady_clock::now() +
                   std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                       std::chrono::duration<double>(b.seconds))) {}

    void tick() {
        if (++nodes > max_nodes) throw BudgetExceeded();
        if ((nodes & 0x3fff) == 0 && std::chrono::steady_clock::now() > deadline)
            throw BudgetExceeded();
    }
};

// DFS k-colorability of G[subset] with first-use symmetry breaking.
inline bool try_k_color(const Instance& inst, const std::vector<int>& order,
                        std::size_t pos, int k, int used, std::vector<int>& color_of,
                        BudgetClock& clock) {
    if (pos == order.size()) return true;
    clock.tick();
    int v = order[pos];
    std::uint64_t taken = 0;
    ItemMask nb = inst.conflicts[v];
    for (int u = 0; u < inst.n_items; ++u)
        if ((nb >> u & 1) && color_of[u] >= 0) taken |= std::uint64_t{1} << color_of[u];
    int limit = std::min(k, used + 1);  // a fresh color only as the next index
    for (int c = 0; c < limit; ++c) {
        if (taken >> c & 1) continue;
        color_of[v] = c;
        if (try_k_color(inst, order, pos + 1, k, std::max(used, c + 1), color_of, clock))
            return true;
        color_of[v] = -1;
    }
    return false;
}

inline int greedy_clique_size(const Instance& inst, ItemMask subset) {
    int best = subset ? 1 : 0;
    for (int s = 0; s < inst.n_items; ++s) {
        if (!(subset >> s & 1)) continue;
        ItemMask clique = ItemMask{1} << s;
        ItemMask cand = inst.conflicts[s] & subset;
        while (cand) {
            int pick = -1, pick_deg = -1;
            for (int u = 0; u < inst.n_items; ++u)
                if (cand >> u & 1) {
                    int d = popcount(inst.conflicts[u] & cand);
                    if (d > pick_deg) { pick_deg = d; pick = u; }
                }
            clique |= ItemMask{1} << pick;
            cand &= inst.conflicts[pick];
        }
        best = std::max(best, popcount(clique));
    }
    return best;
}

}  // namespace detail

// Coloring of G[subset] with exactly k colors, if one exists.
inline std::optional<Coloring> k_coloring(const Instance& inst, ItemMask subset, int k,
                                          const SearchBudget& budget = {}) {
    detail::BudgetClock clock(budget);
    std::vector<int> order = set_of(subset, inst.n_items);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        int da = degree_in(inst, a, subset), db = degree_in(inst, b, subset);
        return da != db ? da > db : a < b;
    });
    Coloring col;
    col.color_of.assign(inst.n_items, -1);
    col.k = k;
    if (!detail::try_k_color(inst, order, 0, k, 0, col.color_of, clock))
        return std::nullopt;
    return col;
}

// Exact chi(G[subset]) by branch and bound; intended for desk-scale graphs.
inline int chromatic_number_exact(const Instance& inst, const SearchBudget& budget = {},
                                  ItemMask subset = ~ItemMask{0}) {
    subset &= full_mask(inst.n_items);
    if (!subset) return 0;
    int lower = detail::greedy_clique_size(inst, subset);
    for (int k = lower;; ++k)
        if (k_coloring(inst, subset, k, budget)) return k;
}

// Minimum coloring of G[subset]; chi colors exactly.
inline Coloring chromatic_coloring(const Instance& inst, ItemMask subset,
                                   const SearchBudget& budget = {}) {
    subset &= full_mask(inst.n_items);
    int chi = chromatic_number_exact(inst, budget, subset);
    if (chi == 0) {
        Coloring empty;
        empty.color_of.assign(inst.n_items, -1);
        return empty;
    }
    return *k_coloring(inst, subset, chi, budget);
}

namespace detail {

struct MwisState {
    const Instance& inst;
    const std::vector<Rational>& weights;
    ItemMask best_set = 0;
    Rational best_weight = -1;
    BudgetClock clock;

    MwisState(const Instance& i, const std::vector<Rational>& w, const SearchBudget& b)
        : inst(i), weights(w), clock(b) {}

    void search(ItemMask remaining, ItemMask chosen, const Rational& value) {
        clock.tick();
        Rational bound = value;
        for (int j = 0; j < inst.n_items; ++j)
            if (remaining >> j & 1) bound += weights[j];
        if (bound <= best_weight) return;
        // branch on the max-degree remaining vertex
        int pivot = -1, pivot_deg = -1;
        for (int j = 0; j < inst.n_items; ++j)
            if (remaining >> j & 1) {
                int d = popcount(inst.conflicts[j] & remaining);
                if (d > pivot_deg) { pivot_deg = d; pivot = j; }
            }
        if (pivot < 0 || pivot_deg == 0) {
            // independent remainder: take everything
            Rational total = value;
            for (int j = 0; j < inst.n_items; ++j)
                if (remaining >> j & 1) total += weights[j];
            if (total > best_weight) {
                best_weight = total;
                best_set = chosen | remaining;
            }
            return;
        }
        search(remaining & ~(ItemMask{1} << pivot) & ~inst.conflicts[pivot],
               chosen | (ItemMask{1} << pivot), value + weights[pivot]);
        search(remaining & ~(ItemMask{1} << pivot), chosen, value);
    }
};

}  // namespace detail

// Maximum-weight independent set of G[subset], exact branch and bound.
inline WeightedIsResult mwis_exact(const Instance& inst, const std::vector<Rational>& weights,
                                   const SearchBudget& budget = {},
                                   ItemMask subset = ~ItemMask{0}) {
    subset &= full_mask(inst.n_items);
    for (const auto& w : weights)
        if (w < 0) throw PreconditionViolated("mwis weights must be non-negative");
    detail::MwisState st(inst, weights, budget);
    st.search(subset, 0, 0);
    WeightedIsResult res;
    res.set = set_of(st.best_set, inst.n_items);
    res.weight = st.best_weight;
    return res;
}

// Independent set with weight >= 3/(Delta+2) of optimum. Exact search below
// 40 items (which dominates the ratio), greedy heaviest-first otherwise.
inline WeightedIsResult mwis_approx(const Instance& inst, const std::vector<Rational>& weights,
                                    ItemMask subset = ~ItemMask{0}) {
    subset &= full_mask(inst.n_items);
    if (popcount(subset) <= 40) return mwis_exact(inst, weights, SearchBudget{}, subset);
    WeightedIsResult res;
    res.weight = 0;
    ItemMask remaining = subset;
    while (remaining) {
        int pick = -1;
        for (int j = 0; j < inst.n_items; ++j)
            if ((remaining >> j & 1) && (pick < 0 || weights[j] > weights[pick])) pick = j;
        res.set.push_back(pick);
        res.weight += weights[pick];
        remaining &= ~(ItemMask{1} << pick) & ~inst.conflicts[pick];
    }
    std::sort(res.set.begin(), res.set.end());
    return res;
}

}  // namespace confair
