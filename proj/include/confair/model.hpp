#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "confair/errors.hpp"
#include "confair/rational.hpp"

namespace confair {

// Bundles are item-index sets; kept as sorted vectors in the public API and
// as 64-bit masks inside the search routines. Item and agent indices are
// 0-based everywhere, including all file formats.
using ItemSet = std::vector<int>;
using ItemMask = std::uint64_t;

inline ItemMask mask_of(const ItemSet& items) {
    ItemMask m = 0;
    for (int j : items) m |= ItemMask{1} << j;
    return m;
}

inline ItemSet set_of(ItemMask mask, int n_items) {
    ItemSet s;
    for (int j = 0; j < n_items; ++j)
        if (mask >> j & 1) s.push_back(j);
    return s;
}

// A problem instance: agents, items, an additive valuation matrix of exact
// non-negative rationals, and an undirected conflict graph on the items.
// Immutable after construction.
struct Instance {
    int n_agents = 0;
    int n_items = 0;
    std::vector<std::vector<Rational>> valuations;  // [agent][item]
    std::vector<std::pair<int, int>> edges;         // a < b, sorted, unique
    std::vector<ItemMask> conflicts;                // neighbor mask per item

    const Rational& value(int agent, int item) const { return valuations[agent][item]; }

    Rational bundle_value(int agent, const ItemSet& bundle) const {
        Rational sum = 0;
        for (int j : bundle) sum += valuations[agent][j];
        return sum;
    }

    Rational bundle_value(int agent, ItemMask bundle) const {
        Rational sum = 0;
        for (int j = 0; j < n_items; ++j)
            if (bundle >> j & 1) sum += valuations[agent][j];
        return sum;
    }

    Rational total_value(int agent) const {
        Rational sum = 0;
        for (const auto& v : valuations[agent]) sum += v;
        return sum;
    }

    bool independent(ItemMask bundle) const {
        for (int j = 0; j < n_items; ++j)
            if ((bundle >> j & 1) && (conflicts[j] & bundle)) return false;
        return true;
    }

    int degree(int item) const {
        ItemMask m = conflicts[item];
        int d = 0;
        while (m) { m &= m - 1; ++d; }
        return d;
    }

    int max_degree() const {
        int d = 0;
        for (int j = 0; j < n_items; ++j) d = std::max(d, degree(j));
        return d;
    }

    // True iff every valuation is an integer (the generated instances are).
    bool integral() const {
        for (const auto& row : valuations)
            for (const auto& v : row)
                if (denominator(v) != 1) return false;
        return true;
    }
};

// An ordered list of disjoint bundles, one per agent. Completeness is a
// derived property, never stored.
struct Allocation {
    std::vector<ItemSet> bundles;

    static Allocation empty(int n_agents) {
        Allocation a;
        a.bundles.assign(n_agents, {});
        return a;
    }

    bool complete(const Instance& inst) const {
        ItemMask all = 0;
        for (const auto& b : bundles) all |= mask_of(b);
        ItemMask full = inst.n_items == 64 ? ~ItemMask{0}
                                           : (ItemMask{1} << inst.n_items) - 1;
        return all == full;
    }

    bool disjoint() const {
        ItemMask seen = 0;
        for (const auto& b : bundles) {
            ItemMask m = mask_of(b);
            if (m & seen) return false;
            seen |= m;
        }
        return true;
    }

    void normalize() {
        for (auto& b : bundles) std::sort(b.begin(), b.end());
    }
};

// Checks dimensions, ranges and edge sanity; returns a normalized Instance
// with edges deduplicated and sorted. Throws InvalidInstance.
inline Instance validate_instance(int n_agents, int n_items,
                                  std::vector<std::vector<Rational>> valuations,
                                  std::vector<std::pair<int, int>> edges) {
    if (n_agents < 1) throw InvalidInstance("need at least one agent");
    if (n_items < 1) throw InvalidInstance("need at least one item");
    if (n_items > 64) throw InvalidInstance("at most 64 items supported");
    if (static_cast<int>(valuations.size()) != n_agents)
        throw InvalidInstance("valuation matrix has wrong number of rows");
    for (const auto& row : valuations) {
        if (static_cast<int>(row.size()) != n_items)
            throw InvalidInstance("valuation row has wrong number of columns");
        for (const auto& v : row)
            if (v < 0) throw InvalidInstance("negative valuation");
    }
    for (auto& [a, b] : edges) {
        if (a == b) throw InvalidInstance("self-loop edge");
        if (a < 0 || b < 0 || a >= n_items || b >= n_items)
            throw InvalidInstance("edge endpoint out of range");
        if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Instance inst;
    inst.n_agents = n_agents;
    inst.n_items = n_items;
    inst.valuations = std::move(valuations);
    inst.edges = std::move(edges);
    inst.conflicts.assign(n_items, 0);
    for (auto [a, b] : inst.edges) {
        inst.conflicts[a] |= ItemMask{1} << b;
        inst.conflicts[b] |= ItemMask{1} << a;
    }
    return inst;
}

// True iff every bundle is an independent set of the conflict graph.
inline bool is_feasible(const Instance& inst, const Allocation& alloc) {
    for (const auto& b : alloc.bundles)
        if (!inst.independent(mask_of(b))) return false;
    return true;
}

inline Rational bundle_value(const Instance& inst, int agent, const ItemSet& bundle) {
    return inst.bundle_value(agent, bundle);
}

// v'_ij = factor_i * v_ij; the conflict graph is unchanged.
inline Instance scale_valuations(const Instance& inst, const std::vector<Rational>& factors) {
    if (static_cast<int>(factors.size()) != inst.n_agents)
        throw PreconditionViolated("one scale factor per agent required");
    for (const auto& c : factors)
        if (c <= 0) throw PreconditionViolated("scale factors must be positive");
    Instance scaled = inst;
    for (int i = 0; i < inst.n_agents; ++i)
        for (int j = 0; j < inst.n_items; ++j) scaled.valuations[i][j] *= factors[i];
    return scaled;
}

// Extends a feasible partial allocation to a complete one: each leftover item
// (ascending index) goes to the lowest-index agent whose bundle holds no
// conflicting item. Requires n > Delta(G), which guarantees such an agent.
inline Allocation complete_partial(const Instance& inst, const Allocation& partial) {
    if (inst.n_agents <= inst.max_degree())
        throw PreconditionViolated("complete_partial requires n > Delta(G)");
    std::vector<ItemMask> masks;
    ItemMask used = 0;
    for (const auto& b : partial.bundles) {
        masks.push_back(mask_of(b));
        used |= masks.back();
    }
    Allocation result = partial;
    for (int j = 0; j < inst.n_items; ++j) {
        if (used >> j & 1) continue;
        for (int i = 0; i < inst.n_agents; ++i) {
            if (masks[i] & inst.conflicts[j]) continue;
            masks[i] |= ItemMask{1} << j;
            result.bundles[i].push_back(j);
            break;
        }
    }
    result.normalize();
    return result;
}

}  // namespace confair
