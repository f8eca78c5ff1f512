#pragma once

// Desk-scale exact solvers: maximin shares and MMS partitions, the best
// achievable MMS ratio, maximum Nash welfare with and without an EF1
// constraint, exhaustive EF1 existence, and the constructive existence engine
// for approximate MMS allocations. All searches honor a SearchBudget and
// throw BudgetExceeded rather than returning approximations.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "confair/approx.hpp"
#include "confair/criteria.hpp"
#include "confair/graph.hpp"
#include "confair/model.hpp"

namespace confair {

namespace detail {

// Upper bound on the achievable minimum bundle value: pour the remaining
// value onto the current bundle values, lowest first, ignoring conflicts.
inline Rational waterfill_bound(std::vector<Rational> vals, Rational rem) {
    std::sort(vals.begin(), vals.end());
    std::size_t k = 0;
    while (k + 1 < vals.size()) {
        Rational gap = (vals[k + 1] - vals[k]) * Rational(static_cast<int>(k + 1));
        if (rem <= gap) break;
        rem -= gap;
        ++k;
    }
    return vals[k] + rem / Rational(static_cast<int>(k + 1));
}

struct MmsSearch {
    const Instance& inst;
    int agent;
    std::vector<int> order;  // items, descending value
    std::vector<ItemMask> bundles;
    std::vector<Rational> values;
    std::vector<Rational> suffix;  // remaining value from position p on
    Rational best = -1;
    std::vector<int> best_owner;
    std::vector<int> owner;
    BudgetClock clock;

    MmsSearch(const Instance& i, int a, int k, ItemMask subset, const SearchBudget& b)
        : inst(i), agent(a), bundles(k, 0), values(k, 0), clock(b) {
        order = set_of(subset, inst.n_items);
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            const Rational &vx = inst.value(agent, x), &vy = inst.value(agent, y);
            return vx != vy ? vx > vy : x < y;
        });
        suffix.assign(order.size() + 1, 0);
        for (int p = static_cast<int>(order.size()) - 1; p >= 0; --p)
            suffix[p] = suffix[p + 1] + inst.value(agent, order[p]);
        owner.assign(order.size(), -1);
    }

    void run(std::size_t pos) {
        clock.tick();
        if (pos == order.size()) {
            Rational worst = values[0];
            for (const auto& v : values)
                if (v < worst) worst = v;
            if (worst > best) {
                best = worst;
                best_owner = owner;
            }
            return;
        }
        if (best >= 0 && waterfill_bound(values, suffix[pos]) <= best) return;
        int j = order[pos];
        bool tried_empty = false;  // empty bundles are interchangeable
        for (std::size_t k = 0; k < bundles.size(); ++k) {
            if (bundles[k] & inst.conflicts[j]) continue;
            if (!bundles[k]) {
                if (tried_empty) continue;
                tried_empty = true;
            }
            bundles[k] |= ItemMask{1} << j;
            values[k] += inst.value(agent, j);
            owner[pos] = static_cast<int>(k);
            run(pos + 1);
            bundles[k] &= ~(ItemMask{1} << j);
            values[k] -= inst.value(agent, j);
        }
    }
};

}  // namespace detail

struct MmsSolo {
    Rational mu;
    Allocation partition;
};

// Exact maximin share of one agent over feasible partitions into n_bundles
// bundles of the items in subset, with a witnessing partition. Throws
// InfeasibleInstance when G[subset] admits no such partition.
inline MmsSolo mms_exact(const Instance& inst, int agent, const SearchBudget& budget = {},
                         int n_bundles = -1, ItemMask subset = ~ItemMask{0}) {
    if (n_bundles < 0) n_bundles = inst.n_agents;
    subset &= full_mask(inst.n_items);
    detail::MmsSearch search(inst, agent, n_bundles, subset, budget);
    search.run(0);
    if (search.best < 0) throw InfeasibleInstance();
    MmsSolo res;
    res.mu = search.best;
    res.partition = Allocation::empty(n_bundles);
    for (std::size_t p = 0; p < search.order.size(); ++p)
        res.partition.bundles[search.best_owner[p]].push_back(search.order[p]);
    res.partition.normalize();
    return res;
}

// Per-agent maximin shares with witnessing partitions; sets infeasible
// instead of throwing when no feasible partition exists.
inline MmsProfile mms_profile(const Instance& inst, const SearchBudget& budget = {}) {
    MmsProfile prof;
    for (int i = 0; i < inst.n_agents; ++i) {
        try {
            MmsSolo solo = mms_exact(inst, i, budget);
            prof.mu.push_back(solo.mu);
            prof.partitions.push_back(std::move(solo.partition));
        } catch (const InfeasibleInstance&) {
            prof.infeasible = true;
            prof.mu.clear();
            prof.partitions.clear();
            return prof;
        }
    }
    return prof;
}

namespace detail {

struct RatioSearch {
    const Instance& inst;
    const std::vector<Rational>& mu;
    std::vector<int> order;
    std::vector<ItemMask> bundles;
    std::vector<Rational> values;                // v_i of own bundle
    std::vector<std::vector<Rational>> suffix;   // per agent, remaining value
    Rational best = -1;
    bool found = false;
    std::vector<int> best_owner, owner;
    BudgetClock clock;

    // integer fast path: values and mu are int64, ratios compared by cross
    // multiplication in 128 bits, no divisions in the hot loop
    bool fast = false;
    std::vector<std::vector<long long>> ival;
    std::vector<long long> ivalues, imu;
    std::vector<std::vector<long long>> isuffix;
    std::vector<long long> itop;                 // remaining mass, best owner per item
    long long best_num = -1, best_den = 1;       // fast-path incumbent ratio
    double best_d = -1;

    RatioSearch(const Instance& i, const std::vector<Rational>& m, const SearchBudget& b)
        : inst(i), mu(m), bundles(i.n_agents, 0), values(i.n_agents, 0), clock(b) {
        order.resize(inst.n_items);
        for (int j = 0; j < inst.n_items; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            Rational mx = 0, my = 0;
            for (int a = 0; a < inst.n_agents; ++a) {
                if (inst.value(a, x) > mx) mx = inst.value(a, x);
                if (inst.value(a, y) > my) my = inst.value(a, y);
            }
            return mx != my ? mx > my : x < y;
        });
        suffix.assign(inst.n_agents, std::vector<Rational>(order.size() + 1, 0));
        for (int a = 0; a < inst.n_agents; ++a)
            for (int p = static_cast<int>(order.size()) - 1; p >= 0; --p)
                suffix[a][p] = suffix[a][p + 1] + inst.value(a, order[p]);
        owner.assign(order.size(), -1);

        const long long kValueCap = 1LL << 40;
        fast = inst.integral();
        for (const Rational& x : mu)
            if (denominator(x) != 1 || numerator(x) > kValueCap) fast = false;
        if (fast)
            for (const auto& row : inst.valuations)
                for (const Rational& v : row)
                    if (numerator(v) > kValueCap) fast = false;
        if (fast) {
            ival.assign(inst.n_agents, std::vector<long long>(inst.n_items, 0));
            for (int a = 0; a < inst.n_agents; ++a)
                for (int j = 0; j < inst.n_items; ++j)
                    ival[a][j] = static_cast<long long>(numerator(inst.value(a, j)));
            ivalues.assign(inst.n_agents, 0);
            imu.resize(inst.n_agents);
            for (int a = 0; a < inst.n_agents; ++a)
                imu[a] = static_cast<long long>(numerator(mu[a]));
            isuffix.assign(inst.n_agents, std::vector<long long>(order.size() + 1, 0));
            itop.assign(order.size() + 1, 0);
            for (int p = static_cast<int>(order.size()) - 1; p >= 0; --p) {
                long long top = 0;
                for (int a = 0; a < inst.n_agents; ++a) {
                    isuffix[a][p] = isuffix[a][p + 1] + ival[a][order[p]];
                    top = std::max(top, ival[a][order[p]]);
                }
                itop[p] = itop[p + 1] + top;
            }
        }
    }

    static bool ratio_le(long long an, long long ad, long long bn, long long bd) {
        return static_cast<__int128>(an) * bd <= static_cast<__int128>(bn) * ad;
    }

    void adopt_fast(std::size_t, long long num, long long den) {
        found = true;
        best_num = num;
        best_den = den;
        best = Rational(num, den);
        best_d = static_cast<double>(num) / static_cast<double>(den);
        best_owner = owner;
    }

    // Seed the incumbent: each item to the feasible agent with the smallest
    // current mu-normalized value (zero-mu agents only as a last resort).
    void seed_greedy() {
        if (!fast) return;
        std::vector<ItemMask> masks(inst.n_agents, 0);
        std::vector<long long> cur(inst.n_agents, 0);
        std::vector<int> own(order.size(), -1);
        for (std::size_t p = 0; p < order.size(); ++p) {
            int j = order[p], pick = -1;
            for (int a = 0; a < inst.n_agents; ++a) {
                if (masks[a] & inst.conflicts[j]) continue;
                if (pick < 0 || imu[pick] == 0) { if (pick < 0 || imu[a] > 0) pick = a; continue; }
                if (imu[a] > 0 && ratio_le(cur[a], imu[a], cur[pick], imu[pick]) &&
                    !ratio_le(cur[pick], imu[pick], cur[a], imu[a]))
                    pick = a;
            }
            if (pick < 0) return;
            masks[pick] |= ItemMask{1} << j;
            cur[pick] += ival[pick][j];
            own[p] = pick;
        }
        long long num = -1, den = 1;
        for (int a = 0; a < inst.n_agents; ++a) {
            if (imu[a] == 0) continue;
            if (num < 0 || !ratio_le(num, den, cur[a], imu[a])) { num = cur[a]; den = imu[a]; }
        }
        if (num < 0) { num = 1; den = 1; }
        std::swap(owner, own);
        adopt_fast(0, num, den);
        std::swap(owner, own);
    }

    Rational ratio_bound(std::size_t pos) const {
        Rational worst = -1;
        for (int a = 0; a < inst.n_agents; ++a) {
            if (mu[a] == 0) continue;
            Rational r = (values[a] + suffix[a][pos]) / mu[a];
            if (worst < 0 || r < worst) worst = r;
        }
        return worst < 0 ? Rational(1) : worst;
    }

    // Fast-path prune: first the per-agent cap (exact), then a shared-mass
    // bound distributing each remaining item once (double with margin).
    bool prunable(std::size_t pos) const {
        if (!found) return false;
        if (!fast) return !(ratio_bound(pos) > best);
        long long wn = -1, wd = 1;
        for (int a = 0; a < inst.n_agents; ++a) {
            if (imu[a] == 0) continue;
            long long cap = ivalues[a] + isuffix[a][pos];
            if (wn < 0 || !ratio_le(wn, wd, cap, imu[a])) { wn = cap; wd = imu[a]; }
        }
        if (wn < 0) return ratio_le(1, 1, best_num, best_den);
        if (ratio_le(wn, wd, best_num, best_den)) return true;
        // mass bound: max r with sum_a max(0, r*mu_a - v_a) <= remaining mass
        // and r*mu_a - v_a <= rem_a per agent
        double mass = static_cast<double>(itop[pos]);
        double lo = 0, hi = static_cast<double>(wn) / static_cast<double>(wd);
        for (int it = 0; it < 40 && hi - lo > 1e-9 * (1 + hi); ++it) {
            double r = 0.5 * (lo + hi), need = 0;
            bool ok = true;
            for (int a = 0; a < inst.n_agents && ok; ++a) {
                if (imu[a] == 0) continue;
                double d = r * static_cast<double>(imu[a]) - static_cast<double>(ivalues[a]);
                if (d > static_cast<double>(isuffix[a][pos])) ok = false;
                if (d > 0) need += d;
            }
            if (ok && need <= mass)
                lo = r;
            else
                hi = r;
        }
        return hi * (1 + 1e-9) < best_d * (1 - 1e-9);
    }

    void run(std::size_t pos) {
        clock.tick();
        if (pos == order.size()) {
            if (fast) {
                long long num = -1, den = 1;
                for (int a = 0; a < inst.n_agents; ++a) {
                    if (imu[a] == 0) continue;
                    if (num < 0 || !ratio_le(num, den, ivalues[a], imu[a])) {
                        num = ivalues[a];
                        den = imu[a];
                    }
                }
                if (num < 0) num = den = 1;
                if (!found || !ratio_le(num, den, best_num, best_den))
                    adopt_fast(pos, num, den);
            } else {
                Rational r = ratio_bound(pos);
                if (!found || r > best) {
                    found = true;
                    best = r;
                    best_owner = owner;
                }
            }
            return;
        }
        if (prunable(pos)) return;
        int j = order[pos];
        for (int a = 0; a < inst.n_agents; ++a) {
            if (bundles[a] & inst.conflicts[j]) continue;
            bundles[a] |= ItemMask{1} << j;
            if (fast)
                ivalues[a] += ival[a][j];
            else
                values[a] += inst.value(a, j);
            owner[pos] = a;
            run(pos + 1);
            bundles[a] &= ~(ItemMask{1} << j);
            if (fast)
                ivalues[a] -= ival[a][j];
            else
                values[a] -= inst.value(a, j);
        }
    }
};

}  // namespace detail

struct MmsAllocationResult {
    Rational ratio;
    Allocation alloc;
};

// Feasible complete allocation maximizing min_i v_i(A_i)/mu_i, with zero-mu
// agents excluded from the minimum (ratio 1 if every mu is zero).
inline MmsAllocationResult mms_allocation_exact(const Instance& inst, const MmsProfile& mms,
                                                const SearchBudget& budget = {}) {
    if (mms.infeasible) throw InfeasibleInstance();
    detail::RatioSearch search(inst, mms.mu, budget);
    search.seed_greedy();
    search.run(0);
    if (!search.found) throw InfeasibleInstance();
    MmsAllocationResult res;
    res.ratio = search.best;
    res.alloc = Allocation::empty(inst.n_agents);
    for (std::size_t p = 0; p < search.order.size(); ++p)
        res.alloc.bundles[search.best_owner[p]].push_back(search.order[p]);
    res.alloc.normalize();
    return res;
}

namespace detail {

struct NashSearch {
    const Instance& inst;
    bool require_ef1;
    std::vector<int> order;
    std::vector<ItemMask> bundles;
    std::optional<NashWelfare> best;
    double best_prod_d = 0;
    Allocation best_alloc;
    std::vector<int> owner;
    BudgetClock clock;

    // integer fast path: exact int64 running values, floating-point bound
    bool fast = false;
    std::vector<std::vector<long long>> ival;       // [agent][item]
    std::vector<long long> ivalues;
    std::vector<std::vector<long long>> isuffix;    // [agent][pos]
    std::vector<long long> itop;                    // sum over remaining of max_a v_aj

    std::vector<Rational> values;                   // generic path
    std::vector<std::vector<Rational>> suffix;

    std::vector<double> wc, wcap;                   // water-fill scratch

    NashSearch(const Instance& i, bool ef1, const SearchBudget& b)
        : inst(i), require_ef1(ef1), bundles(i.n_agents, 0), values(i.n_agents, 0),
          clock(b) {
        order.resize(inst.n_items);
        for (int j = 0; j < inst.n_items; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            Rational mx = 0, my = 0;
            for (int a = 0; a < inst.n_agents; ++a) {
                if (inst.value(a, x) > mx) mx = inst.value(a, x);
                if (inst.value(a, y) > my) my = inst.value(a, y);
            }
            return mx != my ? mx > my : x < y;
        });
        suffix.assign(inst.n_agents, std::vector<Rational>(order.size() + 1, 0));
        for (int a = 0; a < inst.n_agents; ++a)
            for (int p = static_cast<int>(order.size()) - 1; p >= 0; --p)
                suffix[a][p] = suffix[a][p + 1] + inst.value(a, order[p]);
        owner.assign(order.size(), -1);

        fast = inst.integral();
        const long long kValueCap = 1LL << 40;  // keeps sums and doubles exact enough
        if (fast)
            for (const auto& row : inst.valuations)
                for (const Rational& v : row)
                    if (numerator(v) > kValueCap) fast = false;
        if (fast) {
            ival.assign(inst.n_agents, std::vector<long long>(inst.n_items, 0));
            for (int a = 0; a < inst.n_agents; ++a)
                for (int j = 0; j < inst.n_items; ++j)
                    ival[a][j] = static_cast<long long>(numerator(inst.value(a, j)));
            ivalues.assign(inst.n_agents, 0);
            isuffix.assign(inst.n_agents, std::vector<long long>(order.size() + 1, 0));
            itop.assign(order.size() + 1, 0);
            for (int p = static_cast<int>(order.size()) - 1; p >= 0; --p) {
                long long top = 0;
                for (int a = 0; a < inst.n_agents; ++a) {
                    isuffix[a][p] = isuffix[a][p + 1] + ival[a][order[p]];
                    top = std::max(top, ival[a][order[p]]);
                }
                itop[p] = itop[p + 1] + top;
            }
        }
        wc.reserve(inst.n_agents);
        wcap.reserve(inst.n_agents);
    }

    Rational current_value(int a) const { return fast ? Rational(ivalues[a]) : values[a]; }

    NashWelfare current_welfare() const {
        NashWelfare nw;
        if (fast) {
            BigInt p = 1;
            for (long long v : ivalues)
                if (v > 0) {
                    ++nw.count_positive;
                    p *= v;
                }
            nw.product = Rational(p);
        } else {
            for (const Rational& v : values)
                if (v > 0) {
                    ++nw.count_positive;
                    nw.product *= v;
                }
        }
        return nw;
    }

    void adopt(const NashWelfare& nw, const Allocation& alloc) {
        if (best && !(nw > *best)) return;
        best = nw;
        best_prod_d = to_double(nw.product);
        best_alloc = alloc;
    }

    // External incumbent; must be a feasible complete allocation (and EF1 in
    // constrained mode).
    void seed_allocation(const Allocation& alloc) {
        if (require_ef1 && !is_ef1(inst, alloc)) return;
        NashWelfare nw;
        for (int a = 0; a < inst.n_agents; ++a) {
            Rational v = inst.bundle_value(a, alloc.bundles[a]);
            if (v > 0) {
                ++nw.count_positive;
                nw.product *= v;
            }
        }
        Allocation sorted = alloc;
        sorted.normalize();
        adopt(nw, sorted);
    }

    // Greedy product maximizer as an initial incumbent: each item goes to the
    // feasible agent with the largest marginal log gain.
    void seed_greedy() {
        Allocation a = Allocation::empty(inst.n_agents);
        std::vector<ItemMask> masks(inst.n_agents, 0);
        std::vector<double> cur(inst.n_agents, 0);
        for (int j : order) {
            int pick = -1;
            double pick_gain = -1;
            for (int i = 0; i < inst.n_agents; ++i) {
                if (masks[i] & inst.conflicts[j]) continue;
                double v = to_double(inst.value(i, j));
                double gain = cur[i] > 0 ? v / cur[i] : (v > 0 ? 1e18 + v : 0.0);
                if (pick < 0 || gain > pick_gain) {
                    pick = i;
                    pick_gain = gain;
                }
            }
            if (pick < 0) return;  // greedy dead end, search from scratch
            masks[pick] |= ItemMask{1} << j;
            cur[pick] += to_double(inst.value(pick, j));
            a.bundles[pick].push_back(j);
        }
        if (require_ef1 && !is_ef1(inst, a)) return;
        NashWelfare nw;
        for (int i = 0; i < inst.n_agents; ++i) {
            Rational v = inst.bundle_value(i, a.bundles[i]);
            if (v > 0) {
                ++nw.count_positive;
                nw.product *= v;
            }
        }
        a.normalize();
        adopt(nw, a);
    }

    NashWelfare optimistic(std::size_t pos) const {
        NashWelfare nw;
        for (int a = 0; a < inst.n_agents; ++a) {
            Rational cap = values[a] + suffix[a][pos];
            if (cap > 0) {
                ++nw.count_positive;
                nw.product *= cap;
            }
        }
        return nw;
    }

    // True when no descendant leaf can beat the incumbent. Fast path: the
    // remaining mass (each item counted once at its best value) is spread by
    // water filling under the per-agent caps, an upper bound on any reachable
    // product; evaluated in doubles with a safety margin so ties expand.
    bool prunable(std::size_t pos) {
        if (!best) return false;
        if (!fast) return !(optimistic(pos) > *best);
        int count_bound = 0;
        wc.clear();
        wcap.clear();
        for (int a = 0; a < inst.n_agents; ++a) {
            long long cap = ivalues[a] + isuffix[a][pos];
            if (cap > 0) {
                ++count_bound;
                wc.push_back(static_cast<double>(ivalues[a]));
                wcap.push_back(static_cast<double>(isuffix[a][pos]));
            }
        }
        if (count_bound != best->count_positive) return count_bound < best->count_positive;
        if (count_bound == 0) return true;
        double total_cap = 0, lo = 1e300, hi = 0;
        for (std::size_t i = 0; i < wc.size(); ++i) {
            total_cap += wcap[i];
            lo = std::min(lo, wc[i]);
            hi = std::max(hi, wc[i] + wcap[i]);
        }
        double mass = std::min(static_cast<double>(itop[pos]), total_cap);
        for (int it = 0; it < 40 && hi - lo > 1e-9 * (1 + hi); ++it) {
            double mid = 0.5 * (lo + hi);
            double used = 0;
            for (std::size_t i = 0; i < wc.size(); ++i)
                used += std::min(std::max(mid - wc[i], 0.0), wcap[i]);
            (used > mass ? hi : lo) = mid;
        }
        double prod = 1;
        for (std::size_t i = 0; i < wc.size(); ++i)
            prod *= wc[i] + std::min(std::max(hi - wc[i], 0.0), wcap[i]);
        return prod * (1 + 1e-9) < best_prod_d * (1 - 1e-9);
    }

    void run(std::size_t pos) {
        clock.tick();
        if (pos == order.size()) {
            NashWelfare nw = current_welfare();
            if (best && !(nw > *best)) return;
            Allocation a = Allocation::empty(inst.n_agents);
            for (std::size_t p = 0; p < order.size(); ++p)
                a.bundles[owner[p]].push_back(order[p]);
            if (require_ef1 && !is_ef1(inst, a)) return;
            a.normalize();
            adopt(nw, a);
            return;
        }
        if (prunable(pos)) return;
        int j = order[pos];
        for (int a = 0; a < inst.n_agents; ++a) {
            if (bundles[a] & inst.conflicts[j]) continue;
            bundles[a] |= ItemMask{1} << j;
            if (fast)
                ivalues[a] += ival[a][j];
            else
                values[a] += inst.value(a, j);
            owner[pos] = a;
            run(pos + 1);
            bundles[a] &= ~(ItemMask{1} << j);
            if (fast)
                ivalues[a] -= ival[a][j];
            else
                values[a] -= inst.value(a, j);
        }
    }
};

}  // namespace detail

struct MnwResult {
    Allocation alloc;
    NashWelfare welfare;
};

// EF1-constrained product maximizer; hint, when given, must be a feasible
// complete EF1 allocation and becomes the initial incumbent.
inline MnwResult mnw_ef1_constrained(const Instance& inst, const SearchBudget& budget = {},
                                     const Allocation* hint = nullptr) {
    detail::NashSearch s(inst, true, budget);
    if (hint) s.seed_allocation(*hint);
    s.seed_greedy();
    s.run(0);
    if (!s.best) throw NoEf1Allocation();
    return {s.best_alloc, *s.best};
}

// Feasible complete allocation maximizing Nash welfare lexicographically
// (count of positive agents, then product). With require_ef1, only EF1
// allocations qualify; an EF1 unconstrained optimum is reused directly.
inline MnwResult mnw_exact(const Instance& inst, bool require_ef1,
                           const SearchBudget& budget = {}) {
    detail::NashSearch plain(inst, false, budget);
    plain.seed_greedy();
    plain.run(0);
    if (!plain.best) throw InfeasibleInstance();
    MnwResult res{plain.best_alloc, *plain.best};
    if (!require_ef1 || is_ef1(inst, res.alloc)) return res;
    return mnw_ef1_constrained(inst, budget);
}

namespace detail {

struct Ef1Search {
    const Instance& inst;
    std::vector<int> order;
    std::vector<ItemMask> bundles;
    std::vector<std::vector<Rational>> cross;    // cross[i][o] = v_i(A_o)
    std::vector<std::vector<Rational>> top;      // top[i][o] = max_{j in A_o} v_ij
    std::vector<std::vector<Rational>> suffix;   // per agent, remaining value
    std::vector<std::vector<Rational>> sufmax;   // per agent, max remaining item
    std::optional<Allocation> witness;
    BudgetClock clock;

    Ef1Search(const Instance& i, const SearchBudget& b)
        : inst(i), bundles(i.n_agents, 0),
          cross(i.n_agents, std::vector<Rational>(i.n_agents, 0)),
          top(i.n_agents, std::vector<Rational>(i.n_agents, 0)), clock(b) {
        order.resize(inst.n_items);
        for (int j = 0; j < inst.n_items; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            Rational mx = 0, my = 0;
            for (int a = 0; a < inst.n_agents; ++a) {
                if (inst.value(a, x) > mx) mx = inst.value(a, x);
                if (inst.value(a, y) > my) my = inst.value(a, y);
            }
            return mx != my ? mx > my : x < y;
        });
        suffix.assign(inst.n_agents, std::vector<Rational>(order.size() + 1, 0));
        sufmax.assign(inst.n_agents, std::vector<Rational>(order.size() + 1, 0));
        for (int a = 0; a < inst.n_agents; ++a)
            for (int p = static_cast<int>(order.size()) - 1; p >= 0; --p) {
                suffix[a][p] = suffix[a][p + 1] + inst.value(a, order[p]);
                sufmax[a][p] = std::max(sufmax[a][p + 1], inst.value(a, order[p]));
            }
    }

    // Necessary condition: i can still end up EF1 towards o if i's best case
    // (all remaining items) plus the best removable item covers o's bundle.
    bool viable(std::size_t pos) const {
        for (int i = 0; i < inst.n_agents; ++i)
            for (int o = 0; o < inst.n_agents; ++o) {
                if (o == i) continue;
                Rational removable = std::max(top[i][o], sufmax[i][pos]);
                if (cross[i][i] + suffix[i][pos] + removable < cross[i][o]) return false;
            }
        return true;
    }

    bool run(std::size_t pos) {
        clock.tick();
        if (pos == order.size()) {
            Allocation a = Allocation::empty(inst.n_agents);
            std::vector<ItemSet> sets;
            for (int i = 0; i < inst.n_agents; ++i)
                a.bundles[i] = set_of(bundles[i], inst.n_items);
            if (!is_ef1(inst, a)) return false;
            witness = std::move(a);
            return true;
        }
        if (!viable(pos)) return false;
        int j = order[pos];
        // favor the agent currently worst off (relative to its own scale)
        std::vector<int> agents(inst.n_agents);
        for (int a = 0; a < inst.n_agents; ++a) agents[a] = a;
        std::sort(agents.begin(), agents.end(), [&](int a, int b) {
            Rational ta = inst.total_value(a), tb = inst.total_value(b);
            Rational ra = ta > 0 ? cross[a][a] / ta : Rational(1);
            Rational rb = tb > 0 ? cross[b][b] / tb : Rational(1);
            return ra != rb ? ra < rb : a < b;
        });
        for (int a : agents) {
            if (bundles[a] & inst.conflicts[j]) continue;
            bundles[a] |= ItemMask{1} << j;
            std::vector<Rational> old_top(inst.n_agents);
            for (int i = 0; i < inst.n_agents; ++i) {
                old_top[i] = top[i][a];
                cross[i][a] += inst.value(i, j);
                top[i][a] = std::max(top[i][a], inst.value(i, j));
            }
            if (run(pos + 1)) return true;
            bundles[a] &= ~(ItemMask{1} << j);
            for (int i = 0; i < inst.n_agents; ++i) {
                cross[i][a] -= inst.value(i, j);
                top[i][a] = old_top[i];
            }
        }
        return false;
    }
};

}  // namespace detail

// An EF1 feasible complete allocation if one exists, a definitive negative
// otherwise. Cheap constructions are tried before the exhaustive search.
inline std::optional<Allocation> ef1_exists(const Instance& inst,
                                            const SearchBudget& budget = {}) {
    auto comps = detail::component_masks(inst, full_mask(inst.n_items));
    bool small_components = true;
    for (ItemMask comp : comps)
        if (popcount(comp) > inst.n_agents) small_components = false;
    if (small_components) {
        Allocation a = component_ef1(inst);
        if (is_ef1(inst, a)) return a;
    }
    if (inst.n_agents > inst.max_degree()) {
        for (std::uint64_t s = 0; s < 8; ++s) {
            Allocation a = randomized_allocation(inst, derive_seed(0x5eedULL, s)).first;
            if (is_ef1(inst, a)) return a;
        }
    }
    detail::Ef1Search search(inst, budget);
    search.run(0);
    return search.witness;
}

// ---------------------------------------------------------------------------
// Constructive existence engine for approximate MMS allocations.

// Guarantee formula by instance shape. chi is the chromatic number, delta the
// max degree of the conflict graph. The chi = delta+1 improvement applies for
// delta >= 2 only; chi = 1 means an edgeless graph.
inline Rational existence_alpha(int n, int chi, int delta) {
    if (n <= 2) return 1;
    if (n == 3) return Rational(2, 3);
    if (chi == delta + 1 && delta >= 2) {
        if (chi < 7) return Rational(chi + 1, 3 * chi - 1);
        return Rational(chi - 1, 3 * chi - 6);
    }
    if (chi == 1) return Rational(n, 2 * n - 2);
    if (chi == 2) return Rational(n, 2 * n - 1);
    return Rational(chi, 3 * chi - 3);
}

namespace detail {

// Greedy maximal matching of agents to single items worth >= alpha*mu_i,
// lowest item index then lowest agent index, over positive-mu agents.
struct ThresholdMatch {
    std::vector<std::pair<int, int>> matched;  // (agent, item)
    std::vector<int> remaining_agents;
    ItemMask remaining_items = 0;
};

inline ThresholdMatch threshold_matching(const Instance& inst,
                                         const std::vector<int>& agents,
                                         const std::vector<Rational>& mu,
                                         const Rational& alpha) {
    ThresholdMatch res;
    res.remaining_items = full_mask(inst.n_items);
    std::vector<bool> active(inst.n_agents, false);
    for (int i : agents) active[i] = true;
    for (int j = 0; j < inst.n_items; ++j) {
        for (int i = 0; i < inst.n_agents; ++i) {
            if (!active[i] || inst.value(i, j) < alpha * mu[i]) continue;
            res.matched.emplace_back(i, j);
            active[i] = false;
            res.remaining_items &= ~(ItemMask{1} << j);
            break;
        }
    }
    for (int i : agents)
        if (active[i]) res.remaining_agents.push_back(i);
    return res;
}

// Restriction of an agent's stored MMS partition to the still-unallocated
// items, used as bag-filling sources.
inline std::vector<ItemSet> restrict_partition(const Allocation& partition, ItemMask keep) {
    std::vector<ItemSet> sources;
    for (const auto& b : partition.bundles) {
        ItemSet cut;
        for (int j : b)
            if (keep >> j & 1) cut.push_back(j);
        sources.push_back(std::move(cut));
    }
    return sources;
}

}  // namespace detail

struct ConstructResult {
    Rational alpha;       // achieved min_i v_i(A_i)/mu_i (1 if all mu zero)
    Rational guarantee;   // the formula value the construction promises
    Allocation alloc;
};

namespace detail {

// The n = 3 special construction: split the one bundle both non-owners value
// into two halves worth >= (2/3) mu each. Returns the two bundles, or
// nothing if the constructive cases fail their verification.
inline std::optional<std::pair<ItemSet, ItemSet>> split_for_two(
    const Instance& inst, int i, const Rational& mu_i,
    const std::vector<ItemSet>& sources, std::size_t k, BudgetClock& clock) {
    Rational need = Rational(2, 3) * mu_i;
    const ItemSet& ak = sources[k];
    auto value = [&](const ItemSet& s) { return inst.bundle_value(i, s); };

    auto check = [&](ItemSet b1, ItemSet b2) -> std::optional<std::pair<ItemSet, ItemSet>> {
        std::sort(b1.begin(), b1.end());
        std::sort(b2.begin(), b2.end());
        if (inst.independent(mask_of(b1)) && inst.independent(mask_of(b2)) &&
            value(b1) >= need && value(b2) >= need)
            return std::make_pair(b1, b2);
        return std::nullopt;
    };

    // descending-value greedy split of A_k alone
    {
        ItemSet by_value = ak;
        std::sort(by_value.begin(), by_value.end(), [&](int a, int b) {
            return inst.value(i, a) != inst.value(i, b) ? inst.value(i, a) > inst.value(i, b)
                                                        : a < b;
        });
        ItemSet b1, b2;
        for (int j : by_value)
            (value(b1) < need ? b1 : b2).push_back(j);
        if (auto r = check(b1, b2)) return r;
    }
    // two top items vs the rest
    if (ak.size() >= 2) {
        ItemSet by_value = ak;
        std::sort(by_value.begin(), by_value.end(), [&](int a, int b) {
            return inst.value(i, a) != inst.value(i, b) ? inst.value(i, a) > inst.value(i, b)
                                                        : a < b;
        });
        int j = by_value[0], j2 = by_value[1];
        ItemSet rest;
        for (int t : ak)
            if (t != j && t != j2) rest.push_back(t);
        if (auto r = check(rest, {j, j2})) return r;
        // borrow non-conflicting items from another source to back up j
        for (std::size_t k2 = 0; k2 < sources.size(); ++k2) {
            if (k2 == k) continue;
            ItemSet b1{j};
            for (int t : sources[k2])
                if (!(inst.conflicts[j] >> t & 1)) b1.push_back(t);
            ItemSet b2;
            for (int t : ak)
                if (t != j) b2.push_back(t);
            if (auto r = check(b1, b2)) return r;
        }
        // a valuable neighbor of j completes one of the halves
        for (int j3 = 0; j3 < inst.n_items; ++j3) {
            if (!(inst.conflicts[j] >> j3 & 1)) continue;
            bool in_sources = false;
            for (const auto& s : sources)
                if (std::find(s.begin(), s.end(), j3) != s.end()) in_sources = true;
            if (!in_sources) continue;
            ItemSet b2;
            for (int t : ak)
                if (t != j2) b2.push_back(t);
            if (auto r = check({j2, j3}, b2)) return r;
            ItemSet b1{j3};
            for (int t : rest) b1.push_back(t);
            if (auto r = check(b1, {j, j2})) return r;
        }
    }
    // exhaustive fallback: label A_k plus one optional helper source
    for (std::size_t k2 = 0; k2 <= sources.size(); ++k2) {
        if (k2 < sources.size() && k2 == k) continue;
        ItemSet pool = ak;
        std::size_t fixed = ak.size();  // items of A_k may not go unused
        if (k2 < sources.size())
            for (int t : sources[k2]) pool.push_back(t);
        std::vector<int> label(pool.size(), 0);
        ItemSet b1, b2;
        std::function<std::optional<std::pair<ItemSet, ItemSet>>(std::size_t)> rec =
            [&](std::size_t p) -> std::optional<std::pair<ItemSet, ItemSet>> {
            clock.tick();
            if (p == pool.size()) return check(b1, b2);
            for (int c = 0; c < 3; ++c) {
                if (c == 2 && p < fixed) continue;
                if (c == 0) b1.push_back(pool[p]);
                if (c == 1) b2.push_back(pool[p]);
                auto r = rec(p + 1);
                if (c == 0) b1.pop_back();
                if (c == 1) b2.pop_back();
                if (r) return r;
            }
            return std::nullopt;
        };
        if (auto r = rec(0)) return r;
    }
    return std::nullopt;
}

}  // namespace detail

// Constructive alpha-approximate MMS allocation for n > Delta(G), following
// the existence proof: strip single items worth >= alpha*mu_i by a greedy
// matching, then serve the remaining agents by case analysis on n' against
// the chromatic number, bag filling over restricted MMS partitions and a
// minimum coloring. Uses exact chromatic number and exact maximin shares, so
// it is a desk-scale routine.
inline ConstructResult construct_alpha_mms(const Instance& inst, const MmsProfile& mms,
                                           const SearchBudget& budget = {}) {
    int n = inst.n_agents, delta = inst.max_degree();
    if (n <= delta) throw PreconditionViolated("construct_alpha_mms requires n > Delta(G)");
    if (mms.infeasible) throw InfeasibleInstance();
    detail::BudgetClock clock(budget);

    std::vector<int> positive;
    for (int i = 0; i < n; ++i)
        if (mms.mu[i] > 0) positive.push_back(i);

    Allocation partial = Allocation::empty(n);
    auto finish = [&]() {
        ConstructResult res;
        res.alloc = complete_partial(inst, partial);
        res.alpha = alpha_mms(inst, res.alloc, mms);
        return res;
    };

    if (positive.empty()) {
        ConstructResult res = finish();
        res.guarantee = 1;
        return res;
    }

    int chi = chromatic_number_exact(inst, budget);
    Rational alpha = existence_alpha(n, chi, delta);

    if (n == 1) {
        for (int j = 0; j < inst.n_items; ++j) partial.bundles[0].push_back(j);
        ConstructResult res = finish();
        res.guarantee = 1;
        return res;
    }
    if (n == 2) {
        // one agent splits by its MMS partition, the other picks first
        const Allocation& part = mms.partitions[0];
        int pick = inst.bundle_value(1, part.bundles[0]) >= inst.bundle_value(1, part.bundles[1])
                       ? 0
                       : 1;
        partial.bundles[1] = part.bundles[pick];
        partial.bundles[0] = part.bundles[1 - pick];
        ConstructResult res = finish();
        res.guarantee = 1;
        return res;
    }

    detail::ThresholdMatch red = detail::threshold_matching(inst, positive, mms.mu, alpha);
    for (auto [i, j] : red.matched) partial.bundles[i].push_back(j);
    std::vector<int> left = red.remaining_agents;
    ItemMask items = red.remaining_items;
    int n_prime = static_cast<int>(left.size());

    auto untouched_bundle = [&](int agent) -> ItemSet {
        // a bundle of agent's MMS partition no matched item was taken from
        for (const auto& b : mms.partitions[agent].bundles) {
            bool intact = true;
            for (int j : b)
                if (!(items >> j & 1)) intact = false;
            if (intact && inst.bundle_value(agent, b) >= mms.mu[agent]) return b;
        }
        throw std::logic_error("no untouched bundle after reduction");
    };

    auto fill = [&](const std::vector<ItemSet>& sources, const std::vector<int>& agents,
                    int protect) {
        BagFillingInput in;
        in.agents = agents;
        for (int a : agents) in.limits.push_back(alpha * mms.mu[a]);
        in.sources = sources;
        in.protected_last = protect;
        BagFillingResult out = bag_filling(inst, in);
        std::vector<int> unserved = agents;
        for (const auto& [a, b] : out.assigned) {
            for (int j : b) {
                partial.bundles[a].push_back(j);
                items &= ~(ItemMask{1} << j);
            }
            unserved.erase(std::find(unserved.begin(), unserved.end(), a));
        }
        return unserved;
    };

    if (n_prime == 0) {
        ConstructResult res = finish();
        res.guarantee = alpha;
        return res;
    }
    if (n_prime == 1) {
        int i = left.front();
        for (int j : untouched_bundle(i)) {
            partial.bundles[i].push_back(j);
            items &= ~(ItemMask{1} << j);
        }
        ConstructResult res = finish();
        res.guarantee = alpha;
        return res;
    }

    if (n == 3 && n_prime == 3 && (chi == 2 || chi == 3)) {
        // both non-owners may value only one bundle of the owner's partition
        for (int owner = 0; owner < 3; ++owner) {
            const Allocation& part = mms.partitions[owner];
            int a1 = (owner + 1) % 3, a2 = (owner + 2) % 3;
            Rational need1 = Rational(2, 3) * mms.mu[a1];
            Rational need2 = Rational(2, 3) * mms.mu[a2];
            // distinct whole bundles for the two non-owners
            for (int k1 = 0; k1 < 3; ++k1)
                for (int k2 = 0; k2 < 3; ++k2) {
                    if (k1 == k2) continue;
                    if (inst.bundle_value(a1, part.bundles[k1]) < need1) continue;
                    if (inst.bundle_value(a2, part.bundles[k2]) < need2) continue;
                    partial.bundles[a1] = part.bundles[k1];
                    partial.bundles[a2] = part.bundles[k2];
                    partial.bundles[owner] = part.bundles[3 - k1 - k2];
                    ConstructResult res = finish();
                    res.guarantee = alpha;
                    return res;
                }
            // otherwise split the one bundle both agents want
            for (std::size_t k = 0; k < 3; ++k) {
                for (int splitter : {a1, a2}) {
                    auto halves = detail::split_for_two(
                        inst, splitter, mms.mu[splitter],
                        detail::restrict_partition(part, full_mask(inst.n_items)), k, clock);
                    if (!halves) continue;
                    int other = splitter == a1 ? a2 : a1;
                    Rational other_need = Rational(2, 3) * mms.mu[other];
                    const ItemSet& b1 = halves->first;
                    const ItemSet& b2 = halves->second;
                    int take = inst.bundle_value(other, b1) >= inst.bundle_value(other, b2)
                                   ? 1
                                   : 2;
                    const ItemSet& for_other = take == 1 ? b1 : b2;
                    const ItemSet& for_splitter = take == 1 ? b2 : b1;
                    if (inst.bundle_value(other, for_other) < other_need) continue;
                    ItemMask used = mask_of(for_other) | mask_of(for_splitter);
                    // the owner takes an intact bundle of its own partition
                    int keep = -1;
                    for (int k3 = 0; k3 < 3; ++k3)
                        if (!(mask_of(part.bundles[k3]) & used)) keep = k3;
                    if (keep < 0) continue;
                    partial.bundles[other] = for_other;
                    partial.bundles[splitter] = for_splitter;
                    partial.bundles[owner] = part.bundles[keep];
                    ConstructResult res = finish();
                    res.guarantee = alpha;
                    return res;
                }
            }
        }
        throw std::logic_error("n = 3 construction failed");
    }

    if (n_prime == delta + 1 && delta + 1 == chi) {
        // owner's partition is recomputed on the reduced instance
        int i = left.front();
        MmsSolo solo = mms_exact(inst, i, budget, n_prime, items);
        std::vector<int> others(left.begin() + 1, left.end());
        fill(detail::restrict_partition(solo.partition, items), others, -1);
        for (const auto& b : solo.partition.bundles) {
            bool intact = true;
            for (int j : b)
                if (!(items >> j & 1)) intact = false;
            if (intact && !b.empty()) {
                for (int j : b) {
                    partial.bundles[i].push_back(j);
                    items &= ~(ItemMask{1} << j);
                }
                break;
            }
        }
        ConstructResult res = finish();
        res.guarantee = alpha;
        return res;
    }

    if (n_prime >= chi) {
        int i = left.front();
        std::vector<int> unserved =
            fill(detail::restrict_partition(mms.partitions[i], items), left, i);
        if (!unserved.empty()) {
            Coloring col = chromatic_coloring(inst, items, budget);
            fill(col.classes(), unserved, -1);
        }
        ConstructResult res = finish();
        res.guarantee = alpha;
        return res;
    }

    // chi > n': repeated bag filling on per-agent restricted partitions
    {
        int i = left.front();
        std::vector<int> unserved =
            fill(detail::restrict_partition(mms.partitions[i], items), left, i);
        while (!unserved.empty()) {
            int next = unserved.front();
            std::vector<int> after =
                fill(detail::restrict_partition(mms.partitions[next], items), unserved, -1);
            if (after.size() == unserved.size())
                throw std::logic_error("bag filling made no progress");
            unserved = std::move(after);
        }
        ConstructResult res = finish();
        res.guarantee = alpha;
        return res;
    }
}

}  // namespace confair
