#pragma once

// Random instance generation: Erdos-Renyi, Barabasi-Albert and Watts-Strogatz
// conflict graphs with uniformly sampled parameters, plus point-splitting
// valuations. Everything is deterministic given the seeds.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "confair/errors.hpp"
#include "confair/graph.hpp"
#include "confair/model.hpp"
#include "confair/rng.hpp"

namespace confair {

enum class GraphModel { erdos_renyi, barabasi_albert, watts_strogatz };

inline const char* model_name(GraphModel m) {
    switch (m) {
        case GraphModel::erdos_renyi: return "er";
        case GraphModel::barabasi_albert: return "ba";
        case GraphModel::watts_strogatz: return "ws";
    }
    throw PreconditionViolated("unknown graph model");
}

inline GraphModel parse_model(const std::string& s) {
    if (s == "er" || s == "erdos_renyi") return GraphModel::erdos_renyi;
    if (s == "ba" || s == "barabasi_albert") return GraphModel::barabasi_albert;
    if (s == "ws" || s == "watts_strogatz") return GraphModel::watts_strogatz;
    throw PreconditionViolated("unknown graph model: " + s);
}

// Sampled parameters for one graph. Only the fields relevant to the model are
// meaningful: p for ER, k for BA, d and beta for WS.
struct GenParams {
    int n = 0;
    int m = 0;
    double p = 0;
    int k = 0;
    int d = 0;
    double beta = 0;
};

struct GenConfig {
    GraphModel model = GraphModel::erdos_renyi;
    int target_count = 1;     // quota of instances with n <= CC(G)
    std::uint64_t seed = 0;
    int n_min = 2, n_max = 10;   // m is sampled in [2n, min(4n, m_cap)]
    int m_cap = 40;
    int value_points = 1000;
};

inline void validate_config(const GenConfig& cfg) {
    if (cfg.target_count <= 0) throw PreconditionViolated("target_count must be positive");
    if (cfg.n_min < 2 || cfg.n_max > 10 || cfg.n_min > cfg.n_max)
        throw PreconditionViolated("agent count range must sit inside [2, 10]");
    if (cfg.m_cap < 2 * cfg.n_min) throw PreconditionViolated("m_cap below the smallest item count");
    if (cfg.value_points < 1) throw PreconditionViolated("value_points must be positive");
}

namespace detail {

inline std::vector<std::pair<int, int>> gen_er(int m, double p, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            if (rng.bernoulli(p)) edges.emplace_back(a, b);
    return edges;
}

// Seed k-clique, then each later vertex attaches k edges by preferential
// attachment (degree-proportional, distinct targets, uniform while all
// degrees are zero).
inline std::vector<std::pair<int, int>> gen_ba(int m, int k, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    std::vector<int> deg(m, 0);
    int seed_size = std::min(k, m);
    for (int a = 0; a < seed_size; ++a)
        for (int b = a + 1; b < seed_size; ++b) {
            edges.emplace_back(a, b);
            ++deg[a];
            ++deg[b];
        }
    for (int v = seed_size; v < m; ++v) {
        std::vector<int> targets;
        long total = 0;
        for (int u = 0; u < v; ++u) total += deg[u];
        while (static_cast<int>(targets.size()) < std::min(k, v)) {
            int pick;
            if (total == 0) {
                pick = static_cast<int>(rng.uniform_index(v));
            } else {
                long r = static_cast<long>(rng.uniform_index(static_cast<std::size_t>(total)));
                pick = 0;
                while (r >= deg[pick]) r -= deg[pick++];
            }
            if (std::find(targets.begin(), targets.end(), pick) != targets.end()) continue;
            targets.push_back(pick);
        }
        for (int u : targets) {
            edges.emplace_back(u, v);
            ++deg[u];
            ++deg[v];
            total += 1;  // only the old endpoint counts for later picks of this v
        }
    }
    return edges;
}

// Ring lattice of even degree d, then each edge rewired with probability beta.
// The far endpoint moves to a uniform vertex avoiding loops and duplicates.
inline std::vector<std::pair<int, int>> gen_ws(int m, int d, double beta, Rng& rng) {
    auto key = [m](int a, int b) { return static_cast<long>(std::min(a, b)) * m + std::max(a, b); };
    std::vector<std::pair<int, int>> edges;
    std::vector<long> present;
    auto has = [&](int a, int b) {
        return std::find(present.begin(), present.end(), key(a, b)) != present.end();
    };
    for (int j = 1; j <= d / 2; ++j)
        for (int u = 0; u < m; ++u) {
            int v = (u + j) % m;
            if (u == v || has(u, v)) continue;
            edges.emplace_back(u, v);
            present.push_back(key(u, v));
        }
    for (auto& [u, v] : edges) {
        if (!rng.bernoulli(beta)) continue;
        // collect admissible replacements first so the choice is uniform
        std::vector<int> options;
        for (int w = 0; w < m; ++w)
            if (w != u && w != v && !has(u, w)) options.push_back(w);
        if (options.empty()) continue;
        int w = options[rng.uniform_index(options.size())];
        present.erase(std::find(present.begin(), present.end(), key(u, v)));
        present.push_back(key(u, w));
        v = w;
    }
    for (auto& [u, v] : edges)
        if (u > v) std::swap(u, v);
    return edges;
}

}  // namespace detail

inline std::vector<std::pair<int, int>> gen_graph(GraphModel model, const GenParams& params,
                                                  std::uint64_t seed) {
    int m = params.m;
    if (m < 1) throw PreconditionViolated("need at least one item");
    Rng rng(seed);
    switch (model) {
        case GraphModel::erdos_renyi:
            if (!(params.p >= 0.0 && params.p <= 1.0))
                throw PreconditionViolated("edge probability outside [0, 1]");
            return detail::gen_er(m, params.p, rng);
        case GraphModel::barabasi_albert:
            if (params.k < 1 || params.k > m)
                throw PreconditionViolated("attachment count outside [1, m]");
            return detail::gen_ba(m, params.k, rng);
        case GraphModel::watts_strogatz:
            if (params.d < 2 || params.d % 2 != 0 || params.d >= m)
                throw PreconditionViolated("ring degree must be even, >= 2 and < m");
            if (!(params.beta >= 0.0 && params.beta < 1.0))
                throw PreconditionViolated("rewiring probability outside [0, 1)");
            return detail::gen_ws(m, params.d, params.beta, rng);
    }
    throw PreconditionViolated("unknown graph model");
}

// Per agent: m uniform reals scaled to sum value_points, each entry rounded to
// the nearest integer. Row sums can be off by up to m/2 points.
inline std::vector<std::vector<Rational>> gen_valuations(int n, int m, int value_points,
                                                         std::uint64_t seed) {
    if (n < 1 || m < 1) throw PreconditionViolated("need at least one agent and one item");
    Rng rng(seed);
    std::vector<std::vector<Rational>> vals(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> raw(m);
        double total = 0;
        do {
            total = 0;
            for (double& x : raw) {
                x = rng.uniform_real01();
                total += x;
            }
        } while (total == 0);
        for (int j = 0; j < m; ++j)
            vals[i].push_back(Rational(std::llround(raw[j] / total * value_points)));
    }
    return vals;
}

struct GenRecord {
    int instance_id = 0;          // position in the emitted stream
    GraphModel model = GraphModel::erdos_renyi;
    GenParams params;
    std::uint64_t seed = 0;       // per-attempt seed the instance was built from
    bool counts_quota = false;    // n <= CC(G)
    Instance inst{0, 0};
};

// Uniform parameter draw per the configured ranges.
inline GenParams sample_params(const GenConfig& cfg, Rng& rng) {
    GenParams p;
    p.n = cfg.n_min + static_cast<int>(rng.uniform_index(cfg.n_max - cfg.n_min + 1));
    int m_lo = 2 * p.n, m_hi = std::min(4 * p.n, cfg.m_cap);
    if (m_hi < m_lo) m_hi = m_lo;
    p.m = m_lo + static_cast<int>(rng.uniform_index(m_hi - m_lo + 1));
    switch (cfg.model) {
        case GraphModel::erdos_renyi:
            do { p.p = rng.uniform_real01(); } while (p.p == 0.0);
            break;
        case GraphModel::barabasi_albert:
            p.k = 1 + static_cast<int>(rng.uniform_index(p.m));
            break;
        case GraphModel::watts_strogatz: {
            int half = p.m / 2;
            int d_max = std::max(2, half - half % 2);  // largest even value <= m/2
            p.d = 2 * (1 + static_cast<int>(rng.uniform_index(d_max / 2)));
            p.beta = rng.uniform_real01();
            break;
        }
    }
    return p;
}

// Rejection loop: discard edgeless ER graphs and any graph with max degree
// >= n; emit every survivor but count only those with n <= CC(G) toward the
// quota.
template <typename Emit>
void gen_instances(const GenConfig& cfg, Emit&& emit) {
    validate_config(cfg);
    int quota = 0, emitted = 0;
    for (std::uint64_t attempt = 0; quota < cfg.target_count; ++attempt) {
        std::uint64_t attempt_seed = derive_seed(cfg.seed, attempt);
        Rng rng(attempt_seed);
        GenParams params = sample_params(cfg, rng);
        auto edges = gen_graph(cfg.model, params, derive_seed(attempt_seed, 1));
        if (cfg.model == GraphModel::erdos_renyi && edges.empty()) continue;
        GenRecord rec;
        rec.model = cfg.model;
        rec.params = params;
        rec.seed = attempt_seed;
        rec.inst = validate_instance(
            params.n, params.m,
            gen_valuations(params.n, params.m, cfg.value_points, derive_seed(attempt_seed, 2)),
            std::move(edges));
        if (rec.inst.max_degree() >= params.n) continue;
        GraphStats stats = graph_stats(rec.inst);
        rec.counts_quota = params.n <= stats.largest_component;
        if (rec.counts_quota) ++quota;
        rec.instance_id = emitted++;
        emit(rec);
    }
}

inline std::vector<GenRecord> gen_instances(const GenConfig& cfg) {
    std::vector<GenRecord> out;
    gen_instances(cfg, [&](const GenRecord& r) { out.push_back(r); });
    return out;
}

}  // namespace confair
