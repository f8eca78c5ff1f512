#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "confair/generators.hpp"
#include "support.hpp"

using namespace confair;
using namespace confair::testing;

namespace {

bool simple(const std::vector<std::pair<int, int>>& edges, int m) {
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
        if (a == b || a < 0 || b < 0 || a >= m || b >= m) return false;
        auto e = std::minmax(a, b);
        if (!seen.insert({e.first, e.second}).second) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("gen_graph") {
    SECTION("ER extremes") {
        GenParams p;
        p.m = 6;
        p.p = 0.0;
        CHECK(gen_graph(GraphModel::erdos_renyi, p, 1).empty());
        p.p = 1.0;
        CHECK(gen_graph(GraphModel::erdos_renyi, p, 1).size() == 15);
    }
    SECTION("ER edge count concentrates around p*C(m,2)") {
        GenParams p;
        p.m = 12;
        p.p = 0.5;
        long total = 0;
        for (int t = 0; t < 200; ++t)
            total += gen_graph(GraphModel::erdos_renyi, p, derive_seed(7, t)).size();
        double mean = total / 200.0;
        CHECK(mean > 0.4 * 66);
        CHECK(mean < 0.6 * 66);
    }
    SECTION("WS with beta=0, d=2 is the cycle C_m") {
        GenParams p;
        p.m = 7;
        p.d = 2;
        p.beta = 0.0;
        auto edges = gen_graph(GraphModel::watts_strogatz, p, 3);
        std::vector<std::pair<int, int>> want = {{0, 1}, {1, 2}, {2, 3}, {3, 4},
                                                 {4, 5}, {5, 6}, {0, 6}};
        std::sort(edges.begin(), edges.end());
        std::sort(want.begin(), want.end());
        CHECK(edges == want);
    }
    SECTION("WS rewiring keeps the graph simple and the edge count fixed") {
        for (int t = 0; t < 50; ++t) {
            GenParams p;
            p.m = 10;
            p.d = 4;
            p.beta = 0.5;
            auto edges = gen_graph(GraphModel::watts_strogatz, p, derive_seed(11, t));
            CHECK(edges.size() == 20);
            CHECK(simple(edges, p.m));
        }
    }
    SECTION("BA edge count is exactly C(k,2) + k(m-k)") {
        for (int t = 0; t < 50; ++t) {
            GenParams p;
            p.m = 9;
            p.k = 1 + t % 9;
            auto edges = gen_graph(GraphModel::barabasi_albert, p, derive_seed(13, t));
            long k = p.k;
            CHECK(static_cast<long>(edges.size()) == k * (k - 1) / 2 + k * (p.m - k));
            CHECK(simple(edges, p.m));
        }
    }
    SECTION("determinism per seed") {
        GenParams p;
        p.m = 10;
        p.k = 3;
        CHECK(gen_graph(GraphModel::barabasi_albert, p, 99) ==
              gen_graph(GraphModel::barabasi_albert, p, 99));
        p.d = 4;
        p.beta = 0.3;
        CHECK(gen_graph(GraphModel::watts_strogatz, p, 99) ==
              gen_graph(GraphModel::watts_strogatz, p, 99));
    }
    SECTION("parameter validation") {
        GenParams p;
        p.m = 6;
        p.d = 3;
        CHECK_THROWS_AS(gen_graph(GraphModel::watts_strogatz, p, 1), PreconditionViolated);
        p.d = 6;
        CHECK_THROWS_AS(gen_graph(GraphModel::watts_strogatz, p, 1), PreconditionViolated);
        p.k = 0;
        CHECK_THROWS_AS(gen_graph(GraphModel::barabasi_albert, p, 1), PreconditionViolated);
        p.p = 1.5;
        CHECK_THROWS_AS(gen_graph(GraphModel::erdos_renyi, p, 1), PreconditionViolated);
    }
}

TEST_CASE("gen_valuations") {
    SECTION("single item gets all the points") {
        auto v = gen_valuations(3, 1, 1000, 5);
        for (int i = 0; i < 3; ++i) CHECK(v[i][0] == 1000);
    }
    SECTION("row sums are within rounding slack of the target") {
        for (int t = 0; t < 50; ++t) {
            int m = 4 + t % 10;
            auto v = gen_valuations(2, m, 1000, derive_seed(17, t));
            for (int i = 0; i < 2; ++i) {
                Rational sum = 0;
                for (const Rational& x : v[i]) {
                    CHECK(x >= 0);
                    CHECK(denominator(x) == 1);
                    sum += x;
                }
                CHECK(abs(sum - 1000) <= Rational(m, 2));
            }
        }
    }
    SECTION("fixed seed gives a bit-identical matrix") {
        CHECK(gen_valuations(4, 9, 1000, 23) == gen_valuations(4, 9, 1000, 23));
        CHECK(gen_valuations(4, 9, 1000, 23) != gen_valuations(4, 9, 1000, 24));
    }
}

TEST_CASE("gen_instances") {
    GenConfig cfg;
    cfg.target_count = 40;
    cfg.seed = 2024;
    cfg.n_max = 6;
    cfg.m_cap = 14;

    SECTION("rejection and quota rules per model") {
        for (GraphModel model : {GraphModel::erdos_renyi, GraphModel::barabasi_albert,
                                 GraphModel::watts_strogatz}) {
            cfg.model = model;
            auto recs = gen_instances(cfg);
            int quota = 0;
            for (const GenRecord& r : recs) {
                CHECK(r.inst.max_degree() < r.params.n);
                CHECK(r.params.n >= cfg.n_min);
                CHECK(r.params.n <= cfg.n_max);
                CHECK(r.params.m >= 2 * r.params.n);
                CHECK(r.params.m <= std::min(4 * r.params.n, cfg.m_cap));
                if (model == GraphModel::erdos_renyi) CHECK_FALSE(r.inst.edges.empty());
                GraphStats st = graph_stats(r.inst);
                CHECK(r.counts_quota == (r.params.n <= st.largest_component));
                if (r.counts_quota) ++quota;
            }
            CHECK(quota == cfg.target_count);
            CHECK(static_cast<int>(recs.size()) >= cfg.target_count);
            // ids are the emission order
            for (std::size_t i = 0; i < recs.size(); ++i)
                CHECK(recs[i].instance_id == static_cast<int>(i));
        }
    }
    SECTION("identical master seed reproduces the stream") {
        cfg.model = GraphModel::watts_strogatz;
        auto a = gen_instances(cfg);
        auto b = gen_instances(cfg);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].seed == b[i].seed);
            CHECK(a[i].inst.valuations == b[i].inst.valuations);
            CHECK(a[i].inst.edges == b[i].inst.edges);
        }
    }
    SECTION("config validation") {
        cfg.target_count = 0;
        CHECK_THROWS_AS(gen_instances(cfg), PreconditionViolated);
    }
}
