#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reeb/smoothing.hpp"

using namespace reeb;
using namespace reeb::testing;

TEST_CASE("smoothing an edge stretches it") {
    auto g = smooth(edge_graph(Rat(0), Rat(1)), Rat(1, 4));
    CHECK(is_isomorphic(g, edge_graph(Rat(-1, 4), Rat(5, 4))).isomorphic);
}

TEST_CASE("smoothing the loop graph pinches the loop") {
    auto g = smooth(loop_graph(Rat(0), Rat(1)), Rat(1, 4));
    // edge -1/4 -> 1/4, double edge 1/4 -> 3/4, edge 3/4 -> 5/4
    ReebGraph expect;
    expect.vertices = {{0, Rat(-1, 4)}, {1, Rat(1, 4)}, {2, Rat(3, 4)}, {3, Rat(5, 4)}};
    expect.edges = {{0, 0, 1}, {1, 1, 2}, {2, 1, 2}, {3, 2, 3}};
    CHECK(is_isomorphic(g, expect).isomorphic);
    // oracle cross-check at distinguishing levels
    CHECK(fiber_components_oracle(loop_graph(Rat(0), Rat(1)), Rat(1, 4), Rat(-1, 10)).count() == 1);
    CHECK(fiber_components_oracle(loop_graph(Rat(0), Rat(1)), Rat(1, 4), Rat(1, 2)).count() == 2);
    CHECK(fiber_components_oracle(loop_graph(Rat(0), Rat(1)), Rat(1, 4), Rat(11, 10)).count() == 1);
}

TEST_CASE("smoothing by zero is the identity up to isomorphism") {
    for (const ReebGraph& g : {edge_graph(Rat(0), Rat(1)), loop_graph(Rat(0), Rat(1)),
                               lollipop_graph(Rat(0), Rat(1), Rat(2))})
        CHECK(is_isomorphic(smooth(g, Rat(0)), canonicalize(g).graph).isomorphic);
}

TEST_CASE("negative epsilon is rejected") {
    CHECK_THROWS_AS(smooth(edge_graph(Rat(0), Rat(1)), Rat(-1, 10)), std::invalid_argument);
}

TEST_CASE("fiber oracle: loop graph windows") {
    auto loop = loop_graph(Rat(0), Rat(1));
    auto two = fiber_components_oracle(loop, Rat(1, 4), Rat(1, 2));
    REQUIRE(two.count() == 2);
    CHECK(two.components[0].edges.size() == 1);
    CHECK(two.components[1].edges.size() == 1);
    // window [−0.15, 0.35] reaches the minimum: one component
    auto one = fiber_components_oracle(loop, Rat(1, 4), Rat(1, 10));
    REQUIRE(one.count() == 1);
    CHECK(one.components[0].vertices.size() == 1);
    CHECK(one.components[0].edges.size() == 2);
}

TEST_CASE("fiber oracle: isolated vertex at epsilon zero") {
    ReebGraph g;
    g.vertices = {{0, Rat(0)}, {1, Rat(1)}, {2, Rat(5)}};
    g.edges = {{0, 0, 1}};
    auto res = fiber_components_oracle(g, Rat(0), Rat(5));
    REQUIRE(res.count() == 1);
    REQUIRE(res.components[0].vertices.size() == 1);
    CHECK(res.components[0].vertices[0] == 2);
}

namespace {

ReebGraph random_canonical_graph(std::mt19937_64& rng, int max_v, int max_loops) {
    int n = 2 + (int)pick(rng, max_v - 1);
    ReebGraph g;
    std::set<int64_t> used;
    for (int i = 0; i < n; ++i) {
        int64_t grid;
        do {
            grid = 1 + (int64_t)pick(rng, 1023);
        } while (!used.insert(grid).second);
        g.vertices.push_back({i, Rat(grid, 1024)});
    }
    std::sort(g.vertices.begin(), g.vertices.end(),
              [](const auto& a, const auto& b) { return a.value < b.value; });
    for (int i = 0; i < n; ++i) g.vertices[i].id = i;
    EdgeId e = 0;
    for (int i = 1; i < n; ++i) g.edges.push_back({e++, (VertexId)pick(rng, i), i});
    int loops = (int)pick(rng, max_loops + 1);
    for (int l = 0; l < loops; ++l) {
        int i = (int)pick(rng, n), j = (int)pick(rng, n);
        if (i == j) continue;
        if (g.vertices[i].value > g.vertices[j].value) std::swap(i, j);
        g.edges.push_back({e++, i, j});
    }
    return canonicalize(g).graph;
}

std::vector<Rat> probe_levels(const ReebGraph& g) {
    std::vector<Rat> vals;
    for (const auto& v : g.vertices) vals.push_back(v.value);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    std::vector<Rat> probes;
    probes.push_back(vals.front() - Rat(1, 7));
    for (size_t i = 0; i + 1 < vals.size(); ++i)
        probes.push_back((vals[i] + vals[i + 1]) / Rat(2));
    for (const Rat& v : vals) probes.push_back(v);
    probes.push_back(vals.back() + Rat(1, 7));
    return probes;
}

} // namespace

TEST_CASE("fiber identity: points of smooth(G,eps) at a level match the oracle") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 6, 2);
        for (const Rat& eps : {Rat(1, 4), Rat(3, 10)}) {
            ReebGraph s = smooth(g, eps);
            for (const Rat& a : probe_levels(s)) {
                auto oracle = fiber_components_oracle(g, eps, a);
                CHECK(points_at_level(s, a) == oracle.count());
            }
        }
    }
}

TEST_CASE("semigroup law: smoothing twice equals smoothing once by the sum") {
    std::mt19937_64 rng(515);
    for (int trial = 0; trial < 8; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 6, 2);
        for (auto [e1, e2] : {std::pair(Rat(1, 10), Rat(1, 10)), std::pair(Rat(1, 10), Rat(1, 5))}) {
            ReebGraph a = smooth(smooth(g, e1), e2);
            ReebGraph b = smooth(g, e1 + e2);
            CHECK(is_isomorphic(a, b).isomorphic);
        }
    }
}

TEST_CASE("semigroup law composes across longer chains") {
    std::mt19937_64 rng(909);
    for (int trial = 0; trial < 4; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 5, 2);
        ReebGraph chained = g;
        for (int step = 0; step < 4; ++step) chained = smooth(chained, Rat(1, 10));
        CHECK(is_isomorphic(chained, smooth(g, Rat(2, 5))).isomorphic);
    }
}

TEST_CASE("loop attenuation: loops shrink by 2 epsilon and vanish at half height") {
    for (int h = 1; h <= 4; ++h) {
        Rat height(h, 4);
        auto loop = loop_graph(Rat(0), height);
        for (const Rat& eps : {Rat(1, 10), Rat(1, 5), Rat(3, 10), Rat(1, 4)}) {
            ReebGraph s = smooth(loop, eps);
            if (height > eps * Rat(2)) {
                CHECK(s.first_betti() == 1);
                // the surviving loop spans [eps, height - eps]
                Rat lo = eps, hi = height - eps;
                ReebGraph expect;
                expect.vertices = {{0, -eps}, {1, lo}, {2, hi}, {3, height + eps}};
                expect.edges = {{0, 0, 1}, {1, 1, 2}, {2, 1, 2}, {3, 2, 3}};
                CHECK(is_isomorphic(s, expect).isomorphic);
            } else {
                CHECK(s.first_betti() == 0);
                CHECK(is_isomorphic(s, edge_graph(-eps, height + eps)).isomorphic);
            }
        }
    }
}

TEST_CASE("range dilation: min and max move out by epsilon") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 7, 2);
        Rat eps(1, 8);
        ReebGraph s = smooth(g, eps);
        CHECK(s.min_value() == g.min_value() - eps);
        CHECK(s.max_value() == g.max_value() + eps);
    }
}

TEST_CASE("diagonal choice in the prism split does not matter") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 6, 2);
        Rat eps(1, 5);
        ReebGraph a = reeb_of_complex(smoothing_complex(g, eps, false));
        ReebGraph b = reeb_of_complex(smoothing_complex(g, eps, true));
        CHECK(is_isomorphic(a, b).isomorphic);
    }
}

TEST_CASE("smoothing a single vertex gives a vertical edge") {
    ReebGraph g;
    g.vertices = {{0, Rat(1, 2)}};
    ReebGraph s = smooth(g, Rat(1, 4));
    CHECK(is_isomorphic(s, edge_graph(Rat(1, 4), Rat(3, 4))).isomorphic);
}

TEST_CASE("smoothing keeps disjoint components disjoint") {
    ReebGraph g;
    g.vertices = {{0, Rat(0)}, {1, Rat(1)}, {2, Rat(5)}};
    g.edges = {{0, 0, 1}};
    ReebGraph s = smooth(g, Rat(1, 4));
    CHECK(s.component_count() == 2);
    ReebGraph expect;
    expect.vertices = {{0, Rat(-1, 4)}, {1, Rat(5, 4)}, {2, Rat(19, 4)}, {3, Rat(21, 4)}};
    expect.edges = {{0, 0, 1}, {1, 2, 3}};
    CHECK(is_isomorphic(s, expect).isomorphic);
}
