#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reeb/intrinsic_metric.hpp"

using namespace reeb;
using namespace reeb::testing;

TEST_CASE("distance from a point to itself is zero") {
    auto g = loop_graph(Rat(0), Rat(1));
    auto p = GraphPoint::on(0, Rat(1, 3));
    CHECK(path_height_distance(g, p, p) == Rat(0));
}

TEST_CASE("endpoints of an edge are one height apart") {
    auto g = edge_graph(Rat(0), Rat(1));
    auto d = path_height_distance(g, GraphPoint::at_vertex(0), GraphPoint::at_vertex(1));
    CHECK(d == Rat(1));
}

TEST_CASE("midpoints of the two loop sides sit half a height apart") {
    auto g = loop_graph(Rat(0), Rat(1));
    auto p = GraphPoint::on(0, Rat(1, 2));
    auto q = GraphPoint::on(1, Rat(1, 2));
    auto d = path_height_distance(g, p, q);
    CHECK(d == Rat(1, 2));
    CHECK(min_height_by_enumeration(g, p, q) == Rat(1, 2));
}

TEST_CASE("points in different components are reported disconnected") {
    ReebGraph g;
    g.vertices = {{0, Rat(0)}, {1, Rat(1)}, {2, Rat(2)}, {3, Rat(3)}};
    g.edges = {{0, 0, 1}, {1, 2, 3}};
    auto d = path_height_distance(g, GraphPoint::at_vertex(0), GraphPoint::at_vertex(3));
    CHECK_FALSE(d.has_value());
}

TEST_CASE("invalid points are rejected") {
    auto g = edge_graph(Rat(0), Rat(1));
    CHECK_THROWS_AS(
        path_height_distance(g, GraphPoint::at_vertex(9), GraphPoint::at_vertex(0)),
        std::invalid_argument);
    CHECK_THROWS_AS(
        path_height_distance(g, GraphPoint::on(0, Rat(2)), GraphPoint::at_vertex(0)),
        std::invalid_argument);
}

TEST_CASE("two points on one edge are their value gap apart") {
    auto g = edge_graph(Rat(0), Rat(2));
    auto d = path_height_distance(g, GraphPoint::on(0, Rat(1, 4)), GraphPoint::on(0, Rat(3, 4)));
    CHECK(d == Rat(1));
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

std::vector<GraphPoint> vertex_and_midpoint_samples(const ReebGraph& g) {
    std::vector<GraphPoint> pts;
    for (const auto& v : g.vertices) pts.push_back(GraphPoint::at_vertex(v.id));
    for (const auto& e : g.edges) pts.push_back(GraphPoint::on(e.id, Rat(1, 2)));
    return pts;
}

} // namespace

TEST_CASE("interval algorithm equals exhaustive path enumeration on small graphs") {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 6, 2);
        auto pts = vertex_and_midpoint_samples(g);
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i; j < pts.size(); ++j) {
                auto fast = path_height_distance(g, pts[i], pts[j]);
                auto slow = min_height_by_enumeration(g, pts[i], pts[j]);
                CHECK(fast.has_value() == slow.has_value());
                if (fast && slow) CHECK(*fast == *slow);
            }
    }
}

TEST_CASE("pseudo-metric axioms and the value-gap lower bound on sampled triples") {
    std::mt19937_64 rng(607);
    for (int trial = 0; trial < 10; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 6, 1);
        auto pts = vertex_and_midpoint_samples(g);
        auto m = path_height_matrix(g, pts);
        size_t n = pts.size();
        for (size_t i = 0; i < n; ++i) {
            CHECK(m[i][i] == Rat(0));
            for (size_t j = 0; j < n; ++j) {
                CHECK(m[i][j].has_value() == m[j][i].has_value());
                if (!m[i][j]) continue;
                CHECK(*m[i][j] == *m[j][i]);
                CHECK(*m[i][j] >= (value_at(g, pts[i]) - value_at(g, pts[j])).abs());
                for (size_t k = 0; k < n; ++k)
                    if (m[j][k] && m[i][k])
                        CHECK(*m[i][k] <= *m[i][j] + *m[j][k]);
            }
        }
    }
}

TEST_CASE("matrix agrees with the pairwise routine") {
    std::mt19937_64 rng(608);
    for (int trial = 0; trial < 6; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 5, 2);
        auto pts = vertex_and_midpoint_samples(g);
        auto m = path_height_matrix(g, pts);
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = 0; j < pts.size(); ++j) {
                auto d = path_height_distance(g, pts[i], pts[j]);
                CHECK(d.has_value() == m[i][j].has_value());
                if (d) CHECK(*d == *m[i][j]);
            }
    }
}
