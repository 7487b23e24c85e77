#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reeb/persistence.hpp"

using namespace reeb;
using namespace reeb::testing;

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

PersistenceDiagram diagram_of(std::initializer_list<std::pair<Rat, Rat>> pts, int dim = 0,
                              PairKind kind = PairKind::ordinary) {
    PersistenceDiagram d;
    for (const auto& [b, dd] : pts) d.points.push_back({b, dd, dim, kind});
    return d;
}

} // namespace

TEST_CASE("extended diagrams of a single edge") {
    auto [dg0, exdg1] = extended_diagrams(edge_graph(Rat(0), Rat(1)));
    REQUIRE(dg0.points.size() == 1);
    CHECK(dg0.points[0].birth == Rat(0));
    CHECK(dg0.points[0].death == Rat(1));
    CHECK(dg0.points[0].kind == PairKind::extended);
    CHECK(exdg1.points.empty());
}

TEST_CASE("extended diagrams of the loop graph") {
    auto [dg0, exdg1] = extended_diagrams(loop_graph(Rat(0), Rat(1)));
    REQUIRE(dg0.points.size() == 1);
    CHECK(dg0.points[0].birth == Rat(0));
    CHECK(dg0.points[0].death == Rat(1));
    CHECK(dg0.points[0].kind == PairKind::extended);
    REQUIRE(exdg1.points.size() == 1);
    CHECK(exdg1.points[0].birth == Rat(1));  // cycle completes at the top, ascending
    CHECK(exdg1.points[0].death == Rat(0));  // and dies at the bottom, descending
    CHECK(exdg1.points[0].dimension == 1);
}

TEST_CASE("extended diagrams of a disjoint union are componentwise") {
    ReebGraph g;
    g.vertices = {{0, Rat(0)}, {1, Rat(1)}, {2, Rat(0)}, {3, Rat(2)}};
    g.edges = {{0, 0, 1}, {1, 2, 3}};
    auto [dg0, exdg1] = extended_diagrams(g);
    REQUIRE(dg0.points.size() == 2);
    std::vector<Rat> deaths{dg0.points[0].death, dg0.points[1].death};
    std::sort(deaths.begin(), deaths.end());
    CHECK(deaths[0] == Rat(1));
    CHECK(deaths[1] == Rat(2));
    CHECK(dg0.points[0].birth == Rat(0));
    CHECK(dg0.points[1].birth == Rat(0));
    CHECK(exdg1.points.empty());
}

TEST_CASE("ordinary dimension-0 points record merge events") {
    // Y-shape: leaves at 0 and 0.25 joining at 0.5, continuing to 1
    ReebGraph g;
    g.vertices = {{0, Rat(0)}, {1, Rat(1, 4)}, {2, Rat(1, 2)}, {3, Rat(1)}};
    g.edges = {{0, 0, 2}, {1, 1, 2}, {2, 2, 3}};
    auto [dg0, exdg1] = extended_diagrams(g);
    CHECK(exdg1.points.empty());
    REQUIRE(dg0.points.size() == 2);
    int ord = -1, ext = -1;
    for (int i = 0; i < 2; ++i)
        (dg0.points[i].kind == PairKind::ordinary ? ord : ext) = i;
    REQUIRE(ord >= 0);
    REQUIRE(ext >= 0);
    CHECK(dg0.points[ord].birth == Rat(1, 4)); // younger branch
    CHECK(dg0.points[ord].death == Rat(1, 2)); // dies at the merge
    CHECK(dg0.points[ext].birth == Rat(0));
    CHECK(dg0.points[ext].death == Rat(1));
}

TEST_CASE("diagram count invariants on random graphs") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 25; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 8, 2);
        auto [dg0, exdg1] = extended_diagrams(g);
        int64_t ext0 = 0;
        for (const auto& p : dg0.points)
            if (p.kind == PairKind::extended) ++ext0;
        CHECK(ext0 == g.component_count());
        CHECK((int64_t)exdg1.points.size() == g.first_betti());
        for (const auto& p : dg0.points) CHECK(p.birth <= p.death);
        for (const auto& p : exdg1.points) CHECK(p.birth >= p.death);
    }
}

TEST_CASE("shift equivariance: translating values translates diagrams") {
    std::mt19937_64 rng(505);
    Rat c(3, 7);
    auto translate = [&](ReebGraph g) {
        for (auto& v : g.vertices) v.value += c;
        return g;
    };
    for (int trial = 0; trial < 10; ++trial) {
        ReebGraph g = random_canonical_graph(rng, 7, 2);
        ReebGraph h = translate(g);
        auto dg = extended_diagrams(g);
        auto dh = extended_diagrams(h);
        REQUIRE(dg.dg0.points.size() == dh.dg0.points.size());
        REQUIRE(dg.exdg1.points.size() == dh.exdg1.points.size());
        auto key = [](const PersistencePoint& p) { return std::make_pair(p.birth, p.death); };
        auto sorted = [&](PersistenceDiagram d) {
            std::sort(d.points.begin(), d.points.end(),
                      [&](const auto& a, const auto& b) { return key(a) < key(b); });
            return d;
        };
        auto sg = sorted(dg.dg0), sh = sorted(dh.dg0);
        for (size_t i = 0; i < sg.points.size(); ++i) {
            CHECK(sg.points[i].birth + c == sh.points[i].birth);
            CHECK(sg.points[i].death + c == sh.points[i].death);
        }
        // distances between correspondingly translated diagrams are unchanged
        ReebGraph g2 = random_canonical_graph(rng, 7, 2);
        ReebGraph h2 = translate(g2);
        auto dg2 = extended_diagrams(g2);
        auto dh2 = extended_diagrams(h2);
        CHECK(bottleneck_distance(dg.dg0, dg2.dg0) == bottleneck_distance(dh.dg0, dh2.dg0));
        CHECK(bottleneck_distance(dg.exdg1, dg2.exdg1) ==
              bottleneck_distance(dh.exdg1, dh2.exdg1));
    }
}

TEST_CASE("bottleneck: identity and simple landmarks") {
    auto d = diagram_of({{Rat(0), Rat(1)}, {Rat(1, 2), Rat(3, 4)}});
    CHECK(bottleneck_distance(d, d) == Rat(0));
    // {(1,0)} vs empty: only option is the diagonal at half persistence
    auto cyc = diagram_of({{Rat(1), Rat(0)}}, 1, PairKind::extended);
    CHECK(bottleneck_distance(cyc, PersistenceDiagram{}) == Rat(1, 2));
    // {(0,1)} vs {(0,2)}: pairing costs 1, double-diagonal costs max(1/2, 1) = 1
    CHECK(bottleneck_distance(diagram_of({{Rat(0), Rat(1)}}), diagram_of({{Rat(0), Rat(2)}})) ==
          Rat(1));
    CHECK(bottleneck_distance(PersistenceDiagram{}, PersistenceDiagram{}) == Rat(0));
}

TEST_CASE("bottleneck agrees with brute force on random small diagrams") {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 60; ++trial) {
        auto rand_diagram = [&](int maxn) {
            PersistenceDiagram d;
            int n = (int)pick(rng, maxn + 1);
            for (int i = 0; i < n; ++i) {
                Rat b((int64_t)pick(rng, 16), 8);
                Rat dd = b + Rat((int64_t)pick(rng, 12), 8);
                d.points.push_back({b, dd, 0, PairKind::ordinary});
            }
            return d;
        };
        auto A = rand_diagram(5), B = rand_diagram(5);
        std::vector<DiagramPoint> oa, ob;
        for (const auto& p : A.points) oa.push_back({p.birth, p.death});
        for (const auto& p : B.points) ob.push_back({p.birth, p.death});
        CHECK(bottleneck_distance(A, B) == bottleneck_by_bruteforce(oa, ob));
    }
}

TEST_CASE("bottleneck is a metric on small random diagrams") {
    std::mt19937_64 rng(707);
    std::vector<PersistenceDiagram> ds;
    for (int i = 0; i < 6; ++i) {
        PersistenceDiagram d;
        int n = 1 + (int)pick(rng, 4);
        for (int k = 0; k < n; ++k) {
            Rat b((int64_t)pick(rng, 10), 4);
            d.points.push_back({b, b + Rat((int64_t)pick(rng, 8) + 1, 4), 0, PairKind::ordinary});
        }
        ds.push_back(d);
    }
    for (size_t i = 0; i < ds.size(); ++i) {
        CHECK(bottleneck_distance(ds[i], ds[i]) == Rat(0));
        for (size_t j = 0; j < ds.size(); ++j) {
            Rat dij = bottleneck_distance(ds[i], ds[j]);
            CHECK(dij == bottleneck_distance(ds[j], ds[i]));
            for (size_t k = 0; k < ds.size(); ++k)
                CHECK(bottleneck_distance(ds[i], ds[k]) <=
                      dij + bottleneck_distance(ds[j], ds[k]));
        }
    }
}
