#pragma once

// Small graph builders shared across test binaries.

#include "reeb/reeb_graph.hpp"

namespace reeb::testing {

/// Single monotone edge from value a to value b.
inline ReebGraph edge_graph(const Rat& a, const Rat& b) {
    ReebGraph g;
    g.vertices = {{0, a}, {1, b}};
    g.edges = {{0, 0, 1}};
    return g;
}

/// Two vertices joined by two parallel edges.
inline ReebGraph loop_graph(const Rat& a, const Rat& b) {
    ReebGraph g;
    g.vertices = {{0, a}, {1, b}};
    g.edges = {{0, 0, 1}, {1, 0, 1}};
    return g;
}

/// Edge a->m, then a double edge m->b ("lollipop").
inline ReebGraph lollipop_graph(const Rat& a, const Rat& m, const Rat& b) {
    ReebGraph g;
    g.vertices = {{0, a}, {1, m}, {2, b}};
    g.edges = {{0, 0, 1}, {1, 1, 2}, {2, 1, 2}};
    return g;
}

} // namespace reeb::testing
