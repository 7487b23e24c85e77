#pragma once

#include <vector>

#include "reeb/rational.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

enum class PairKind { ordinary, extended, relative };

struct PersistencePoint {
    Rat birth, death;
    int dimension = 0; // 0 or 1
    PairKind kind = PairKind::ordinary;
};

/// Multiset of birth/death points.  Ordinary points satisfy birth <= death;
/// extended dimension-1 points are stored as (ascending birth, descending
/// death) and satisfy birth >= death.
struct PersistenceDiagram {
    std::vector<PersistencePoint> points;
};

struct ExtendedDiagrams {
    PersistenceDiagram dg0;    // all dimension-0 points (ordinary + extended)
    PersistenceDiagram exdg1;  // dimension-1 extended points, one per cycle
};

/// Extended persistence of the value function on the graph, by boundary
/// matrix reduction over the extended filtration: the ascending sublevel
/// sweep over vertices and edges followed by the descending superlevel sweep
/// in relative homology (cone construction).  Cells are ordered by value with
/// ties broken by dimension then id.  Zero-persistence points are dropped.
ExtendedDiagrams extended_diagrams(const ReebGraph& g);

/// Bottleneck distance between two diagrams: the least maximum infinity-norm
/// cost over partial matchings, where an unmatched point pays half its
/// persistence (its distance to the diagonal).  Exact: binary search over the
/// finite candidate cost set with bipartite-matching feasibility at each
/// candidate.  Callers restrict both diagrams to one (dimension, kind) class.
Rat bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b);

} // namespace reeb
