#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reeb/bound_interval.hpp"
#include "reeb/rational.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// A map between graphs given by samples: a mesh over the source (nodes and
/// adjacent-node cells), a finite set of candidate target points, an
/// assignment of source nodes to target points, and, per source cell, an
/// explicit route (path of target points) joining the images of its ends.
/// Routes certify continuity; their heights enter the mesh error.
struct SubdividedMap {
    std::vector<GraphPoint> source_nodes;
    std::vector<std::pair<int, int>> source_cells;
    std::vector<GraphPoint> target_nodes;
    std::vector<int> assignment;          // source node -> target node index
    std::vector<std::vector<int>> routes; // per source cell: target node path
};

struct PairEvaluation {
    Rat distortion;  // max over sampled correspondence pairs of |d_f - d_g| / 2
    Rat sup_fg;      // max |f - g(phi(.))| over source samples of phi
    Rat sup_gf;
    Rat objective;   // max of the three, at the samples
    Rat mesh_error;  // certified slack: objective + mesh_error bounds the true
                     // objective of the continuous extension along the routes
    bool infinite_distortion = false; // a sampled pair is connected on one side only
};

/// Evaluates the functional distortion objective of an explicit map pair.
/// Throws std::invalid_argument when a route fails the continuity check
/// (consecutive route points not joinable within one edge) or refers to
/// missing points.
PairEvaluation evaluate_map_pair(const ReebGraph& X, const ReebGraph& Y,
                                 const SubdividedMap& phi, const SubdividedMap& psi);

/// Regular mesh over a graph: all vertices plus enough interior points on
/// each edge that every cell has height <= mesh_size.  Target fields are
/// left empty.
SubdividedMap mesh_skeleton(const ReebGraph& source, const Rat& mesh_size);

struct UpperBound {
    Rat hi;
    std::string provenance;
    bool infinite = false;
    SubdividedMap phi, psi; // the certifying pair
    PairEvaluation eval;
};

/// Certified upper bound on the functional distortion distance: the best
/// (objective + mesh_error) over explored map pairs.  Seeded with
/// value-matched assignments and a monotone-spine collapse, then improved by
/// randomized single-node reassignment with greedy acceptance; deterministic
/// per seed.  Isomorphic inputs short-circuit to an exact zero.
UpperBound distortion_upper_bound(const ReebGraph& X, const ReebGraph& Y, const Rat& mesh_size,
                                  int64_t budget, uint64_t seed);

struct LowerBound {
    Rat lo;
    std::string provenance;
    bool undecided = false; // the interleaving term ran out of budget and was dropped
    bool unbounded = false; // no finite distance exists (component counts differ)
};

/// Certified lower bound on the functional distortion distance: the largest
/// of bottleneck(Dg0), bottleneck(ExDg1)/3 and the interleaving lower bound.
LowerBound distortion_lower_bound(const ReebGraph& X, const ReebGraph& Y,
                                  const Rat& interleaving_tolerance = Rat(1, 1000),
                                  uint64_t interleaving_budget = 10000000);

} // namespace reeb
