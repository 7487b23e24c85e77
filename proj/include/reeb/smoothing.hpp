#pragma once

#include <vector>

#include "reeb/pl_complex.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// Thickens the graph into a prism complex (each edge becomes a quad split
/// into two triangles, each vertex a vertical edge, with corner values
/// value +/- epsilon) and takes its Reeb graph.  The function on the
/// thickened space is affine on every prism cell, so the sweep over the
/// triangulation is exact; any quad diagonal yields the same result, and the
/// (lower-lower, upper-upper) one is used for determinism.  epsilon = 0
/// returns a canonical copy.
ReebGraph smooth(const ReebGraph& g, const Rat& epsilon);

/// The prism complex itself, exposed so tests can compare diagonal choices.
PLComplex smoothing_complex(const ReebGraph& g, const Rat& epsilon, bool flip_diagonal = false);

struct FiberComponent {
    std::vector<VertexId> vertices;
    std::vector<EdgeId> edges;
};

struct FiberComponents {
    std::vector<FiberComponent> components;
    int64_t count() const { return (int64_t)components.size(); }
};

/// Path components of the preimage of [level - epsilon, level + epsilon] in
/// the graph, computed directly by union-find over the truncated graph.
/// This is the fiber of the smoothed graph over `level`, used as an
/// independent cross-check of smooth().
FiberComponents fiber_components_oracle(const ReebGraph& g, const Rat& epsilon, const Rat& level);

} // namespace reeb
