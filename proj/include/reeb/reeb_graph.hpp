#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "reeb/rational.hpp"

namespace reeb {

using VertexId = int64_t;
using EdgeId = int64_t;

/// Finite multigraph with real vertex values and strictly monotone edges.
/// The function on the underlying space is given by vertex values and linear
/// interpolation along edges.  Parallel edges are allowed and distinguished
/// by edge id; the graph need not be connected.
struct ReebGraph {
    struct Vertex {
        VertexId id;
        Rat value;
    };
    struct Edge {
        EdgeId id;
        VertexId lower; // value(lower) < value(upper), strictly
        VertexId upper;
    };

    std::vector<Vertex> vertices;
    std::vector<Edge> edges;

    const Vertex* find_vertex(VertexId id) const;
    const Edge* find_edge(EdgeId id) const;
    Rat value_of(VertexId id) const;

    Rat min_value() const; // throws on empty graph
    Rat max_value() const;

    size_t in_degree(VertexId id) const;
    size_t out_degree(VertexId id) const;
    int64_t component_count() const;
    /// edges - vertices + components; the number of independent cycles.
    int64_t first_betti() const;
};

/// A point of the underlying space: either a vertex, or an interior point of
/// an edge at parameter s in (0,1).  Its value is
/// (1-s)*value(lower) + s*value(upper).
struct GraphPoint {
    bool on_edge = false;
    VertexId vertex = 0;
    EdgeId edge = 0;
    Rat param; // in (0,1) when on_edge

    static GraphPoint at_vertex(VertexId v) { return {false, v, 0, Rat(0)}; }
    static GraphPoint on(EdgeId e, Rat s) { return {true, 0, e, s}; }

    bool operator==(const GraphPoint& o) const {
        return on_edge == o.on_edge &&
               (on_edge ? (edge == o.edge && param == o.param) : vertex == o.vertex);
    }
};

Rat value_at(const ReebGraph& g, const GraphPoint& p);
bool point_exists(const ReebGraph& g, const GraphPoint& p);

struct Violation {
    std::string rule; // "duplicate-vertex-id", "non-monotone edge", "dangling reference", "self-loop"
    std::string message;
    int64_t offending_id;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks all ReebGraph invariants on arbitrary candidate data.
/// Violations are data, not failures.
ValidationReport validate(const ReebGraph& g);

struct CanonicalizeResult {
    ReebGraph graph;
    std::vector<std::string> warnings;
};

/// Canonical form: contracts zero-height edges (accepted in the input even
/// though validate flags them), removes regular vertices with exactly one
/// incoming and one outgoing edge by merging their two edges, and renumbers
/// ids deterministically (vertices by value then original id, edges by
/// endpoint order).  Idempotent.  A zero-height edge whose endpoints were
/// already merged collapses entirely; this is reported as a warning.
CanonicalizeResult canonicalize(const ReebGraph& g);

struct Isomorphism {
    std::unordered_map<VertexId, VertexId> vertex_map;
    std::unordered_map<EdgeId, EdgeId> edge_map;
};

struct IsoResult {
    bool isomorphic = false;
    std::optional<Isomorphism> witness;
};

/// Function-preserving isomorphism test between canonical graphs: a bijection
/// of vertices and edges preserving incidence, orientation and vertex values
/// up to `value_tolerance` (absolute).  Backtracking restricted to
/// value-compatible candidates; returns a witness correspondence on success.
IsoResult is_isomorphic(const ReebGraph& a, const ReebGraph& b,
                        const Rat& value_tolerance = Rat(1, 1000000000));

/// Number of points of the underlying space at a given level: vertices with
/// that exact value plus edges whose open span contains it.
int64_t points_at_level(const ReebGraph& g, const Rat& level);

} // namespace reeb
