#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reeb/rational.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// Simplicial complex of dimension <= 2 with a vertex-valued function,
/// extended linearly over edges and triangles.  Face-closed: every
/// triangle's edges and every edge's vertices are present.
struct PLComplex {
    struct Vertex {
        VertexId id;
        Rat value;
    };
    std::vector<Vertex> vertices;
    std::vector<std::pair<VertexId, VertexId>> edges;               // unordered pairs
    std::vector<std::array<VertexId, 3>> triangles;                 // unordered triples

    const Vertex* find_vertex(VertexId id) const;
    Rat value_of(VertexId id) const;
};

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(int l, int c, const std::string& what)
        : std::runtime_error("line " + std::to_string(l) + ", column " +
                             std::to_string(c) + ": " + what),
          line(l), column(c) {}
};

enum class FaceClosure {
    strict,  // a triangle whose edges are not declared is an error
    lenient, // missing faces are completed automatically
};

/// Parses the `.plc` format: '#' comments, `v <id> <value>`, `f <i> <j>`,
/// `t <i> <j> <k>`.  Throws ParseError with line/column on malformed input,
/// duplicate simplices, dangling references, or (in strict mode) missing
/// faces.
PLComplex parse_complex(std::string_view text, FaceClosure mode = FaceClosure::strict);

std::string write_complex(const PLComplex& k);

/// Reeb graph of the complex: two points are equivalent iff they lie in the
/// same path component of a level set.  Sweeps the distinct vertex values in
/// ascending order; at each event the connectivity of the surrounding band
/// and of the slab above is recomputed from scratch over the crossing
/// simplices (union-find), which keeps the construction exact and oracle-
/// checkable.  Output is canonical.
ReebGraph reeb_of_complex(const PLComplex& k);

} // namespace reeb
