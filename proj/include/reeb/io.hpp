#pragma once

#include <string>
#include <string_view>

#include "reeb/cosheaf.hpp"
#include "reeb/distortion.hpp"
#include "reeb/persistence.hpp"
#include "reeb/pl_complex.hpp" // ParseError
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// `.reeb` text format: '#' comments, `v <id> <value>`, `e <lower-id>
/// <upper-id>`.  Edge ids are assigned in line order; repeated `e` lines
/// create parallel edges.  Files whose edges violate strict monotonicity are
/// rejected with a ParseError.
ReebGraph read_reeb(std::string_view text);
std::string write_reeb(const ReebGraph& g);

ReebGraph load_reeb_file(const std::string& path);
void save_file(const std::string& path, const std::string& contents);
std::string load_file(const std::string& path);

/// Diagram JSON: {"points":[{"dim":0,"kind":"ext","birth":0.0,"death":1.0},...]}
/// kind is "ord", "ext" or "rel".  Values are written as decimal numbers and
/// parsed back exactly through their shortest round-trip representation.
std::string write_diagrams_json(const ExtendedDiagrams& d);
PersistenceDiagram read_diagram_json(std::string_view text);

/// Selects one (dimension, kind) class: "dim0" (all dimension-0 points) or
/// "ext1" (dimension-1 extended points).
PersistenceDiagram select_class(const PersistenceDiagram& d, const std::string& cls);

/// Interleaving certificate JSON (cell-indexed map tables, exact values).
std::string write_certificate_json(const InterleavingCertificate& cert);
InterleavingCertificate read_certificate_json(std::string_view text);

/// Map-pair JSON for distortion certificates.
std::string write_map_pair_json(const ReebGraph& X, const ReebGraph& Y, const SubdividedMap& phi,
                                const SubdividedMap& psi, const PairEvaluation& eval);

/// Exact rational from a double through its shortest decimal representation.
Rat rat_from_double(double x);

} // namespace reeb
