#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reeb/bound_interval.hpp"
#include "reeb/rational.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// Deterministic random canonical graph: n_vertices distinct values drawn
/// from the 1/4096 grid on (0,1), an increasing spanning tree (every
/// non-minimal vertex attaches to a uniformly chosen lower vertex), and
/// n_loops extra edges between distinct vertices.  Throws on infeasible
/// parameters.
ReebGraph generate_random_reeb(int n_vertices, int n_loops, uint64_t seed);

/// One row of the inequality-sandwich experiment over a pair of graphs.
/// All checks compare certified interval endpoints in the falsifiable
/// direction, with an absolute slack of 1e-9.
struct SandwichRow {
    std::string pair_id;
    BoundInterval dI;  // interleaving distance enclosure
    BoundInterval dFD; // functional distortion enclosure
    Rat dB0, dB1;      // bottleneck distances of the two diagram classes
    bool c1 = false;   // dI_lo  <= dFD_hi
    bool c2 = false;   // dFD_lo <= 7 dI_hi
    bool c3 = false;   // dB0    <= dFD_hi
    bool c4 = false;   // dB1    <= 3 dFD_hi
    bool c5 = false;   // dB0 <= 7 dI_hi  and  dB1 <= 21 dI_hi
    std::string status; // "ok" or "undecided"
    uint64_t seed = 0;
    int64_t ms_dI = 0, ms_dFD = 0, ms_dB = 0;

    bool all_checks() const { return c1 && c2 && c3 && c4 && c5; }
};

struct SandwichParams {
    Rat tolerance = Rat(1, 1000); // interleaving enclosure width
    Rat mesh = Rat(1, 4);
    int64_t budget = 200;              // local-search moves for the upper bound
    uint64_t decide_budget = 10000000; // interleaving search nodes
    uint64_t seed = 0;
    bool timed = true; // false zeroes the runtime columns (with --no-timestamp)
};

/// Runs the full experiment on explicit pairs.  Rows are ordered by pair
/// index; per-row computation is deterministic given the parameters.
std::vector<SandwichRow> sandwich_report(const std::vector<std::pair<ReebGraph, ReebGraph>>& pairs,
                                         const SandwichParams& params);

/// Fixed-column CSV; when `timestamp` is set a '# generated ...' header line
/// is prepended (suppressing it makes reruns byte-identical).
std::string sandwich_csv(const std::vector<SandwichRow>& rows, bool timestamp);

/// JSON sidecar with bound provenances; falsified rows carry full
/// certificates (interleaving map tables and the distortion map pair).
std::string sandwich_json(const std::vector<SandwichRow>& rows,
                          const std::vector<std::pair<ReebGraph, ReebGraph>>& pairs,
                          const SandwichParams& params);

bool has_falsification(const std::vector<SandwichRow>& rows);
bool has_undecided(const std::vector<SandwichRow>& rows);

} // namespace reeb
