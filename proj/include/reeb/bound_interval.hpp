#pragma once

#include <string>

#include "reeb/rational.hpp"

namespace reeb {

/// Certified enclosure [lo, hi] of a distance value that cannot be computed
/// exactly, with the provenance of each bound.  `undecided` marks intervals
/// widened because a decision procedure ran out of budget; `unbounded` marks
/// an infinite distance (hi is then meaningless).
struct BoundInterval {
    Rat lo, hi;
    std::string lo_provenance, hi_provenance;
    bool undecided = false;
    bool unbounded = false;
};

} // namespace reeb
