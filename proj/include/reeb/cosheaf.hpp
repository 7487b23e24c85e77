#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reeb/bound_interval.hpp"
#include "reeb/rational.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// Open interval on the line, possibly unbounded on either side.
struct Interval {
    bool lo_inf = false, hi_inf = false;
    Rat lo, hi;

    static Interval open(const Rat& a, const Rat& b) { return {false, false, a, b}; }
    static Interval below(const Rat& b) { return {true, false, Rat(0), b}; }
    static Interval above(const Rat& a) { return {false, true, a, Rat(0)}; }
    static Interval whole() { return {true, true, Rat(0), Rat(0)}; }

    bool empty() const { return !lo_inf && !hi_inf && !(lo < hi); }
    bool contains(const Rat& x) const {
        return (lo_inf || lo < x) && (hi_inf || x < hi);
    }
    /// Open-interval intersection test.
    bool meets(const Interval& o) const {
        if (empty() || o.empty()) return false;
        bool left_ok = lo_inf || o.hi_inf || lo < o.hi;
        bool right_ok = hi_inf || o.lo_inf || o.lo < hi;
        return left_ok && right_ok;
    }
    bool contains_interval(const Interval& o) const {
        if (o.empty()) return true;
        bool left_ok = lo_inf || (!o.lo_inf && !(o.lo < lo));
        bool right_ok = hi_inf || (!o.hi_inf && !(hi < o.hi));
        return left_ok && right_ok;
    }
    Interval thicken(const Rat& eps) const {
        Interval t = *this;
        if (!lo_inf) t.lo = lo - eps;
        if (!hi_inf) t.hi = hi + eps;
        return t;
    }
};

/// Finite encoding of the interval-indexed components functor of a Reeb
/// graph: critical values, component sets over the open strata between them
/// and over a small window around each critical value, and the maps induced
/// by interval inclusion.
///
/// Indexing: `critical[0..m-1]` sorted strictly; stratum i (0..m) lies over
/// (critical[i-1], critical[i]) with the obvious unbounded conventions; band
/// j (0..m-1) sits at critical[j] over (critical[j-1], critical[j+1]).
/// `up_map[j]` sends stratum j's elements into band j (induced by inclusion
/// from below); `down_map[j]` sends stratum j+1's elements into band j.
struct ConstructibleCosheaf {
    std::vector<Rat> critical;
    std::vector<int> stratum_size;            // size m+1; first and last are 0
    std::vector<int> band_size;               // size m
    std::vector<std::vector<int>> up_map;     // [j]: stratum j  -> band j
    std::vector<std::vector<int>> down_map;   // [j]: stratum j+1 -> band j

    int criticals() const { return (int)critical.size(); }
    Interval stratum_interval(int i) const;
    Interval band_interval(int j) const;

    /// Structural well-formedness (sizes, empty outer strata, map ranges).
    /// Throws std::invalid_argument on violation.
    void check() const;
};

/// The cosheaf associated to a canonical Reeb graph.
ConstructibleCosheaf cosheaf_of(const ReebGraph& g);

/// Components of the cosheaf over an arbitrary open interval: the cell graph
/// spanned by strata elements over strata meeting the interval and band
/// elements at critical values inside it, glued along the up/down maps.
/// Stores enough to corestrict into any evaluation over a superinterval.
struct Evaluation {
    Interval interval;
    int n_components = 0;
    // Linear cell-element ids over the cosheaf: strata first (by stratum,
    // then element), then bands.  -1 = cell element absent from the interval.
    std::vector<int> comp_of;
    std::vector<int> exemplar; // per component: smallest member cell-element id

    int component_of_stratum_elem(const ConstructibleCosheaf& cs, int i, int k) const;
    int component_of_band_elem(const ConstructibleCosheaf& cs, int j, int k) const;
};

Evaluation evaluate(const ConstructibleCosheaf& cs, const Interval& I);

/// Component map induced by the inclusion from.interval <= to.interval.
std::vector<int> corestrict(const ConstructibleCosheaf& cs, const Evaluation& from,
                            const Evaluation& to);

/// The shifted cosheaf, whose value on every interval I equals the value of
/// `cs` on the thickened interval.  Critical candidates are critical +/- eps;
/// candidates whose flanking maps are both bijections are pruned.
ConstructibleCosheaf shift(const ConstructibleCosheaf& cs, const Rat& eps);

/// Inverse of cosheaf_of: one vertex per band element, one edge per stratum
/// element, canonicalized.  Throws std::invalid_argument if an outer stratum
/// is nonempty (no attachment on one side).
ReebGraph realize(const ConstructibleCosheaf& cs);

enum class Decision { yes, no, undecided };

/// Witness for a decided interleaving: the two families of component maps on
/// the atomic cells of the common refinement grid.  Replayable via
/// verify_certificate.
struct InterleavingCertificate {
    Rat epsilon;
    std::vector<Rat> grid;
    std::vector<std::vector<int>> phi_strata, phi_bands; // F-cells  -> shifted-G cells
    std::vector<std::vector<int>> psi_strata, psi_bands; // G-cells  -> shifted-F cells
};

struct InterleavingDecision {
    Decision outcome = Decision::undecided;
    std::optional<InterleavingCertificate> certificate;
    uint64_t nodes = 0; // search nodes spent
};

/// Decides exactly whether an eps-interleaving exists between the two
/// cosheaves.  Works on the common refinement of the critical sets and their
/// +/-eps, +/-2eps translates; candidate component maps are enumerated with
/// backtracking, pruned by the naturality squares, and accepted only when
/// both composites equal the inclusion-induced maps.  `budget` caps the
/// number of search nodes; exceeding it yields Decision::undecided.
InterleavingDecision decide_interleaving(const ConstructibleCosheaf& F,
                                         const ConstructibleCosheaf& G, const Rat& eps,
                                         uint64_t budget = 10000000);

/// Replays a certificate against the two cosheaves: rebuilds the refinement,
/// checks every naturality square and both composite conditions.
bool verify_certificate(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                        const InterleavingCertificate& cert);

/// Certified enclosure of the interleaving distance: lo is the largest probed
/// eps that answered no, hi the smallest that answered yes; bisection stops
/// when hi - lo <= tolerance.  Seeds the probe set with the pairwise critical
/// gaps and their halves.  An undecided probe stops refinement and flags the
/// interval; graphs with different component counts admit no interleaving at
/// any eps and come back unbounded.
BoundInterval interleaving_bounds(const ConstructibleCosheaf& F,
                                  const ConstructibleCosheaf& G, const Rat& tolerance,
                                  uint64_t budget = 10000000);

} // namespace reeb
