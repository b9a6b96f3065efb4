// ============================================================================
// regions.hpp — clock regions and time successors
// ============================================================================
//
// Clock values live in [0, K] ∪ {TOP}: every value above the maximal constant
// K collapses into TOP. Two values are region-equivalent when both are TOP or
// both have equal floor and equal ceiling; valuations additionally have to
// agree on the ordering of fractional parts across all clock pairs. RegionKey
// is a canonical form of that equivalence: per-clock integer part (or TOP)
// and zero-fraction flag, plus the ordered partition of the non-TOP clocks by
// fractional part.
// ============================================================================

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbat/bat.hpp"
#include "cbat/world.hpp"

namespace cbat {

/// Total map from ground clock terms (canonical index order) to values.
using ClockValuation = std::vector<Rat>;

/// Fractional part with the TOP convention: v - floor(v) on [0, K], zero for
/// values above K.
Rat fract_capped(const Rat& v, uint32_t K);

/// Region equivalence of two single clock values.
bool values_equiv(const Rat& u, const Rat& v, uint32_t K);

/// Region equivalence of two valuations over the same clock set: pointwise
/// value equivalence plus agreement of the fractional-part ordering.
bool valuations_equiv(const ClockValuation& v1, const ClockValuation& v2, uint32_t K);

struct RegionKey {
    std::vector<int32_t> int_part;  // per clock; -1 encodes TOP
    std::vector<bool> zero_frac;    // per clock; fixed true for TOP
    std::vector<std::vector<uint32_t>> frac_blocks;  // nonzero-fraction clocks,
                                                     // ascending, grouped by equal fract

    bool operator==(const RegionKey& o) const {
        return int_part == o.int_part && zero_frac == o.zero_frac &&
               frac_blocks == o.frac_blocks;
    }
    size_t hash() const;
    std::string render(const BAT& bat) const;  // stable textual form
};

/// Canonical key: region_key(v1, K) == region_key(v2, K) iff
/// valuations_equiv(v1, v2, K).
RegionKey region_key(const ClockValuation& v, uint32_t K);

/// Fluent assignment plus region: the node identity of the time-abstract
/// transition system. Equality decides situation equivalence.
struct AbstractState {
    std::vector<uint64_t> fluent_bits;
    RegionKey region;

    bool operator==(const AbstractState& o) const {
        return fluent_bits == o.fluent_bits && region == o.region;
    }
    size_t hash() const;
};

/// Clock valuation of a situation: forward evaluation through the fixed
/// clock SSA shape (wait adds, other actions reset where the condition holds).
ClockValuation eval_clocks(const GroundKit& kit, const Situation& sigma);

AbstractState abstract_state_of(const GroundKit& kit, const WorldState& s, uint32_t K);
AbstractState abstract_state(const GroundKit& kit, const Situation& sigma, uint32_t K);

bool situations_equiv(const GroundKit& kit, const Situation& s1, const Situation& s2,
                      uint32_t K);

/// Canonical wait durations from a valuation: one representative per region
/// reachable by letting time pass, starting with 0 and ending strictly past
/// every K-boundary. Fractional parts are taken raw here (not capped), which
/// keeps the loop finite; completeness is covered by the time-successor
/// property tests.
std::vector<Rat> tsuccs(const ClockValuation& v, uint32_t K);

}  // namespace cbat

template <>
struct std::hash<cbat::AbstractState> {
    size_t operator()(const cbat::AbstractState& s) const { return s.hash(); }
};
