// ============================================================================
// world.hpp — concrete state progression
// ============================================================================
//
// A WorldState is the complete concrete description of a situation: one truth
// bit per ground relational atom plus one exact rational per ground
// functional-fluent term. The GroundKit precompiles each axiom body per
// ground action (parameters substituted, action equalities resolved, constants
// folded) and advances states by direct SSA evaluation, so the reachability
// search evaluates each body once per step instead of regressing to S0.
// ============================================================================

#pragma once

#include <cstdint>
#include <vector>

#include "cbat/bat.hpp"

namespace cbat {

struct WorldState {
    std::vector<uint64_t> fluent_bits;
    std::vector<Rat> funcs;

    bool bit(size_t index) const {
        return (fluent_bits[index >> 6] >> (index & 63)) & 1;
    }
    void set_bit(size_t index, bool value) {
        uint64_t mask = uint64_t(1) << (index & 63);
        if (value)
            fluent_bits[index >> 6] |= mask;
        else
            fluent_bits[index >> 6] &= ~mask;
    }
    bool operator==(const WorldState& o) const {
        return fluent_bits == o.fluent_bits && funcs == o.funcs;
    }
};

class GroundKit {
  public:
    explicit GroundKit(const BAT& bat);

    const BAT& bat() const { return *bat_; }

    /// The complete initial state (clocks at zero; general theories use
    /// their declared initial values).
    WorldState initial() const;

    /// Evaluates a closed formula (possibly quantified) in a state. Action
    /// equalities must have been resolved beforehand.
    bool eval(const WorldState& s, const Formula& f) const;

    /// True iff the ground action's precondition holds (wait: always).
    bool possible(const WorldState& s, const GroundAction& a) const;

    /// Successor state. Wait advances every clock uniformly; any other
    /// action evaluates all SSA bodies and reset conditions on s.
    WorldState apply(const WorldState& s, const GroundAction& a) const;

    /// Replays a situation from the initial state without checking
    /// preconditions.
    WorldState run(const Situation& sigma) const;

    /// Ground non-wait actions in the canonical enumeration order, with the
    /// precompiled bodies indexed to match.
    const std::vector<GroundAction>& actions() const { return actions_; }

    const Formula& precondition(size_t action_index) const {
        return preconditions_[action_index];
    }

  private:
    const BAT* bat_;
    std::vector<GroundAction> actions_;
    std::vector<Formula> preconditions_;      // per action
    std::vector<std::vector<Formula>> ssa_;   // [action][fluent atom]
    std::vector<std::vector<Formula>> reset_; // [action][func term] (clocked)
    std::vector<std::vector<std::vector<NumCase>>> numcase_;  // [action][func]

    size_t action_key(const GroundAction& a) const;
};

}  // namespace cbat
