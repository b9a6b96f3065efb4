// ============================================================================
// encoders.hpp — machine encodings and the bounded simulator
// ============================================================================
//
// Executable forms of the reduction constructions: a two-counter machine
// compiles to a general action theory whose counters are numeric fluents
// (plain +1/-1 updates, or the time-bounded halving/doubling variant), and a
// diagonal-free timed automaton compiles to a clocked theory whose reachable
// final locations decide language emptiness. General theories are rejected
// by the clocked engine; the depth-bounded simulator here is the only thing
// that runs them.
// ============================================================================

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cbat/bat.hpp"
#include "cbat/world.hpp"

namespace cbat {

// ---------------------------------------------------------------------------
// two-counter machines
// ---------------------------------------------------------------------------

struct TwoCounterMachine {
    struct Inc {
        int counter = 1;  // 1 or 2
        std::string next;
    };
    struct Dec {
        int counter = 1;
        std::string next_pos;   // taken when the counter is positive
        std::string next_zero;  // taken otherwise
    };
    struct Halt {};
    using Instr = std::variant<Inc, Dec, Halt>;

    std::vector<std::pair<std::string, Instr>> instructions;  // file order

    const std::string& start() const { return instructions.front().first; }
    const Instr* find(const std::string& label) const;

    /// Structural validation: nonempty, unique labels, counters in {1,2},
    /// every goto target declared. Empty = valid.
    std::vector<std::string> validate() const;
};

struct Interp2cmResult {
    bool halted = false;
    uint64_t steps = 0;
    uint64_t c1 = 0, c2 = 0;
    std::vector<std::string> labels;  // executed instruction labels
};

/// Direct interpretation, the oracle the encodings are checked against.
Interp2cmResult interp_2cm(const TwoCounterMachine& m, uint64_t max_steps);

struct EncodedMachine {
    BAT bat;            // general theory; actions are the instruction labels
    Formula halt_query; // disjunction of next(h) over the halt labels
};

/// Counter-machine theory with +1/-1 counter updates and zero tests.
EncodedMachine encode_2cm(const TwoCounterMachine& m);

/// Time-bounded variant: a counter value u is carried as the fluent value
/// 2^(1-u); increments halve, decrements double, zero tests compare to 2.
EncodedMachine encode_2cm_bounded(const TwoCounterMachine& m);

// ---------------------------------------------------------------------------
// bounded simulation of general theories
// ---------------------------------------------------------------------------

enum class SimStop : uint8_t { DepthReached, Halted, Blocked };

struct SimTrace {
    WorldState initial;
    struct Step {
        GroundAction act;
        WorldState after;
    };
    std::vector<Step> steps;
    SimStop stop = SimStop::DepthReached;
};

/// Deterministic forward execution: each step takes the unique possible
/// action (the constructions guarantee uniqueness; anything else throws).
/// Stops when the halt query holds, when no action is possible, or at the
/// depth bound.
SimTrace simulate_general(const BAT& bat, uint64_t max_depth,
                          const Formula* halt_query = nullptr);

/// Replays an explicit action sequence, checking preconditions; stops
/// Blocked at the first impossible action.
SimTrace simulate_actions(const BAT& bat, const std::vector<GroundAction>& actions,
                          const Formula* halt_query = nullptr);

// ---------------------------------------------------------------------------
// timed automata
// ---------------------------------------------------------------------------

struct TAGuardAtom {
    std::string clock;
    CmpOp op = CmpOp::Ge;
    uint32_t bound = 0;  // diagonal-free: single clock against a natural
};

struct TASwitch {
    std::string from;
    std::string label;
    std::vector<TAGuardAtom> guard;   // conjunction; empty = true
    std::vector<std::string> resets;
    std::string to;
};

struct TimedAutomaton {
    std::vector<std::string> locations;
    std::string initial;
    std::vector<std::string> finals;
    std::vector<std::string> clocks;
    std::vector<TASwitch> switches;

    std::vector<std::string> validate() const;
};

struct EncodedTA {
    BAT bat;              // clocked; one action per switch, named sw<i>
    Formula final_query;  // disjunction of loc(l) over final locations
};

/// Locations become a relational fluent over location objects; each switch
/// becomes an action guarded by source location and clock constraints, and
/// the reset conditions cover its reset set. Language emptiness reduces to
/// reachability of the final query.
EncodedTA encode_ta(const TimedAutomaton& ta);

}  // namespace cbat
