// ============================================================================
// golog.hpp — program expressions, transition semantics, realization
// ============================================================================
//
// Programs are the seven-construct expression trees (action, test, sequence,
// branch, pick, star, interleave); while/if arrive pre-expanded from the
// parser. A single transition step follows exactly one primitive action;
// tests gate sequencing through Final instead of stepping. Wait actions in a
// program carry no duration — the step relation instantiates them with the
// canonical time successors of the current valuation.
//
// Realization search runs the same worklist construction as reachability,
// with states refined by the remaining program; visited entries are compared
// by abstract state plus structural program identity, exactly as produced by
// the step relation (no nil-normalization of sequences).
// ============================================================================

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbat/reach.hpp"
#include "cbat/regions.hpp"
#include "cbat/world.hpp"

namespace cbat {

enum class PKind : uint8_t {
    Act,     // ground-or-pick-bound action; wait has no arguments
    Test,    // clocked situation-suppressed formula; Test(true) is nil
    Seq,
    Choice,  // nondeterministic branching
    Pick,    // nondeterministic choice of object argument
    Star,    // nondeterministic iteration
    Conc,    // interleaved concurrency
};

struct PNode;

class Program {
  public:
    Program() = default;

    static Program act(int32_t schema, std::vector<Term> args);
    static Program test(Formula f);
    static Program nil();  // Test(true)
    static Program seq(Program a, Program b);
    static Program choice(Program a, Program b);
    static Program pick(std::string var, Program body);
    static Program star(Program body);
    static Program conc(Program a, Program b);

    bool valid() const { return node_ != nullptr; }
    PKind kind() const;
    int32_t schema() const;
    const std::vector<Term>& args() const;
    const Formula& test_formula() const;
    const std::string& var() const;
    const Program& left() const;
    const Program& right() const;
    const SourceSpan& span() const;
    bool is_nil() const;

    Program with_span(SourceSpan s) const;
    size_t hash() const;
    bool operator==(const Program& other) const;  // structural; spans ignored

  private:
    explicit Program(std::shared_ptr<const PNode> n) : node_(std::move(n)) {}
    static Program make(PNode n);
    std::shared_ptr<const PNode> node_;
};

struct PNode {
    PKind kind = PKind::Test;
    int32_t schema = -1;     // Act
    std::vector<Term> args;  // Act
    Formula test;            // Test
    std::string var;         // Pick
    Program left, right;     // Seq/Choice/Conc: both; Pick/Star: left
    SourceSpan span;
    size_t hash = 0;
};

inline PKind Program::kind() const { return node_->kind; }
inline int32_t Program::schema() const { return node_->schema; }
inline const std::vector<Term>& Program::args() const { return node_->args; }
inline const Formula& Program::test_formula() const { return node_->test; }
inline const std::string& Program::var() const { return node_->var; }
inline const Program& Program::left() const { return node_->left; }
inline const Program& Program::right() const { return node_->right; }
inline const SourceSpan& Program::span() const { return node_->span; }
inline bool Program::is_nil() const {
    return node_->kind == PKind::Test && node_->test.is_true();
}
inline size_t Program::hash() const { return node_->hash; }

/// Grounds one pick variable.
Program program_subst(const Program& p, const std::string& var, int32_t obj);

/// Test formulas of a program, for the maximal-constant computation.
std::vector<Formula> program_tests(const Program& p);

/// Final(delta, s): the program may terminate in this state.
bool final_in(const GroundKit& kit, const Program& p, const WorldState& s);

struct TransStep {
    GroundAction act;
    Program rest;
    WorldState next;
};

/// All single-step transitions from (p, s); wait steps are instantiated with
/// the canonical time successors for the given K. Empty result = blocked.
std::vector<TransStep> trans_steps(const GroundKit& kit, const Program& p,
                                   const WorldState& s, uint32_t K);

class ProgramTransitionSystem {
  public:
    struct StateRec {
        AbstractState abs;
        Program remaining;
        WorldState world;
        bool final = false;
        uint32_t parent = UINT32_MAX;
        GroundAction via;
        uint32_t depth = 0;
    };
    struct Edge {
        uint32_t from;
        GroundAction label;
        uint32_t to;
    };

    const std::vector<StateRec>& states() const { return states_; }
    const std::vector<Edge>& edges() const { return edges_; }
    uint32_t initial() const { return 0; }
    uint32_t K() const { return k_; }

    /// Action labels along the discovery path to a state.
    std::vector<GroundAction> path_to(uint32_t id) const;

    std::string to_json(const BAT& bat) const;  // schema "absts-prog/1"

    friend class ProgramTsBuilder;

  private:
    std::vector<StateRec> states_;
    std::vector<Edge> edges_;
    uint32_t k_ = 0;
};

/// Full program transition system (Algorithm-2 style worklist).
ProgramTransitionSystem build_program_ts(const BAT& bat, const Program& p, uint32_t K,
                                         const BuildLimits& limits = {});

struct RealizationResult {
    std::optional<std::vector<GroundAction>> actions;
    uint64_t states_explored = 0;
    uint32_t K = 0;
};

/// Shortest action sequence driving the program to a final configuration, or
/// nullopt. K defaults to the maximal constant over the theory and the
/// program's tests.
RealizationResult find_realization(const BAT& bat, const Program& p,
                                   std::optional<uint32_t> K_override = std::nullopt,
                                   const BuildLimits& limits = {});

/// Independent check that a sequence is a realization: replays it step by
/// step through the transition relation and requires a final configuration.
bool replay_realization(const BAT& bat, const Program& p,
                        const std::vector<GroundAction>& actions, uint32_t K);

}  // namespace cbat
