// ============================================================================
// bat.hpp — basic action theories with clocks, ground actions, situations
// ============================================================================
//
// A BAT bundles the finite object domain, action schemas, relational fluents,
// rigid predicates and functional fluents together with the complete initial
// assignment, precondition axioms, successor state axioms and clock reset
// conditions. Clocked theories treat every functional fluent as a clock
// (zero-initialized, advanced by wait, reset by actions); general theories
// (used by the machine encodings) instead carry explicit numeric update
// axioms and are only accepted by the bounded simulator.
// ============================================================================

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbat/formula.hpp"
#include "cbat/rational.hpp"

namespace cbat {

struct ObjectConst {
    std::string name;
};

struct ActionSchema {
    std::string name;
    int arity = 0;
    bool is_wait = false;
};

struct PredDecl {
    std::string name;
    int arity = 0;
};

struct FuncDecl {
    std::string name;
    int arity = 0;
};

/// Ground action: object arguments for regular actions, an exact nonnegative
/// rational duration for wait.
struct GroundAction {
    int32_t schema = -1;
    std::vector<int32_t> args;
    std::optional<Rat> duration;

    bool operator==(const GroundAction& o) const {
        return schema == o.schema && args == o.args && duration == o.duration;
    }
};

/// A situation is a ground action history; empty = S0. Purely syntactic;
/// executability is a separate judgment.
struct Situation {
    std::vector<GroundAction> actions;

    bool empty() const { return actions.empty(); }
    Situation extended(GroundAction a) const {
        Situation s = *this;
        s.actions.push_back(std::move(a));
        return s;
    }
};

// Numeric update forms for general (non-clocked) theories. Exactly the forms
// the machine constructions need.
enum class NumUpdateKind : uint8_t { Keep, AddOne, SubOne, Half, Double, Const };

struct NumCase {
    Formula cond;  // over the action and the current state; first match wins
    NumUpdateKind update = NumUpdateKind::Keep;
    Rat value;  // Const only
};

struct NumSSA {
    std::vector<NumCase> cases;  // falls through to Keep
};

struct BAT {
    std::string name;
    bool general = false;

    std::vector<ObjectConst> objects;
    std::vector<ActionSchema> schemas;  // wait always present, always last
    int32_t wait_schema = -1;
    std::vector<PredDecl> fluents;
    std::vector<PredDecl> rigids;
    std::vector<FuncDecl> funcs;  // clocks (clocked) / numeric fluents (general)

    // Complete initial assignment: closed world over the listed true atoms.
    std::vector<bool> init_fluents;  // indexed by ground fluent atom
    std::vector<bool> init_rigids;   // indexed by ground rigid atom
    std::vector<Rat> init_funcs;     // general theories only; clocks start at 0

    // Axioms. Bodies reference their formal parameters as free variables;
    // param name lists run parallel to the body vectors.
    std::vector<Formula> preconditions;  // per schema; wait is fixed to true
    std::vector<std::vector<std::string>> precond_params;
    std::vector<Formula> ssas;  // per relational fluent
    std::vector<std::vector<std::string>> ssa_params;
    std::vector<Formula> resets;  // per functional fluent (clocked)
    std::vector<std::vector<std::string>> reset_params;
    std::vector<NumSSA> num_ssas;  // per functional fluent (general)

    // --- symbol lookup ---
    int32_t object_index(const std::string& n) const;
    int32_t schema_index(const std::string& n) const;
    int32_t fluent_index(const std::string& n) const;
    int32_t rigid_index(const std::string& n) const;
    int32_t func_index(const std::string& n) const;

    // --- ground atom indexing (mixed radix over object indices) ---
    size_t num_fluent_atoms() const;
    size_t num_rigid_atoms() const;
    size_t num_func_terms() const;
    size_t fluent_atom_index(int32_t fluent, const std::vector<int32_t>& args) const;
    size_t rigid_atom_index(int32_t pred, const std::vector<int32_t>& args) const;
    size_t func_term_index(int32_t func, const std::vector<int32_t>& args) const;
    // Inverse: (symbol, args) of a ground atom index.
    std::pair<int32_t, std::vector<int32_t>> fluent_atom_at(size_t index) const;
    std::pair<int32_t, std::vector<int32_t>> rigid_atom_at(size_t index) const;
    std::pair<int32_t, std::vector<int32_t>> func_term_at(size_t index) const;

    std::string fluent_atom_name(size_t index) const;
    std::string rigid_atom_name(size_t index) const;
    std::string func_term_name(size_t index) const;
    std::string action_str(const GroundAction& a) const;
    std::string situation_str(const Situation& s) const;

    GroundAction make_wait(Rat duration) const;
};

/// One Def-6 shape violation found by validate_bat.
struct Violation {
    int clause = 0;  // clocked-BAT definition clause, 0 = structural
    std::string symbol;
    std::string message;
};

/// Checks a parsed theory against the clocked-BAT shape: reset conditions
/// time-independent, precondition/SSA bodies clocked with natural bounds,
/// wait precondition fixed, complete initial assignment, name and arity
/// closure. Empty result = valid.
std::vector<Violation> validate_bat(const BAT& bat);

/// All ground non-wait actions, deterministic order: schemas in declaration
/// order, argument tuples lexicographic over object indices.
std::vector<GroundAction> ground_actions(const BAT& bat);

/// Maximal natural constant compared against any functional fluent across
/// preconditions, successor state axioms and the extra formulas; 0 if none.
uint32_t max_constant(const BAT& bat, const std::vector<Formula>& extra = {});

/// Structural well-formedness of a formula against a theory: symbol indices
/// and arities, action equality only where allowed, natural bounds where
/// required. Returns an error message or nullopt.
struct FormulaRules {
    bool allow_act_eq = false;
    bool require_natural_bounds = true;
};
std::optional<std::string> check_formula(const BAT& bat, const Formula& f,
                                         const FormulaRules& rules);

}  // namespace cbat
