// ============================================================================
// regression.hpp — clock-aware regression and entailment at S0
// ============================================================================
//
// regress() rewrites a situation-suppressed query about do([a1..an], S0) into
// an equivalent formula about S0 alone: relational atoms step through their
// SSA bodies, clock comparisons subtract wait durations from the bound or
// branch on the reset condition. No simplification happens beyond folding of
// ground constants, so bounds may turn rational or negative on the way; they
// collapse to truth values only at S0, where every clock is zero.
// ============================================================================

#pragma once

#include <optional>
#include <string>

#include "cbat/bat.hpp"

namespace cbat {

/// Failed regressability item, per the numbered definition.
struct RegressabilityViolation {
    int item = 0;
    std::string message;
};

/// Checks the regressability conditions that are expressible over the closed
/// AST: ground well-formed action sequences (item 2), clock atoms comparing a
/// clock term to a rational (item 3), no free variables, symbols resolvable.
std::optional<RegressabilityViolation> check_regressable(const BAT& bat,
                                                         const Formula& phi,
                                                         const Situation& sigma);

/// One regression step through the last action of the situation.
Formula regress_step(const BAT& bat, const Formula& phi, const GroundAction& act);

/// Full regression to a formula uniform in S0.
Formula regress(const BAT& bat, const Formula& phi, const Situation& sigma);

/// Decides D0 |= psi for a formula uniform in S0: object quantifiers ground
/// over the finite domain, clock comparisons fold against zero, atoms look up
/// the complete initial assignment.
bool entails_initial(const BAT& bat, const Formula& psi);

/// D |= phi[sigma] via regression (Theorem 4 route). Throws
/// std::invalid_argument if phi is not regressable.
bool holds(const BAT& bat, const Formula& phi, const Situation& sigma);

/// D |= Poss(act)[sigma]: substitutes the precondition body and regresses.
bool holds_poss(const BAT& bat, const GroundAction& act, const Situation& sigma);

}  // namespace cbat
