// ============================================================================
// dsl.hpp — text formats: theories, formulas, programs, machines, automata
// ============================================================================
//
// Block-structured theory files mirror the axiom classes one to one:
//
//   bat coffee {
//     objects { Pot, Mug1, Mug2 }
//     rigids  { wantStrong/1 }
//     actions { sBrew/1, eBrew/1, sPour/2, ePour/2 }
//     fluents { brew/1, pour/2, isFull/1, strong/1 }
//     clocks  { c_brew/1, c_glob/0 }
//     init    { wantStrong(Mug1) }
//     poss sBrew(p) := !brew(p) & (forall m. !pour(p, m));
//     ssa  brew(p)  := a == sBrew(p) | brew(p) & !(a == eBrew(p));
//     reset c_brew(p) := a == sBrew(p);
//   }
//
// Connectives: ! & | -> <->, quantifiers "exists x." / "forall x.", action
// equality "a == A(x)", clock comparisons "c(x) >= 2" against naturals.
// Comments run "//" to end of line. The initial assignment lists the true
// ground atoms; everything unlisted is false. wait is implicit and reserved.
//
// General theories (the machine encodings) start with a "general: true"
// header, declare "numerics { f1/0 }" instead of clocks, may set numeric
// initial values in init ("f1() = 2"), and replace resets by guarded update
// cases:  nssa f1() := { case a == p : f1() + 1; };
//
// Program files (.gpr) use ; | || * pick test nil and the while/if macros;
// while and if expand at parse time. Machines (.2cm) are one labeled
// instruction per line; automata (.ta) declare locations, clocks, switches.
// ============================================================================

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "cbat/bat.hpp"
#include "cbat/encoders.hpp"
#include "cbat/golog.hpp"
#include "cbat/source_span.hpp"

namespace cbat {

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& message, SourceSpan span)
        : std::runtime_error(span.to_string() + ": " + message),
          span_(std::move(span)) {}
    const SourceSpan& span() const { return span_; }

  private:
    SourceSpan span_;
};

BAT parse_bat(std::string_view text, const std::string& filename = "<input>");
Formula parse_formula(std::string_view text, const BAT& bat,
                      const std::string& filename = "<formula>");
Program parse_program(std::string_view text, const BAT& bat,
                      const std::string& filename = "<program>");
Situation parse_situation(std::string_view text, const BAT& bat,
                          const std::string& filename = "<situation>");
TwoCounterMachine parse_2cm(std::string_view text, const std::string& filename = "<2cm>");
TimedAutomaton parse_ta(std::string_view text, const std::string& filename = "<ta>");

std::string serialize_bat(const BAT& bat);
std::string serialize_formula(const Formula& f, const BAT& bat);
std::string serialize_program(const Program& p, const BAT& bat);
std::string serialize_situation(const Situation& s, const BAT& bat);

/// File loading with parse dispatch on extension is in the CLI; these are the
/// pure text functions.

}  // namespace cbat
