// ============================================================================
// formula.hpp — first-order formulas over a finite object domain
// ============================================================================
//
// Formulas are immutable trees shared by pointer. Atoms reference symbols of
// the owning theory by index (relational fluent, rigid predicate, functional
// fluent, action schema); terms are either bound variables (by name) or
// object constants (by index).
//
// Atoms mentioning a functional fluent are always comparisons against a
// rational constant (FnCmp). User-written theories restrict the constant to
// a natural number; regression may introduce rational and negative bounds
// internally.
// ============================================================================

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cbat/rational.hpp"
#include "cbat/source_span.hpp"

namespace cbat {

enum class FKind : uint8_t {
    True,
    False,
    Rel,      // relational fluent atom
    Rigid,    // rigid predicate atom
    FnCmp,    // functional fluent comparison  f(t...) op bound
    ObjEq,    // object equality  t1 == t2
    ActEq,    // action equality  a == A(t...); wait matches any duration
    Not,
    And,
    Or,
    Implies,
    Equiv,
    Exists,
    Forall,
};

enum class CmpOp : uint8_t { Lt, Le, Eq, Ge, Gt };

const char* cmp_op_str(CmpOp op);
bool cmp_eval(const Rat& lhs, CmpOp op, const Rat& rhs);

/// A term is a bound variable (non-empty name) or an object constant index.
struct Term {
    std::string var;
    int32_t obj = -1;

    static Term make_var(std::string name) { return Term{std::move(name), -1}; }
    static Term make_obj(int32_t index) { return Term{{}, index}; }
    bool is_var() const { return !var.empty(); }
    bool operator==(const Term& o) const { return var == o.var && obj == o.obj; }
};

class Formula {
  public:
    struct Node {
        FKind kind = FKind::True;
        int32_t sym = -1;
        std::vector<Term> args;
        CmpOp op = CmpOp::Eq;
        Rat bound;
        std::string var;
        std::vector<Formula> kids;
        SourceSpan span;
        size_t hash = 0;
    };

    Formula() = default;  // invalid handle; valid() is false

    // --- constructors (constants fold: connectives with truth-constant
    // children collapse where the result is forced) ---
    static Formula truth(bool value);
    static Formula rel(int32_t fluent, std::vector<Term> args);
    static Formula rigid(int32_t pred, std::vector<Term> args);
    static Formula fn_cmp(int32_t func, std::vector<Term> args, CmpOp op, Rat bound);
    static Formula obj_eq(Term lhs, Term rhs);
    static Formula act_eq(int32_t schema, std::vector<Term> args);
    static Formula lnot(Formula f);
    static Formula land(Formula a, Formula b);
    static Formula lor(Formula a, Formula b);
    static Formula implies(Formula a, Formula b);
    static Formula equiv(Formula a, Formula b);
    static Formula exists(std::string var, Formula body);
    static Formula forall(std::string var, Formula body);

    bool valid() const { return node_ != nullptr; }
    FKind kind() const { return node_->kind; }
    int32_t sym() const { return node_->sym; }
    const std::vector<Term>& args() const { return node_->args; }
    CmpOp op() const { return node_->op; }
    const Rat& bound() const { return node_->bound; }
    const std::string& var() const { return node_->var; }
    const std::vector<Formula>& kids() const { return node_->kids; }
    const Formula& kid(size_t i) const { return node_->kids[i]; }
    const SourceSpan& span() const { return node_->span; }

    bool is_true() const { return node_ && node_->kind == FKind::True; }
    bool is_false() const { return node_ && node_->kind == FKind::False; }

    Formula with_span(SourceSpan s) const;

    size_t hash() const { return node_->hash; }
    bool operator==(const Formula& other) const;  // structural; spans ignored

  private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Formula make(Node n);
    std::shared_ptr<const Node> node_;
};

/// Replaces free variables by object constants. Bindings with names shadowed
/// by an inner quantifier are left untouched.
Formula subst_objects(const Formula& f,
                      const std::vector<std::pair<std::string, int32_t>>& env);

/// Capture-avoiding substitution of free variables by arbitrary terms:
/// quantified variables that would capture a substituted name are renamed
/// (deterministically) on the way down.
Formula subst_terms(const Formula& f,
                    const std::vector<std::pair<std::string, Term>>& env);

/// Collects free variable names (in first-occurrence order).
std::vector<std::string> free_vars(const Formula& f);

struct GroundAction;  // bat.hpp

/// Resolves every action-equality atom against a concrete ground action:
/// mismatched schemas fold to false, matches fold to a conjunction of object
/// equalities on the arguments.
Formula specialize_action(const Formula& f, const GroundAction& act);

}  // namespace cbat

template <>
struct std::hash<cbat::Formula> {
    size_t operator()(const cbat::Formula& f) const { return f.hash(); }
};
