#include "cbat/formula.hpp"

#include <algorithm>
#include <stdexcept>

#include "cbat/bat.hpp"

namespace cbat {

const char* cmp_op_str(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Eq: return "==";
        case CmpOp::Ge: return ">=";
        case CmpOp::Gt: return ">";
    }
    return "?";
}

bool cmp_eval(const Rat& lhs, CmpOp op, const Rat& rhs) {
    switch (op) {
        case CmpOp::Lt: return lhs < rhs;
        case CmpOp::Le: return lhs <= rhs;
        case CmpOp::Eq: return lhs == rhs;
        case CmpOp::Ge: return lhs >= rhs;
        case CmpOp::Gt: return lhs > rhs;
    }
    return false;
}

namespace {

inline size_t hash_mix(size_t h, size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

size_t hash_term(const Term& t) {
    size_t h = std::hash<std::string>{}(t.var);
    return hash_mix(h, (size_t)(t.obj + 1));
}

size_t node_hash(const Formula::Node& n) {
    size_t h = (size_t)n.kind * 0x100000001b3ULL;
    h = hash_mix(h, (size_t)(n.sym + 1));
    for (const auto& t : n.args) h = hash_mix(h, hash_term(t));
    h = hash_mix(h, (size_t)n.op);
    if (n.kind == FKind::FnCmp) {
        h = hash_mix(h, std::hash<std::string>{}(rat_str(n.bound)));
    }
    h = hash_mix(h, std::hash<std::string>{}(n.var));
    for (const auto& k : n.kids) h = hash_mix(h, k.hash());
    return h;
}

}  // namespace

Formula Formula::make(Node n) {
    n.hash = node_hash(n);
    return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::truth(bool value) {
    Node n;
    n.kind = value ? FKind::True : FKind::False;
    return make(std::move(n));
}

Formula Formula::rel(int32_t fluent, std::vector<Term> args) {
    Node n;
    n.kind = FKind::Rel;
    n.sym = fluent;
    n.args = std::move(args);
    return make(std::move(n));
}

Formula Formula::rigid(int32_t pred, std::vector<Term> args) {
    Node n;
    n.kind = FKind::Rigid;
    n.sym = pred;
    n.args = std::move(args);
    return make(std::move(n));
}

Formula Formula::fn_cmp(int32_t func, std::vector<Term> args, CmpOp op, Rat bound) {
    Node n;
    n.kind = FKind::FnCmp;
    n.sym = func;
    n.args = std::move(args);
    n.op = op;
    n.bound = std::move(bound);
    return make(std::move(n));
}

Formula Formula::obj_eq(Term lhs, Term rhs) {
    // Ground equalities fold under unique names.
    if (!lhs.is_var() && !rhs.is_var()) return truth(lhs.obj == rhs.obj);
    if (lhs.is_var() && rhs.is_var() && lhs.var == rhs.var) return truth(true);
    Node n;
    n.kind = FKind::ObjEq;
    n.args = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

Formula Formula::act_eq(int32_t schema, std::vector<Term> args) {
    Node n;
    n.kind = FKind::ActEq;
    n.sym = schema;
    n.args = std::move(args);
    return make(std::move(n));
}

Formula Formula::lnot(Formula f) {
    if (f.is_true()) return truth(false);
    if (f.is_false()) return truth(true);
    Node n;
    n.kind = FKind::Not;
    n.kids = {std::move(f)};
    return make(std::move(n));
}

Formula Formula::land(Formula a, Formula b) {
    if (a.is_false() || b.is_false()) return truth(false);
    if (a.is_true()) return b;
    if (b.is_true()) return a;
    Node n;
    n.kind = FKind::And;
    n.kids = {std::move(a), std::move(b)};
    return make(std::move(n));
}

Formula Formula::lor(Formula a, Formula b) {
    if (a.is_true() || b.is_true()) return truth(true);
    if (a.is_false()) return b;
    if (b.is_false()) return a;
    Node n;
    n.kind = FKind::Or;
    n.kids = {std::move(a), std::move(b)};
    return make(std::move(n));
}

Formula Formula::implies(Formula a, Formula b) {
    if (a.is_false() || b.is_true()) return truth(true);
    if (a.is_true()) return b;
    Node n;
    n.kind = FKind::Implies;
    n.kids = {std::move(a), std::move(b)};
    return make(std::move(n));
}

Formula Formula::equiv(Formula a, Formula b) {
    if (a.is_true()) return b;
    if (b.is_true()) return a;
    if (a.is_false()) return lnot(b);
    if (b.is_false()) return lnot(a);
    Node n;
    n.kind = FKind::Equiv;
    n.kids = {std::move(a), std::move(b)};
    return make(std::move(n));
}

Formula Formula::exists(std::string var, Formula body) {
    Node n;
    n.kind = FKind::Exists;
    n.var = std::move(var);
    n.kids = {std::move(body)};
    return make(std::move(n));
}

Formula Formula::forall(std::string var, Formula body) {
    Node n;
    n.kind = FKind::Forall;
    n.var = std::move(var);
    n.kids = {std::move(body)};
    return make(std::move(n));
}

Formula Formula::with_span(SourceSpan s) const {
    Node n = *node_;
    n.span = std::move(s);
    return Formula(std::make_shared<const Node>(std::move(n)));
}

bool Formula::operator==(const Formula& other) const {
    if (node_ == other.node_) return true;
    if (!node_ || !other.node_) return false;
    const Node& a = *node_;
    const Node& b = *other.node_;
    if (a.hash != b.hash || a.kind != b.kind || a.sym != b.sym ||
        a.op != b.op || a.var != b.var || a.args != b.args)
        return false;
    if (a.kind == FKind::FnCmp && a.bound != b.bound) return false;
    if (a.kids.size() != b.kids.size()) return false;
    for (size_t i = 0; i < a.kids.size(); ++i)
        if (!(a.kids[i] == b.kids[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// substitution / traversal
// ---------------------------------------------------------------------------

namespace {

using Env = std::vector<std::pair<std::string, int32_t>>;

const int32_t* env_lookup(const Env& env, const std::string& name) {
    for (const auto& [n, o] : env)
        if (n == name) return &o;
    return nullptr;
}

Term subst_term(const Term& t, const Env& env) {
    if (!t.is_var()) return t;
    if (const int32_t* o = env_lookup(env, t.var)) return Term::make_obj(*o);
    return t;
}

Formula subst_rec(const Formula& f, const Env& env) {
    if (env.empty()) return f;
    switch (f.kind()) {
        case FKind::True:
        case FKind::False:
            return f;
        case FKind::Rel:
        case FKind::Rigid:
        case FKind::FnCmp:
        case FKind::ActEq:
        case FKind::ObjEq: {
            std::vector<Term> args;
            args.reserve(f.args().size());
            bool changed = false;
            for (const auto& t : f.args()) {
                Term s = subst_term(t, env);
                changed = changed || !(s == t);
                args.push_back(std::move(s));
            }
            if (!changed) return f;
            switch (f.kind()) {
                case FKind::Rel: return Formula::rel(f.sym(), std::move(args));
                case FKind::Rigid: return Formula::rigid(f.sym(), std::move(args));
                case FKind::FnCmp:
                    return Formula::fn_cmp(f.sym(), std::move(args), f.op(), f.bound());
                case FKind::ActEq: return Formula::act_eq(f.sym(), std::move(args));
                default: return Formula::obj_eq(args[0], args[1]);
            }
        }
        case FKind::Not:
            return Formula::lnot(subst_rec(f.kid(0), env));
        case FKind::And:
            return Formula::land(subst_rec(f.kid(0), env), subst_rec(f.kid(1), env));
        case FKind::Or:
            return Formula::lor(subst_rec(f.kid(0), env), subst_rec(f.kid(1), env));
        case FKind::Implies:
            return Formula::implies(subst_rec(f.kid(0), env), subst_rec(f.kid(1), env));
        case FKind::Equiv:
            return Formula::equiv(subst_rec(f.kid(0), env), subst_rec(f.kid(1), env));
        case FKind::Exists:
        case FKind::Forall: {
            Env inner;
            inner.reserve(env.size());
            for (const auto& b : env)
                if (b.first != f.var()) inner.push_back(b);
            Formula body = subst_rec(f.kid(0), inner);
            return f.kind() == FKind::Exists ? Formula::exists(f.var(), std::move(body))
                                             : Formula::forall(f.var(), std::move(body));
        }
    }
    throw std::logic_error("subst_rec: bad formula kind");
}

void free_vars_rec(const Formula& f, std::vector<std::string>& bound,
                   std::vector<std::string>& out) {
    auto consider = [&](const Term& t) {
        if (!t.is_var()) return;
        if (std::find(bound.begin(), bound.end(), t.var) != bound.end()) return;
        if (std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
    };
    for (const auto& t : f.args()) consider(t);
    if (f.kind() == FKind::Exists || f.kind() == FKind::Forall) {
        bound.push_back(f.var());
        free_vars_rec(f.kid(0), bound, out);
        bound.pop_back();
        return;
    }
    for (const auto& k : f.kids()) free_vars_rec(k, bound, out);
}

}  // namespace

Formula subst_objects(const Formula& f,
                      const std::vector<std::pair<std::string, int32_t>>& env) {
    return subst_rec(f, env);
}

namespace {

using TermEnv = std::vector<std::pair<std::string, Term>>;

const Term* term_env_lookup(const TermEnv& env, const std::string& name) {
    for (const auto& [n, t] : env)
        if (n == name) return &t;
    return nullptr;
}

Formula subst_terms_rec(const Formula& f, const TermEnv& env, int& fresh) {
    if (env.empty()) return f;
    auto map_term = [&](const Term& t) {
        if (!t.is_var()) return t;
        if (const Term* r = term_env_lookup(env, t.var)) return *r;
        return t;
    };
    switch (f.kind()) {
        case FKind::True:
        case FKind::False:
            return f;
        case FKind::Rel:
        case FKind::Rigid:
        case FKind::FnCmp:
        case FKind::ActEq:
        case FKind::ObjEq: {
            std::vector<Term> args;
            args.reserve(f.args().size());
            for (const auto& t : f.args()) args.push_back(map_term(t));
            switch (f.kind()) {
                case FKind::Rel: return Formula::rel(f.sym(), std::move(args));
                case FKind::Rigid: return Formula::rigid(f.sym(), std::move(args));
                case FKind::FnCmp:
                    return Formula::fn_cmp(f.sym(), std::move(args), f.op(), f.bound());
                case FKind::ActEq: return Formula::act_eq(f.sym(), std::move(args));
                default: return Formula::obj_eq(args[0], args[1]);
            }
        }
        case FKind::Not:
            return Formula::lnot(subst_terms_rec(f.kid(0), env, fresh));
        case FKind::And:
            return Formula::land(subst_terms_rec(f.kid(0), env, fresh),
                                 subst_terms_rec(f.kid(1), env, fresh));
        case FKind::Or:
            return Formula::lor(subst_terms_rec(f.kid(0), env, fresh),
                                subst_terms_rec(f.kid(1), env, fresh));
        case FKind::Implies:
            return Formula::implies(subst_terms_rec(f.kid(0), env, fresh),
                                    subst_terms_rec(f.kid(1), env, fresh));
        case FKind::Equiv:
            return Formula::equiv(subst_terms_rec(f.kid(0), env, fresh),
                                  subst_terms_rec(f.kid(1), env, fresh));
        case FKind::Exists:
        case FKind::Forall: {
            TermEnv inner;
            inner.reserve(env.size() + 1);
            bool capture = false;
            for (const auto& b : env) {
                if (b.first == f.var()) continue;  // shadowed
                if (b.second.is_var() && b.second.var == f.var()) capture = true;
                inner.push_back(b);
            }
            std::string var = f.var();
            if (capture) {
                var = f.var() + "$" + std::to_string(fresh++);
                inner.emplace_back(f.var(), Term::make_var(var));
            }
            Formula body = subst_terms_rec(f.kid(0), inner, fresh);
            return f.kind() == FKind::Exists ? Formula::exists(var, std::move(body))
                                             : Formula::forall(var, std::move(body));
        }
    }
    throw std::logic_error("subst_terms: bad formula kind");
}

}  // namespace

Formula subst_terms(const Formula& f,
                    const std::vector<std::pair<std::string, Term>>& env) {
    int fresh = 0;
    return subst_terms_rec(f, env, fresh);
}

std::vector<std::string> free_vars(const Formula& f) {
    std::vector<std::string> bound, out;
    free_vars_rec(f, bound, out);
    return out;
}

Formula specialize_action(const Formula& f, const GroundAction& act) {
    switch (f.kind()) {
        case FKind::ActEq: {
            if (f.sym() != act.schema) return Formula::truth(false);
            // wait matches regardless of duration; other schemas match on args.
            Formula result = Formula::truth(true);
            for (size_t i = 0; i < f.args().size(); ++i)
                result = Formula::land(
                    result, Formula::obj_eq(f.args()[i], Term::make_obj(act.args[i])));
            return result;
        }
        case FKind::Not:
            return Formula::lnot(specialize_action(f.kid(0), act));
        case FKind::And:
            return Formula::land(specialize_action(f.kid(0), act),
                                 specialize_action(f.kid(1), act));
        case FKind::Or:
            return Formula::lor(specialize_action(f.kid(0), act),
                                specialize_action(f.kid(1), act));
        case FKind::Implies:
            return Formula::implies(specialize_action(f.kid(0), act),
                                    specialize_action(f.kid(1), act));
        case FKind::Equiv:
            return Formula::equiv(specialize_action(f.kid(0), act),
                                  specialize_action(f.kid(1), act));
        case FKind::Exists:
            return Formula::exists(f.var(), specialize_action(f.kid(0), act));
        case FKind::Forall:
            return Formula::forall(f.var(), specialize_action(f.kid(0), act));
        default:
            return f;
    }
}

}  // namespace cbat
