#include "cbat/regression.hpp"

#include <stdexcept>

namespace cbat {

namespace {

using Env = std::vector<std::pair<std::string, int32_t>>;

Env param_env(const std::vector<std::string>& params, const std::vector<int32_t>& args) {
    Env env;
    env.reserve(params.size());
    for (size_t i = 0; i < params.size(); ++i) env.emplace_back(params[i], args[i]);
    return env;
}

}  // namespace

std::optional<RegressabilityViolation> check_regressable(const BAT& bat,
                                                         const Formula& phi,
                                                         const Situation& sigma) {
    // Item 2: every action in the history is a ground well-formed term.
    for (const auto& act : sigma.actions) {
        if (act.schema < 0 || act.schema >= (int32_t)bat.schemas.size())
            return RegressabilityViolation{2, "unknown action schema in situation"};
        const auto& schema = bat.schemas[act.schema];
        if (schema.is_wait) {
            if (!act.duration)
                return RegressabilityViolation{2, "wait action without duration"};
            if (sgn(*act.duration) < 0)
                return RegressabilityViolation{2, "wait duration is negative"};
            if (!act.args.empty())
                return RegressabilityViolation{2, "wait action carries object arguments"};
        } else {
            if (act.duration)
                return RegressabilityViolation{2, schema.name + " carries a duration"};
            if ((int)act.args.size() != schema.arity)
                return RegressabilityViolation{2, schema.name + ": arity mismatch"};
            for (int32_t a : act.args)
                if (a < 0 || a >= (int32_t)bat.objects.size())
                    return RegressabilityViolation{2, schema.name + ": bad object index"};
        }
    }
    // Item 3 and symbol resolution. Clock atoms are comparisons against a
    // rational by construction; what remains checkable is well-formedness.
    // Quantification over time, situation quantifiers, Poss atoms and the
    // ordering symbol are unrepresentable in this AST (items 1, 4, 5, 6).
    FormulaRules rules{.allow_act_eq = false, .require_natural_bounds = false};
    if (auto e = check_formula(bat, phi, rules))
        return RegressabilityViolation{3, *e};
    if (!free_vars(phi).empty())
        return RegressabilityViolation{1, "formula has free variables"};
    return std::nullopt;
}

Formula regress_step(const BAT& bat, const Formula& phi, const GroundAction& act) {
    const bool is_wait = (act.schema == bat.wait_schema);
    switch (phi.kind()) {
        case FKind::True:
        case FKind::False:
        case FKind::Rigid:
        case FKind::ObjEq:
            return phi;
        case FKind::Rel: {
            // Substitute the SSA body (parameters may be instantiated with
            // quantified variables of the query) and resolve the action.
            const auto& params = bat.ssa_params[phi.sym()];
            std::vector<std::pair<std::string, Term>> env;
            for (size_t i = 0; i < params.size(); ++i)
                env.emplace_back(params[i], phi.args()[i]);
            return specialize_action(subst_terms(bat.ssas[phi.sym()], env), act);
        }
        case FKind::FnCmp: {
            if (is_wait) {
                // f(o, do(wait(t), s)) ~ r  ==>  f(o, s) ~ r - t
                return Formula::fn_cmp(phi.sym(), phi.args(), phi.op(),
                                       phi.bound() - *act.duration);
            }
            // Branch on the reset condition: reset compares zero against the
            // bound, otherwise the comparison persists.
            const auto& params = bat.reset_params[phi.sym()];
            std::vector<std::pair<std::string, Term>> env;
            for (size_t i = 0; i < params.size(); ++i)
                env.emplace_back(params[i], phi.args()[i]);
            Formula reset = specialize_action(subst_terms(bat.resets[phi.sym()], env), act);
            Formula zero_case = Formula::truth(cmp_eval(Rat(0), phi.op(), phi.bound()));
            return Formula::lor(Formula::land(reset, zero_case),
                                Formula::land(Formula::lnot(reset), phi));
        }
        case FKind::ActEq:
            throw std::logic_error("action equality outside an axiom body");
        case FKind::Not:
            return Formula::lnot(regress_step(bat, phi.kid(0), act));
        case FKind::And:
            return Formula::land(regress_step(bat, phi.kid(0), act),
                                 regress_step(bat, phi.kid(1), act));
        case FKind::Or:
            return Formula::lor(regress_step(bat, phi.kid(0), act),
                                regress_step(bat, phi.kid(1), act));
        case FKind::Implies:
            return Formula::implies(regress_step(bat, phi.kid(0), act),
                                    regress_step(bat, phi.kid(1), act));
        case FKind::Equiv:
            return Formula::equiv(regress_step(bat, phi.kid(0), act),
                                  regress_step(bat, phi.kid(1), act));
        case FKind::Exists:
            return Formula::exists(phi.var(), regress_step(bat, phi.kid(0), act));
        case FKind::Forall:
            return Formula::forall(phi.var(), regress_step(bat, phi.kid(0), act));
    }
    throw std::logic_error("regress_step: bad formula kind");
}

Formula regress(const BAT& bat, const Formula& phi, const Situation& sigma) {
    Formula cur = phi;
    for (auto it = sigma.actions.rbegin(); it != sigma.actions.rend(); ++it)
        cur = regress_step(bat, cur, *it);
    return cur;
}

namespace {

struct InitEvaluator {
    const BAT& bat;

    bool eval(const Formula& f, Env& env) const {
        switch (f.kind()) {
            case FKind::True: return true;
            case FKind::False: return false;
            case FKind::Rel:
                return bat.init_fluents[bat.fluent_atom_index(f.sym(), ground(f, env))];
            case FKind::Rigid:
                return bat.init_rigids[bat.rigid_atom_index(f.sym(), ground(f, env))];
            case FKind::FnCmp: {
                // Uniform in S0: every clock is zero initially. General
                // theories carry explicit initial values.
                const Rat& v = bat.general
                                   ? bat.init_funcs[bat.func_term_index(f.sym(), ground(f, env))]
                                   : Rat(0);
                return cmp_eval(v, f.op(), f.bound());
            }
            case FKind::ObjEq:
                return resolve(f.args()[0], env) == resolve(f.args()[1], env);
            case FKind::ActEq:
                throw std::invalid_argument("formula is not uniform in S0 (action term)");
            case FKind::Not: return !eval(f.kid(0), env);
            case FKind::And: return eval(f.kid(0), env) && eval(f.kid(1), env);
            case FKind::Or: return eval(f.kid(0), env) || eval(f.kid(1), env);
            case FKind::Implies: return !eval(f.kid(0), env) || eval(f.kid(1), env);
            case FKind::Equiv: return eval(f.kid(0), env) == eval(f.kid(1), env);
            case FKind::Exists:
                // Existential quantifiers ground to a disjunction over the
                // object domain, in declaration order.
                for (int32_t o = 0; o < (int32_t)bat.objects.size(); ++o) {
                    env.emplace_back(f.var(), o);
                    bool hit = eval(f.kid(0), env);
                    env.pop_back();
                    if (hit) return true;
                }
                return false;
            case FKind::Forall:
                for (int32_t o = 0; o < (int32_t)bat.objects.size(); ++o) {
                    env.emplace_back(f.var(), o);
                    bool hit = eval(f.kid(0), env);
                    env.pop_back();
                    if (!hit) return false;
                }
                return true;
        }
        throw std::logic_error("entails_initial: bad formula kind");
    }

    int32_t resolve(const Term& t, const Env& env) const {
        if (!t.is_var()) return t.obj;
        for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == t.var) return it->second;
        throw std::invalid_argument("formula is not closed: free variable " + t.var);
    }

    std::vector<int32_t> ground(const Formula& f, const Env& env) const {
        std::vector<int32_t> args;
        args.reserve(f.args().size());
        for (const auto& t : f.args()) args.push_back(resolve(t, env));
        return args;
    }
};

}  // namespace

bool entails_initial(const BAT& bat, const Formula& psi) {
    Env env;
    return InitEvaluator{bat}.eval(psi, env);
}

bool holds(const BAT& bat, const Formula& phi, const Situation& sigma) {
    if (auto v = check_regressable(bat, phi, sigma))
        throw std::invalid_argument("not regressable (item " + std::to_string(v->item) +
                                    "): " + v->message);
    return entails_initial(bat, regress(bat, phi, sigma));
}

bool holds_poss(const BAT& bat, const GroundAction& act, const Situation& sigma) {
    if (act.schema == bat.wait_schema) return true;
    Formula body = subst_objects(
        bat.preconditions[act.schema],
        param_env(bat.precond_params[act.schema], act.args));
    return entails_initial(bat, regress(bat, body, sigma));
}

}  // namespace cbat
