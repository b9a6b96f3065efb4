#include "cbat/world.hpp"

#include <stdexcept>

namespace cbat {

namespace {

using Env = std::vector<std::pair<std::string, int32_t>>;

int32_t resolve(const Term& t, const Env& env) {
    if (!t.is_var()) return t.obj;
    for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == t.var) return it->second;
    throw std::logic_error("unbound variable in evaluation: " + t.var);
}

struct Evaluator {
    const BAT& bat;
    const WorldState& state;

    bool eval(const Formula& f, Env& env) const {
        switch (f.kind()) {
            case FKind::True: return true;
            case FKind::False: return false;
            case FKind::Rel: {
                std::vector<int32_t> args;
                args.reserve(f.args().size());
                for (const auto& t : f.args()) args.push_back(resolve(t, env));
                return state.bit(bat.fluent_atom_index(f.sym(), args));
            }
            case FKind::Rigid: {
                std::vector<int32_t> args;
                args.reserve(f.args().size());
                for (const auto& t : f.args()) args.push_back(resolve(t, env));
                return bat.init_rigids[bat.rigid_atom_index(f.sym(), args)];
            }
            case FKind::FnCmp: {
                std::vector<int32_t> args;
                args.reserve(f.args().size());
                for (const auto& t : f.args()) args.push_back(resolve(t, env));
                const Rat& v = state.funcs[bat.func_term_index(f.sym(), args)];
                return cmp_eval(v, f.op(), f.bound());
            }
            case FKind::ObjEq:
                return resolve(f.args()[0], env) == resolve(f.args()[1], env);
            case FKind::ActEq:
                throw std::logic_error("unresolved action equality in evaluation");
            case FKind::Not: return !eval(f.kid(0), env);
            case FKind::And: return eval(f.kid(0), env) && eval(f.kid(1), env);
            case FKind::Or: return eval(f.kid(0), env) || eval(f.kid(1), env);
            case FKind::Implies: return !eval(f.kid(0), env) || eval(f.kid(1), env);
            case FKind::Equiv: return eval(f.kid(0), env) == eval(f.kid(1), env);
            case FKind::Exists: {
                for (int32_t o = 0; o < (int32_t)bat.objects.size(); ++o) {
                    env.emplace_back(f.var(), o);
                    bool hit = eval(f.kid(0), env);
                    env.pop_back();
                    if (hit) return true;
                }
                return false;
            }
            case FKind::Forall: {
                for (int32_t o = 0; o < (int32_t)bat.objects.size(); ++o) {
                    env.emplace_back(f.var(), o);
                    bool hit = eval(f.kid(0), env);
                    env.pop_back();
                    if (!hit) return false;
                }
                return true;
            }
        }
        throw std::logic_error("eval: bad formula kind");
    }
};

Env param_env(const std::vector<std::string>& params, const std::vector<int32_t>& args) {
    Env env;
    env.reserve(params.size());
    for (size_t i = 0; i < params.size(); ++i) env.emplace_back(params[i], args[i]);
    return env;
}

}  // namespace

GroundKit::GroundKit(const BAT& bat) : bat_(&bat), actions_(ground_actions(bat)) {
    const size_t num_atoms = bat.num_fluent_atoms();
    const size_t num_funcs = bat.num_func_terms();

    preconditions_.reserve(actions_.size());
    ssa_.reserve(actions_.size());
    for (const auto& act : actions_) {
        const auto& params = bat.precond_params[act.schema];
        Formula pre = subst_objects(bat.preconditions[act.schema],
                                    param_env(params, act.args));
        preconditions_.push_back(std::move(pre));

        std::vector<Formula> per_atom;
        per_atom.reserve(num_atoms);
        for (size_t atom = 0; atom < num_atoms; ++atom) {
            auto [fl, args] = bat.fluent_atom_at(atom);
            Formula body = subst_objects(bat.ssas[fl],
                                         param_env(bat.ssa_params[fl], args));
            per_atom.push_back(specialize_action(body, act));
        }
        ssa_.push_back(std::move(per_atom));

        if (!bat.general) {
            std::vector<Formula> per_func;
            per_func.reserve(num_funcs);
            for (size_t ct = 0; ct < num_funcs; ++ct) {
                auto [c, args] = bat.func_term_at(ct);
                Formula cond = subst_objects(bat.resets[c],
                                             param_env(bat.reset_params[c], args));
                per_func.push_back(specialize_action(cond, act));
            }
            reset_.push_back(std::move(per_func));
        } else {
            std::vector<std::vector<NumCase>> per_func(bat.funcs.size());
            for (size_t c = 0; c < bat.funcs.size(); ++c) {
                for (const auto& cs : bat.num_ssas[c].cases) {
                    Formula cond = specialize_action(cs.cond, act);
                    if (cond.is_false()) continue;
                    per_func[c].push_back(NumCase{std::move(cond), cs.update, cs.value});
                }
            }
            numcase_.push_back(std::move(per_func));
        }
    }
}

WorldState GroundKit::initial() const {
    WorldState s;
    s.fluent_bits.assign((bat_->num_fluent_atoms() + 63) / 64, 0);
    for (size_t i = 0; i < bat_->init_fluents.size(); ++i)
        if (bat_->init_fluents[i]) s.set_bit(i, true);
    if (bat_->general) {
        s.funcs = bat_->init_funcs;
        s.funcs.resize(bat_->num_func_terms(), Rat(0));
    } else {
        s.funcs.assign(bat_->num_func_terms(), Rat(0));
    }
    return s;
}

bool GroundKit::eval(const WorldState& s, const Formula& f) const {
    Env env;
    return Evaluator{*bat_, s}.eval(f, env);
}

size_t GroundKit::action_key(const GroundAction& a) const {
    // Recover the dense index of a ground non-wait action: actions_ holds the
    // schemas in declaration order with lexicographic argument tuples.
    size_t offset = 0;
    const size_t n = bat_->objects.size();
    for (int32_t s = 0; s < a.schema; ++s) {
        if (bat_->schemas[s].is_wait) continue;
        size_t block = 1;
        for (int i = 0; i < bat_->schemas[s].arity; ++i) block *= n;
        offset += block;
    }
    size_t mixed = 0;
    for (int32_t arg : a.args) mixed = mixed * n + (size_t)arg;
    return offset + mixed;
}

bool GroundKit::possible(const WorldState& s, const GroundAction& a) const {
    if (a.schema == bat_->wait_schema) return true;
    return eval(s, preconditions_[action_key(a)]);
}

WorldState GroundKit::apply(const WorldState& s, const GroundAction& a) const {
    WorldState next = s;
    if (a.schema == bat_->wait_schema) {
        if (bat_->general)
            throw std::logic_error("general theories have no wait semantics");
        for (auto& v : next.funcs) v += *a.duration;
        return next;
    }
    const size_t key = action_key(a);
    const auto& per_atom = ssa_[key];
    for (size_t atom = 0; atom < per_atom.size(); ++atom)
        next.set_bit(atom, eval(s, per_atom[atom]));
    if (!bat_->general) {
        const auto& per_func = reset_[key];
        for (size_t ct = 0; ct < per_func.size(); ++ct)
            if (eval(s, per_func[ct])) next.funcs[ct] = Rat(0);
    } else {
        const auto& per_func = numcase_[key];
        for (size_t c = 0; c < per_func.size(); ++c) {
            const Rat& cur = s.funcs[c];
            for (const NumCase& cs : per_func[c]) {
                if (!eval(s, cs.cond)) continue;
                switch (cs.update) {
                    case NumUpdateKind::Keep: break;
                    case NumUpdateKind::AddOne: next.funcs[c] = cur + 1; break;
                    case NumUpdateKind::SubOne: next.funcs[c] = cur - 1; break;
                    case NumUpdateKind::Half: next.funcs[c] = cur / 2; break;
                    case NumUpdateKind::Double: next.funcs[c] = cur * 2; break;
                    case NumUpdateKind::Const: next.funcs[c] = cs.value; break;
                }
                break;  // first matching case wins
            }
        }
    }
    return next;
}

WorldState GroundKit::run(const Situation& sigma) const {
    WorldState s = initial();
    for (const auto& a : sigma.actions) s = apply(s, a);
    return s;
}

}  // namespace cbat
