#include "cbat/bat.hpp"

#include <functional>
#include <set>
#include <stdexcept>

namespace cbat {

namespace {

int32_t find_by_name(const auto& decls, const std::string& n) {
    for (size_t i = 0; i < decls.size(); ++i)
        if (decls[i].name == n) return (int32_t)i;
    return -1;
}

size_t pow_objects(size_t base, int arity) {
    size_t r = 1;
    for (int i = 0; i < arity; ++i) r *= base;
    return r;
}

}  // namespace

int32_t BAT::object_index(const std::string& n) const { return find_by_name(objects, n); }
int32_t BAT::schema_index(const std::string& n) const { return find_by_name(schemas, n); }
int32_t BAT::fluent_index(const std::string& n) const { return find_by_name(fluents, n); }
int32_t BAT::rigid_index(const std::string& n) const { return find_by_name(rigids, n); }
int32_t BAT::func_index(const std::string& n) const { return find_by_name(funcs, n); }

size_t BAT::num_fluent_atoms() const {
    size_t total = 0;
    for (const auto& f : fluents) total += pow_objects(objects.size(), f.arity);
    return total;
}

size_t BAT::num_rigid_atoms() const {
    size_t total = 0;
    for (const auto& r : rigids) total += pow_objects(objects.size(), r.arity);
    return total;
}

size_t BAT::num_func_terms() const {
    size_t total = 0;
    for (const auto& c : funcs) total += pow_objects(objects.size(), c.arity);
    return total;
}

namespace {

size_t atom_index(const auto& decls, size_t num_objects, int32_t sym,
                  const std::vector<int32_t>& args) {
    size_t offset = 0;
    for (int32_t i = 0; i < sym; ++i)
        offset += pow_objects(num_objects, decls[i].arity);
    size_t mixed = 0;
    for (int32_t a : args) mixed = mixed * num_objects + (size_t)a;
    return offset + mixed;
}

std::pair<int32_t, std::vector<int32_t>> atom_at(const auto& decls,
                                                 size_t num_objects, size_t index) {
    for (size_t sym = 0; sym < decls.size(); ++sym) {
        size_t block = pow_objects(num_objects, decls[sym].arity);
        if (index < block) {
            std::vector<int32_t> args(decls[sym].arity);
            for (int i = decls[sym].arity - 1; i >= 0; --i) {
                args[i] = (int32_t)(index % num_objects);
                index /= num_objects;
            }
            return {(int32_t)sym, args};
        }
        index -= block;
    }
    throw std::out_of_range("atom index out of range");
}

}  // namespace

size_t BAT::fluent_atom_index(int32_t fluent, const std::vector<int32_t>& args) const {
    return atom_index(fluents, objects.size(), fluent, args);
}

size_t BAT::rigid_atom_index(int32_t pred, const std::vector<int32_t>& args) const {
    return atom_index(rigids, objects.size(), pred, args);
}

size_t BAT::func_term_index(int32_t func, const std::vector<int32_t>& args) const {
    return atom_index(funcs, objects.size(), func, args);
}

std::pair<int32_t, std::vector<int32_t>> BAT::fluent_atom_at(size_t index) const {
    return atom_at(fluents, objects.size(), index);
}

std::pair<int32_t, std::vector<int32_t>> BAT::rigid_atom_at(size_t index) const {
    return atom_at(rigids, objects.size(), index);
}

std::pair<int32_t, std::vector<int32_t>> BAT::func_term_at(size_t index) const {
    return atom_at(funcs, objects.size(), index);
}

namespace {

std::string render_atom(const BAT& bat, const std::string& name,
                        const std::vector<int32_t>& args) {
    std::string s = name + "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ",";
        s += bat.objects[args[i]].name;
    }
    return s + ")";
}

}  // namespace

std::string BAT::fluent_atom_name(size_t index) const {
    auto [sym, args] = fluent_atom_at(index);
    return render_atom(*this, fluents[sym].name, args);
}

std::string BAT::rigid_atom_name(size_t index) const {
    auto [sym, args] = rigid_atom_at(index);
    return render_atom(*this, rigids[sym].name, args);
}

std::string BAT::func_term_name(size_t index) const {
    auto [sym, args] = func_term_at(index);
    return render_atom(*this, funcs[sym].name, args);
}

std::string BAT::action_str(const GroundAction& a) const {
    const auto& schema = schemas[a.schema];
    if (schema.is_wait) return "wait(" + rat_str(a.duration.value_or(Rat(0))) + ")";
    return render_atom(*this, schema.name, a.args);
}

std::string BAT::situation_str(const Situation& s) const {
    std::string out = "[";
    for (size_t i = 0; i < s.actions.size(); ++i) {
        if (i) out += "; ";
        out += action_str(s.actions[i]);
    }
    return out + "]";
}

GroundAction BAT::make_wait(Rat duration) const {
    GroundAction a;
    a.schema = wait_schema;
    a.duration = std::move(duration);
    return a;
}

// ---------------------------------------------------------------------------
// formula well-formedness
// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> check_rec(const BAT& bat, const Formula& f,
                                     const FormulaRules& rules) {
    auto check_args = [&](int expected, const char* what) -> std::optional<std::string> {
        if ((int)f.args().size() != expected)
            return std::string(what) + ": arity mismatch";
        for (const auto& t : f.args())
            if (!t.is_var() && (t.obj < 0 || t.obj >= (int32_t)bat.objects.size()))
                return std::string(what) + ": object index out of range";
        return std::nullopt;
    };
    switch (f.kind()) {
        case FKind::True:
        case FKind::False:
            return std::nullopt;
        case FKind::Rel:
            if (f.sym() < 0 || f.sym() >= (int32_t)bat.fluents.size())
                return "unknown relational fluent";
            return check_args(bat.fluents[f.sym()].arity, bat.fluents[f.sym()].name.c_str());
        case FKind::Rigid:
            if (f.sym() < 0 || f.sym() >= (int32_t)bat.rigids.size())
                return "unknown rigid predicate";
            return check_args(bat.rigids[f.sym()].arity, bat.rigids[f.sym()].name.c_str());
        case FKind::FnCmp: {
            if (f.sym() < 0 || f.sym() >= (int32_t)bat.funcs.size())
                return "unknown functional fluent";
            if (auto e = check_args(bat.funcs[f.sym()].arity, bat.funcs[f.sym()].name.c_str()))
                return e;
            if (rules.require_natural_bounds && !rat_is_natural(f.bound()))
                return "clock comparison against non-natural constant " + rat_str(f.bound()) +
                       " (clock " + bat.funcs[f.sym()].name + ")";
            return std::nullopt;
        }
        case FKind::ObjEq:
            return check_args(2, "equality");
        case FKind::ActEq: {
            if (!rules.allow_act_eq)
                return "action equality is only allowed in SSA and reset bodies";
            if (f.sym() < 0 || f.sym() >= (int32_t)bat.schemas.size())
                return "unknown action schema";
            int expected = bat.schemas[f.sym()].is_wait ? 0 : bat.schemas[f.sym()].arity;
            return check_args(expected, bat.schemas[f.sym()].name.c_str());
        }
        default:
            for (const auto& k : f.kids())
                if (auto e = check_rec(bat, k, rules)) return e;
            return std::nullopt;
    }
}

bool mentions_func(const Formula& f) {
    if (f.kind() == FKind::FnCmp) return true;
    for (const auto& k : f.kids())
        if (mentions_func(k)) return true;
    return false;
}

void collect_bounds(const Formula& f, std::vector<Rat>& out) {
    if (f.kind() == FKind::FnCmp) out.push_back(f.bound());
    for (const auto& k : f.kids()) collect_bounds(k, out);
}

}  // namespace

std::optional<std::string> check_formula(const BAT& bat, const Formula& f,
                                         const FormulaRules& rules) {
    if (!f.valid()) return "invalid formula handle";
    return check_rec(bat, f, rules);
}

// ---------------------------------------------------------------------------
// validate_bat
// ---------------------------------------------------------------------------

std::vector<Violation> validate_bat(const BAT& bat) {
    std::vector<Violation> out;
    auto flag = [&](int clause, const std::string& symbol, const std::string& msg) {
        out.push_back(Violation{clause, symbol, msg});
    };

    // Name closure: pairwise distinct names within each declaration class.
    auto dup_check = [&](const auto& decls, const char* what) {
        std::set<std::string> seen;
        for (const auto& d : decls)
            if (!seen.insert(d.name).second)
                flag(0, d.name, std::string("duplicate ") + what + " declaration");
    };
    dup_check(bat.objects, "object");
    dup_check(bat.schemas, "action");
    dup_check(bat.fluents, "fluent");
    dup_check(bat.rigids, "rigid");
    dup_check(bat.funcs, "functional fluent");

    if (bat.objects.empty()) flag(0, "", "object domain is empty");

    // Exactly one wait schema, parameterless.
    int waits = 0;
    for (const auto& s : bat.schemas)
        if (s.is_wait) ++waits;
    if (waits != 1)
        flag(6, "wait", "expected exactly one wait action schema");
    else if (bat.wait_schema < 0 || !bat.schemas[bat.wait_schema].is_wait)
        flag(6, "wait", "wait_schema index does not refer to the wait schema");
    else if (bat.schemas[bat.wait_schema].arity != 0)
        flag(6, "wait", "wait carries a duration, not object parameters");

    // Clause 6: wait precondition is fixed to true.
    if (bat.wait_schema >= 0 && bat.wait_schema < (int32_t)bat.preconditions.size()) {
        const Formula& wp = bat.preconditions[bat.wait_schema];
        if (!wp.valid() || !wp.is_true())
            flag(6, "wait", "wait precondition must be true");
    }

    // Complete initial assignment over every ground atom.
    if (bat.init_fluents.size() != bat.num_fluent_atoms())
        flag(0, "", "initial fluent assignment is not total");
    if (bat.init_rigids.size() != bat.num_rigid_atoms())
        flag(0, "", "initial rigid assignment is not total");

    // Clause 2: clocks are zero-initialized. (Clocked theories have no syntax
    // for anything else; a nonzero value can only arrive programmatically.)
    if (!bat.general) {
        for (size_t i = 0; i < bat.init_funcs.size(); ++i)
            if (bat.init_funcs[i] != 0)
                flag(2, bat.func_term_name(i), "clock is not initialized to zero");
    }

    FormulaRules clocked_rules{.allow_act_eq = false,
                               .require_natural_bounds = !bat.general};
    FormulaRules body_rules{.allow_act_eq = true,
                            .require_natural_bounds = !bat.general};

    // Clause 5: one precondition per schema, clocked, closed under its params.
    for (size_t i = 0; i < bat.schemas.size(); ++i) {
        if ((int32_t)i == bat.wait_schema) continue;
        const auto& schema = bat.schemas[i];
        if (i >= bat.preconditions.size() || !bat.preconditions[i].valid()) {
            flag(5, schema.name, "missing precondition axiom");
            continue;
        }
        if (auto e = check_formula(bat, bat.preconditions[i], clocked_rules))
            flag(5, schema.name, "precondition: " + *e);
        auto params = i < bat.precond_params.size() ? bat.precond_params[i]
                                                    : std::vector<std::string>{};
        if ((int)params.size() != schema.arity)
            flag(5, schema.name, "precondition parameter count differs from arity");
        for (const auto& v : free_vars(bat.preconditions[i]))
            if (std::find(params.begin(), params.end(), v) == params.end())
                flag(5, schema.name, "precondition mentions unbound variable " + v);
    }

    // Clause 4: one SSA per relational fluent, clocked body.
    for (size_t i = 0; i < bat.fluents.size(); ++i) {
        const auto& fl = bat.fluents[i];
        if (i >= bat.ssas.size() || !bat.ssas[i].valid()) {
            flag(4, fl.name, "missing successor state axiom");
            continue;
        }
        if (auto e = check_formula(bat, bat.ssas[i], body_rules))
            flag(4, fl.name, "SSA: " + *e);
        auto params = i < bat.ssa_params.size() ? bat.ssa_params[i]
                                                : std::vector<std::string>{};
        if ((int)params.size() != fl.arity)
            flag(4, fl.name, "SSA parameter count differs from arity");
        for (const auto& v : free_vars(bat.ssas[i]))
            if (std::find(params.begin(), params.end(), v) == params.end())
                flag(4, fl.name, "SSA mentions unbound variable " + v);
    }

    // Clause 3: one reset condition per clock, time-independent.
    if (!bat.general) {
        for (size_t i = 0; i < bat.funcs.size(); ++i) {
            const auto& c = bat.funcs[i];
            if (i >= bat.resets.size() || !bat.resets[i].valid()) {
                flag(3, c.name, "missing reset condition");
                continue;
            }
            if (auto e = check_formula(bat, bat.resets[i], body_rules))
                flag(3, c.name, "reset condition: " + *e);
            if (mentions_func(bat.resets[i]))
                flag(3, c.name,
                     "reset condition is not time-independent (mentions a clock)");
            auto params = i < bat.reset_params.size() ? bat.reset_params[i]
                                                      : std::vector<std::string>{};
            if ((int)params.size() != c.arity)
                flag(3, c.name, "reset parameter count differs from arity");
            for (const auto& v : free_vars(bat.resets[i]))
                if (std::find(params.begin(), params.end(), v) == params.end())
                    flag(3, c.name, "reset condition mentions unbound variable " + v);
        }
    }

    return out;
}

std::vector<GroundAction> ground_actions(const BAT& bat) {
    std::vector<GroundAction> out;
    const size_t n = bat.objects.size();
    for (size_t s = 0; s < bat.schemas.size(); ++s) {
        if (bat.schemas[s].is_wait) continue;
        const int arity = bat.schemas[s].arity;
        std::vector<int32_t> args(arity, 0);
        size_t count = pow_objects(n, arity);
        for (size_t i = 0; i < count; ++i) {
            GroundAction a;
            a.schema = (int32_t)s;
            a.args = args;
            out.push_back(std::move(a));
            // advance mixed-radix counter (last argument fastest)
            for (int d = arity - 1; d >= 0; --d) {
                if (++args[d] < (int32_t)n) break;
                args[d] = 0;
            }
        }
    }
    return out;
}

uint32_t max_constant(const BAT& bat, const std::vector<Formula>& extra) {
    std::vector<Rat> bounds;
    for (const auto& f : bat.preconditions)
        if (f.valid()) collect_bounds(f, bounds);
    for (const auto& f : bat.ssas)
        if (f.valid()) collect_bounds(f, bounds);
    for (const auto& f : extra)
        if (f.valid()) collect_bounds(f, bounds);
    Rat best(0);
    for (const auto& b : bounds)
        if (rat_is_natural(b) && b > best) best = b;
    return (uint32_t)best.get_num().get_ui();
}

}  // namespace cbat
