#include "cbat/encoders.hpp"

#include <set>
#include <stdexcept>

namespace cbat {

// ---------------------------------------------------------------------------
// two-counter machines
// ---------------------------------------------------------------------------

const TwoCounterMachine::Instr* TwoCounterMachine::find(const std::string& label) const {
    for (const auto& [l, instr] : instructions)
        if (l == label) return &instr;
    return nullptr;
}

std::vector<std::string> TwoCounterMachine::validate() const {
    std::vector<std::string> problems;
    if (instructions.empty()) {
        problems.push_back("machine has no instructions");
        return problems;
    }
    std::set<std::string> labels;
    for (const auto& [l, instr] : instructions)
        if (!labels.insert(l).second)
            problems.push_back("duplicate instruction label '" + l + "'");
    auto target = [&](const std::string& t, const std::string& from) {
        if (!labels.count(t))
            problems.push_back("goto target '" + t + "' of '" + from + "' is undefined");
    };
    for (const auto& [l, instr] : instructions) {
        if (const auto* inc = std::get_if<Inc>(&instr)) {
            if (inc->counter != 1 && inc->counter != 2)
                problems.push_back("counter index out of range in '" + l + "'");
            target(inc->next, l);
        } else if (const auto* dec = std::get_if<Dec>(&instr)) {
            if (dec->counter != 1 && dec->counter != 2)
                problems.push_back("counter index out of range in '" + l + "'");
            target(dec->next_pos, l);
            target(dec->next_zero, l);
        }
    }
    return problems;
}

Interp2cmResult interp_2cm(const TwoCounterMachine& m, uint64_t max_steps) {
    Interp2cmResult r;
    std::string pc = m.start();
    uint64_t counters[3] = {0, 0, 0};
    while (r.steps < max_steps) {
        const auto* instr = m.find(pc);
        if (!instr) throw std::invalid_argument("undefined instruction '" + pc + "'");
        if (std::holds_alternative<TwoCounterMachine::Halt>(*instr)) {
            r.halted = true;
            break;
        }
        r.labels.push_back(pc);
        ++r.steps;
        if (const auto* inc = std::get_if<TwoCounterMachine::Inc>(instr)) {
            ++counters[inc->counter];
            pc = inc->next;
        } else {
            const auto& dec = std::get<TwoCounterMachine::Dec>(*instr);
            if (counters[dec.counter] > 0) {
                --counters[dec.counter];
                pc = dec.next_pos;
            } else {
                pc = dec.next_zero;
            }
        }
    }
    if (!r.halted) {
        // the step budget may run out exactly on arrival at HALT
        const auto* instr = m.find(pc);
        r.halted = instr && std::holds_alternative<TwoCounterMachine::Halt>(*instr);
    }
    r.c1 = counters[1];
    r.c2 = counters[2];
    return r;
}

namespace {

/// Shared scaffolding of both machine encodings: label objects, one action
/// per non-halt instruction, the next/1 fluent, Poss(i) = next(i).
struct MachineSkeleton {
    BAT bat;
    Formula halt_query;
};

MachineSkeleton machine_skeleton(const TwoCounterMachine& m, const char* name) {
    auto problems = m.validate();
    if (!problems.empty()) throw std::invalid_argument(problems.front());

    MachineSkeleton sk;
    BAT& bat = sk.bat;
    bat.name = name;
    bat.general = true;
    for (const auto& [label, instr] : m.instructions) {
        bat.objects.push_back(ObjectConst{label});
        if (!std::holds_alternative<TwoCounterMachine::Halt>(instr))
            bat.schemas.push_back(ActionSchema{label, 0, false});
    }
    bat.wait_schema = (int32_t)bat.schemas.size();
    bat.schemas.push_back(ActionSchema{"wait", 0, true});
    bat.fluents.push_back(PredDecl{"next", 1});
    bat.funcs.push_back(FuncDecl{"f1", 0});
    bat.funcs.push_back(FuncDecl{"f2", 0});

    bat.init_fluents.assign(bat.num_fluent_atoms(), false);
    bat.init_rigids.assign(bat.num_rigid_atoms(), false);
    bat.init_funcs.assign(2, Rat(0));
    bat.init_fluents[bat.fluent_atom_index(0, {bat.object_index(m.start())})] = true;

    bat.preconditions.resize(bat.schemas.size());
    bat.precond_params.resize(bat.schemas.size());
    bat.preconditions[bat.wait_schema] = Formula::truth(true);
    for (size_t s = 0; s + 1 < bat.schemas.size(); ++s)
        bat.preconditions[s] =
            Formula::rel(0, {Term::make_obj(bat.object_index(bat.schemas[s].name))});

    bat.ssa_params = {{"i"}};
    bat.num_ssas.resize(2);

    // halting query: next(h) over the halt-labeled instructions
    sk.halt_query = Formula::truth(false);
    for (const auto& [label, instr] : m.instructions)
        if (std::holds_alternative<TwoCounterMachine::Halt>(instr))
            sk.halt_query = Formula::lor(
                sk.halt_query,
                Formula::rel(0, {Term::make_obj(bat.object_index(label))}));
    return sk;
}

Formula act_is(const BAT& bat, const std::string& label) {
    int32_t schema = bat.schema_index(label);
    if (schema < 0) throw std::logic_error("no action for label " + label);
    return Formula::act_eq(schema, {});
}

/// Zero test / positive test for a counter fluent, in both encodings.
struct CounterTests {
    Formula pos;   // plain: f > 0      bounded: f < 2
    Formula zero;  // plain: f == 0     bounded: f == 2
};

CounterTests counter_tests(int32_t func, bool bounded) {
    if (bounded)
        return {Formula::fn_cmp(func, {}, CmpOp::Lt, Rat(2)),
                Formula::fn_cmp(func, {}, CmpOp::Eq, Rat(2))};
    return {Formula::fn_cmp(func, {}, CmpOp::Gt, Rat(0)),
            Formula::fn_cmp(func, {}, CmpOp::Eq, Rat(0))};
}

EncodedMachine encode_impl(const TwoCounterMachine& m, bool bounded) {
    MachineSkeleton sk = machine_skeleton(m, bounded ? "m2cm_bounded" : "m2cm");
    BAT& bat = sk.bat;

    if (bounded) {
        bat.init_funcs[0] = Rat(2);
        bat.init_funcs[1] = Rat(2);
    }

    // SSA for next(i): the executed instruction determines the successor,
    // decrements branch on the counter test.
    Formula next_body = Formula::truth(false);
    Term i = Term::make_var("i");
    for (const auto& [label, instr] : m.instructions) {
        if (const auto* inc = std::get_if<TwoCounterMachine::Inc>(&instr)) {
            next_body = Formula::lor(
                next_body,
                Formula::land(act_is(bat, label),
                              Formula::obj_eq(i, Term::make_obj(bat.object_index(inc->next)))));
        } else if (const auto* dec = std::get_if<TwoCounterMachine::Dec>(&instr)) {
            CounterTests tests = counter_tests(dec->counter - 1, bounded);
            Formula branch = Formula::lor(
                Formula::land(tests.pos,
                              Formula::obj_eq(i, Term::make_obj(
                                                     bat.object_index(dec->next_pos)))),
                Formula::land(tests.zero,
                              Formula::obj_eq(i, Term::make_obj(
                                                     bat.object_index(dec->next_zero)))));
            next_body = Formula::lor(next_body,
                                     Formula::land(act_is(bat, label), branch));
        }
    }
    bat.ssas = {next_body};

    // Counter updates.
    for (int c = 0; c < 2; ++c) {
        NumSSA ssa;
        for (const auto& [label, instr] : m.instructions) {
            if (const auto* inc = std::get_if<TwoCounterMachine::Inc>(&instr)) {
                if (inc->counter - 1 != c) continue;
                ssa.cases.push_back(NumCase{act_is(bat, label),
                                            bounded ? NumUpdateKind::Half
                                                    : NumUpdateKind::AddOne,
                                            Rat(0)});
            } else if (const auto* dec = std::get_if<TwoCounterMachine::Dec>(&instr)) {
                if (dec->counter - 1 != c) continue;
                CounterTests tests = counter_tests(c, bounded);
                ssa.cases.push_back(
                    NumCase{Formula::land(act_is(bat, label), tests.pos),
                            bounded ? NumUpdateKind::Double : NumUpdateKind::SubOne,
                            Rat(0)});
                if (bounded)
                    ssa.cases.push_back(
                        NumCase{Formula::land(act_is(bat, label), tests.zero),
                                NumUpdateKind::Const, Rat(2)});
                else
                    ssa.cases.push_back(
                        NumCase{Formula::land(act_is(bat, label), tests.zero),
                                NumUpdateKind::Const, Rat(0)});
            }
        }
        bat.num_ssas[c] = std::move(ssa);
    }

    return EncodedMachine{std::move(bat), std::move(sk.halt_query)};
}

}  // namespace

EncodedMachine encode_2cm(const TwoCounterMachine& m) { return encode_impl(m, false); }

EncodedMachine encode_2cm_bounded(const TwoCounterMachine& m) {
    return encode_impl(m, true);
}

// ---------------------------------------------------------------------------
// bounded simulation
// ---------------------------------------------------------------------------

namespace {

SimTrace simulate(const BAT& bat, uint64_t max_depth,
                  const std::vector<GroundAction>* script, const Formula* halt_query) {
    GroundKit kit(bat);
    SimTrace trace;
    trace.initial = kit.initial();
    WorldState state = trace.initial;
    uint64_t depth = script ? script->size() : max_depth;
    for (uint64_t step = 0; step < depth; ++step) {
        if (halt_query && kit.eval(state, *halt_query)) {
            trace.stop = SimStop::Halted;
            return trace;
        }
        GroundAction chosen;
        if (script) {
            chosen = (*script)[step];
            if (!kit.possible(state, chosen)) {
                trace.stop = SimStop::Blocked;
                return trace;
            }
        } else {
            bool found = false;
            for (const auto& act : kit.actions()) {
                if (!kit.possible(state, act)) continue;
                if (found)
                    throw std::invalid_argument(
                        "nondeterministic theory: several actions possible");
                chosen = act;
                found = true;
            }
            if (!found) {
                trace.stop = SimStop::Blocked;
                return trace;
            }
        }
        state = kit.apply(state, chosen);
        trace.steps.push_back(SimTrace::Step{std::move(chosen), state});
    }
    if (halt_query && kit.eval(state, *halt_query)) {
        trace.stop = SimStop::Halted;
        return trace;
    }
    trace.stop = SimStop::DepthReached;
    return trace;
}

}  // namespace

SimTrace simulate_general(const BAT& bat, uint64_t max_depth, const Formula* halt_query) {
    return simulate(bat, max_depth, nullptr, halt_query);
}

SimTrace simulate_actions(const BAT& bat, const std::vector<GroundAction>& actions,
                          const Formula* halt_query) {
    return simulate(bat, actions.size(), &actions, halt_query);
}

// ---------------------------------------------------------------------------
// timed automata
// ---------------------------------------------------------------------------

std::vector<std::string> TimedAutomaton::validate() const {
    std::vector<std::string> problems;
    std::set<std::string> locs(locations.begin(), locations.end());
    std::set<std::string> clks(clocks.begin(), clocks.end());
    if (locations.empty()) problems.push_back("automaton has no locations");
    if (locs.size() != locations.size()) problems.push_back("duplicate location");
    if (clks.size() != clocks.size()) problems.push_back("duplicate clock");
    if (initial.empty())
        problems.push_back("no initial location");
    else if (!locs.count(initial))
        problems.push_back("initial location '" + initial + "' is undeclared");
    for (const auto& f : finals)
        if (!locs.count(f)) problems.push_back("final location '" + f + "' is undeclared");
    for (const auto& sw : switches) {
        if (!locs.count(sw.from))
            problems.push_back("switch source '" + sw.from + "' is undeclared");
        if (!locs.count(sw.to))
            problems.push_back("switch target '" + sw.to + "' is undeclared");
        for (const auto& g : sw.guard)
            if (!clks.count(g.clock))
                problems.push_back("guard clock '" + g.clock + "' is undeclared");
        for (const auto& r : sw.resets)
            if (!clks.count(r))
                problems.push_back("reset clock '" + r + "' is undeclared");
    }
    return problems;
}

EncodedTA encode_ta(const TimedAutomaton& ta) {
    auto problems = ta.validate();
    if (!problems.empty()) throw std::invalid_argument(problems.front());

    BAT bat;
    bat.name = "ta";
    for (const auto& l : ta.locations) bat.objects.push_back(ObjectConst{l});
    for (size_t i = 0; i < ta.switches.size(); ++i)
        bat.schemas.push_back(ActionSchema{"sw" + std::to_string(i), 0, false});
    bat.wait_schema = (int32_t)bat.schemas.size();
    bat.schemas.push_back(ActionSchema{"wait", 0, true});
    bat.fluents.push_back(PredDecl{"loc", 1});
    for (const auto& c : ta.clocks) bat.funcs.push_back(FuncDecl{c, 0});

    bat.init_fluents.assign(bat.num_fluent_atoms(), false);
    bat.init_rigids.assign(bat.num_rigid_atoms(), false);
    bat.init_funcs.assign(bat.num_func_terms(), Rat(0));
    bat.init_fluents[bat.fluent_atom_index(0, {bat.object_index(ta.initial)})] = true;

    // Poss(sw_i) := loc(from) & guard
    bat.preconditions.resize(bat.schemas.size());
    bat.precond_params.resize(bat.schemas.size());
    bat.preconditions[bat.wait_schema] = Formula::truth(true);
    for (size_t i = 0; i < ta.switches.size(); ++i) {
        const TASwitch& sw = ta.switches[i];
        Formula pre =
            Formula::rel(0, {Term::make_obj(bat.object_index(sw.from))});
        for (const auto& g : sw.guard)
            pre = Formula::land(pre, Formula::fn_cmp(bat.func_index(g.clock), {}, g.op,
                                                     Rat((long)g.bound)));
        bat.preconditions[i] = std::move(pre);
    }

    // loc(l) := switch took us there, or stayed put and no switch moved loc
    Term l = Term::make_var("l");
    Formula moved = Formula::truth(false);
    Formula any_switch = Formula::truth(false);
    for (size_t i = 0; i < ta.switches.size(); ++i) {
        Formula is_sw = Formula::act_eq((int32_t)i, {});
        moved = Formula::lor(
            moved, Formula::land(is_sw, Formula::obj_eq(
                                            l, Term::make_obj(bat.object_index(
                                                   ta.switches[i].to)))));
        any_switch = Formula::lor(any_switch, is_sw);
    }
    bat.ssas = {Formula::lor(
        moved, Formula::land(Formula::rel(0, {l}), Formula::lnot(any_switch)))};
    bat.ssa_params = {{"l"}};

    // reset conditions cover each switch's reset set
    bat.resets.resize(bat.funcs.size());
    bat.reset_params.resize(bat.funcs.size());
    for (size_t c = 0; c < bat.funcs.size(); ++c) {
        Formula cond = Formula::truth(false);
        for (size_t i = 0; i < ta.switches.size(); ++i)
            for (const auto& r : ta.switches[i].resets)
                if (r == bat.funcs[c].name)
                    cond = Formula::lor(cond, Formula::act_eq((int32_t)i, {}));
        bat.resets[c] = std::move(cond);
    }

    Formula query = Formula::truth(false);
    for (const auto& f : ta.finals)
        query = Formula::lor(query,
                             Formula::rel(0, {Term::make_obj(bat.object_index(f))}));
    return EncodedTA{std::move(bat), std::move(query)};
}

}  // namespace cbat
