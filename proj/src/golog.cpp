#include "cbat/golog.hpp"

#include <functional>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cbat/dsl.hpp"

namespace cbat {

namespace {

inline size_t hash_mix(size_t h, size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Program Program::make(PNode n) {
    size_t h = (size_t)n.kind * 0x100000001b3ULL;
    h = hash_mix(h, (size_t)(n.schema + 1));
    for (const auto& t : n.args) {
        h = hash_mix(h, std::hash<std::string>{}(t.var));
        h = hash_mix(h, (size_t)(t.obj + 1));
    }
    if (n.test.valid()) h = hash_mix(h, n.test.hash());
    h = hash_mix(h, std::hash<std::string>{}(n.var));
    if (n.left.valid()) h = hash_mix(h, n.left.hash());
    if (n.right.valid()) h = hash_mix(h, n.right.hash());
    n.hash = h;
    return Program(std::make_shared<const PNode>(std::move(n)));
}

Program Program::act(int32_t schema, std::vector<Term> args) {
    PNode n;
    n.kind = PKind::Act;
    n.schema = schema;
    n.args = std::move(args);
    return make(std::move(n));
}

Program Program::test(Formula f) {
    PNode n;
    n.kind = PKind::Test;
    n.test = std::move(f);
    return make(std::move(n));
}

Program Program::nil() {
    static const Program n = test(Formula::truth(true));
    return n;
}

Program Program::seq(Program a, Program b) {
    PNode n;
    n.kind = PKind::Seq;
    n.left = std::move(a);
    n.right = std::move(b);
    return make(std::move(n));
}

Program Program::choice(Program a, Program b) {
    PNode n;
    n.kind = PKind::Choice;
    n.left = std::move(a);
    n.right = std::move(b);
    return make(std::move(n));
}

Program Program::pick(std::string var, Program body) {
    PNode n;
    n.kind = PKind::Pick;
    n.var = std::move(var);
    n.left = std::move(body);
    return make(std::move(n));
}

Program Program::star(Program body) {
    PNode n;
    n.kind = PKind::Star;
    n.left = std::move(body);
    return make(std::move(n));
}

Program Program::conc(Program a, Program b) {
    PNode n;
    n.kind = PKind::Conc;
    n.left = std::move(a);
    n.right = std::move(b);
    return make(std::move(n));
}

Program Program::with_span(SourceSpan s) const {
    PNode n = *node_;
    n.span = std::move(s);
    return Program(std::make_shared<const PNode>(std::move(n)));
}

bool Program::operator==(const Program& other) const {
    if (node_ == other.node_) return true;
    if (!node_ || !other.node_) return false;
    const PNode& a = *node_;
    const PNode& b = *other.node_;
    if (a.hash != b.hash || a.kind != b.kind || a.schema != b.schema ||
        a.args != b.args || a.var != b.var)
        return false;
    if (a.test.valid() != b.test.valid()) return false;
    if (a.test.valid() && !(a.test == b.test)) return false;
    if (a.left.valid() != b.left.valid() || a.right.valid() != b.right.valid())
        return false;
    if (a.left.valid() && !(a.left == b.left)) return false;
    if (a.right.valid() && !(a.right == b.right)) return false;
    return true;
}

Program program_subst(const Program& p, const std::string& var, int32_t obj) {
    switch (p.kind()) {
        case PKind::Act: {
            std::vector<Term> args;
            args.reserve(p.args().size());
            bool changed = false;
            for (const auto& t : p.args()) {
                if (t.is_var() && t.var == var) {
                    args.push_back(Term::make_obj(obj));
                    changed = true;
                } else {
                    args.push_back(t);
                }
            }
            return changed ? Program::act(p.schema(), std::move(args)) : p;
        }
        case PKind::Test:
            return Program::test(subst_objects(p.test_formula(), {{var, obj}}));
        case PKind::Seq:
            return Program::seq(program_subst(p.left(), var, obj),
                                program_subst(p.right(), var, obj));
        case PKind::Choice:
            return Program::choice(program_subst(p.left(), var, obj),
                                   program_subst(p.right(), var, obj));
        case PKind::Pick:
            if (p.var() == var) return p;  // shadowed
            return Program::pick(p.var(), program_subst(p.left(), var, obj));
        case PKind::Star:
            return Program::star(program_subst(p.left(), var, obj));
        case PKind::Conc:
            return Program::conc(program_subst(p.left(), var, obj),
                                 program_subst(p.right(), var, obj));
    }
    throw std::logic_error("program_subst: bad program kind");
}

std::vector<Formula> program_tests(const Program& p) {
    std::vector<Formula> out;
    std::function<void(const Program&)> walk = [&](const Program& q) {
        switch (q.kind()) {
            case PKind::Act: return;
            case PKind::Test: out.push_back(q.test_formula()); return;
            case PKind::Pick:
            case PKind::Star: walk(q.left()); return;
            default:
                walk(q.left());
                walk(q.right());
        }
    };
    walk(p);
    return out;
}

// ---------------------------------------------------------------------------
// Final / Trans
// ---------------------------------------------------------------------------

bool final_in(const GroundKit& kit, const Program& p, const WorldState& s) {
    switch (p.kind()) {
        case PKind::Act:
            return false;
        case PKind::Test:
            return kit.eval(s, p.test_formula());
        case PKind::Seq:
            return final_in(kit, p.left(), s) && final_in(kit, p.right(), s);
        case PKind::Choice:
            return final_in(kit, p.left(), s) || final_in(kit, p.right(), s);
        case PKind::Pick:
            for (int32_t o = 0; o < (int32_t)kit.bat().objects.size(); ++o)
                if (final_in(kit, program_subst(p.left(), p.var(), o), s)) return true;
            return false;
        case PKind::Star:
            return true;
        case PKind::Conc:
            return final_in(kit, p.left(), s) && final_in(kit, p.right(), s);
    }
    throw std::logic_error("final_in: bad program kind");
}

namespace {

/// Enumerates (action, remaining) pairs; the caller pairs them with successor
/// states. Wait steps yield one entry per canonical duration.
void enum_steps(const GroundKit& kit, const Program& p, const WorldState& s,
                const std::vector<Rat>& waits,
                std::vector<std::pair<GroundAction, Program>>& out) {
    const BAT& bat = kit.bat();
    switch (p.kind()) {
        case PKind::Act: {
            if (p.schema() == bat.wait_schema) {
                for (const Rat& tau : waits)
                    out.emplace_back(bat.make_wait(tau), Program::nil());
                return;
            }
            GroundAction act;
            act.schema = p.schema();
            act.args.reserve(p.args().size());
            for (const auto& t : p.args()) {
                if (t.is_var())
                    throw std::invalid_argument("program action has unbound variable " +
                                                t.var);
                act.args.push_back(t.obj);
            }
            if (kit.possible(s, act)) out.emplace_back(std::move(act), Program::nil());
            return;
        }
        case PKind::Test:
            return;  // tests do not step
        case PKind::Seq: {
            std::vector<std::pair<GroundAction, Program>> first;
            enum_steps(kit, p.left(), s, waits, first);
            for (auto& [a, gamma] : first)
                out.emplace_back(std::move(a), Program::seq(gamma, p.right()));
            if (final_in(kit, p.left(), s)) enum_steps(kit, p.right(), s, waits, out);
            return;
        }
        case PKind::Choice:
            enum_steps(kit, p.left(), s, waits, out);
            enum_steps(kit, p.right(), s, waits, out);
            return;
        case PKind::Pick:
            for (int32_t o = 0; o < (int32_t)bat.objects.size(); ++o)
                enum_steps(kit, program_subst(p.left(), p.var(), o), s, waits, out);
            return;
        case PKind::Star: {
            std::vector<std::pair<GroundAction, Program>> body;
            enum_steps(kit, p.left(), s, waits, body);
            for (auto& [a, gamma] : body)
                out.emplace_back(std::move(a), Program::seq(gamma, p));
            return;
        }
        case PKind::Conc: {
            std::vector<std::pair<GroundAction, Program>> part;
            enum_steps(kit, p.left(), s, waits, part);
            for (auto& [a, gamma] : part)
                out.emplace_back(std::move(a), Program::conc(gamma, p.right()));
            part.clear();
            enum_steps(kit, p.right(), s, waits, part);
            for (auto& [a, gamma] : part)
                out.emplace_back(std::move(a), Program::conc(p.left(), gamma));
            return;
        }
    }
    throw std::logic_error("enum_steps: bad program kind");
}

}  // namespace

std::vector<TransStep> trans_steps(const GroundKit& kit, const Program& p,
                                   const WorldState& s, uint32_t K) {
    std::vector<std::pair<GroundAction, Program>> pairs;
    enum_steps(kit, p, s, tsuccs(s.funcs, K), pairs);

    // Deduplicate while keeping first-found order; identical (action,
    // remaining) pairs arise from overlapping branches.
    std::vector<TransStep> steps;
    steps.reserve(pairs.size());
    for (auto& [act, rest] : pairs) {
        bool dup = false;
        for (const auto& seen : steps)
            if (seen.act == act && seen.rest == rest) {
                dup = true;
                break;
            }
        if (dup) continue;
        steps.push_back(TransStep{act, rest, kit.apply(s, act)});
    }
    return steps;
}

// ---------------------------------------------------------------------------
// program transition system
// ---------------------------------------------------------------------------

std::vector<GroundAction> ProgramTransitionSystem::path_to(uint32_t id) const {
    std::vector<GroundAction> reversed;
    for (uint32_t cur = id; states_[cur].parent != UINT32_MAX;
         cur = states_[cur].parent)
        reversed.push_back(states_[cur].via);
    return {reversed.rbegin(), reversed.rend()};
}

namespace {

struct ProgKey {
    AbstractState abs;
    Program prog;
    bool operator==(const ProgKey& o) const {
        return prog == o.prog && abs == o.abs;
    }
};

struct ProgKeyHash {
    size_t operator()(const ProgKey& k) const {
        return hash_mix(k.abs.hash(), k.prog.hash());
    }
};

}  // namespace

class ProgramTsBuilder {
  public:
    ProgramTsBuilder(const BAT& bat, uint32_t K, const BuildLimits& limits)
        : kit_(bat), limits_(limits) {
        if (bat.general)
            throw std::invalid_argument(
                "general action theory: not accepted by the clocked engine");
        ts_.k_ = K;
    }

    bool is_final(uint32_t id) const { return ts_.states_[id].final; }

    bool explore(const Program& p0, const std::function<bool(uint32_t)>& visit) {
        add_state(kit_.initial(), p0, UINT32_MAX, GroundAction{});
        if (visit && visit(0)) return true;
        for (uint32_t next = 0; next < ts_.states_.size(); ++next) {
            const WorldState snapshot = ts_.states_[next].world;
            const Program remaining = ts_.states_[next].remaining;
            for (auto& step : trans_steps(kit_, remaining, snapshot, ts_.k_)) {
                ProgKey key{abstract_state_of(kit_, step.next, ts_.k_), step.rest};
                auto it = index_.find(key);
                uint32_t to;
                bool fresh = false;
                if (it == index_.end()) {
                    to = add_state(std::move(step.next), step.rest, next, step.act);
                    fresh = true;
                } else {
                    to = it->second;
                }
                ts_.edges_.push_back(ProgramTransitionSystem::Edge{next, step.act, to});
                if (fresh && visit && visit(to)) return true;
            }
        }
        return false;
    }

    ProgramTransitionSystem take() { return std::move(ts_); }

  private:
    uint32_t add_state(WorldState world, Program remaining, uint32_t parent,
                       GroundAction via) {
        if (ts_.states_.size() >= limits_.max_states)
            throw StateLimitError(limits_.max_states);
        AbstractState abs = abstract_state_of(kit_, world, ts_.k_);
        index_.emplace(ProgKey{abs, remaining}, (uint32_t)ts_.states_.size());
        uint32_t id = (uint32_t)ts_.states_.size();
        uint32_t depth = parent == UINT32_MAX ? 0 : ts_.states_[parent].depth + 1;
        bool fin = final_in(kit_, remaining, world);
        ts_.states_.push_back(ProgramTransitionSystem::StateRec{
            std::move(abs), std::move(remaining), std::move(world), fin, parent,
            std::move(via), depth});
        return id;
    }

    GroundKit kit_;
    BuildLimits limits_;
    ProgramTransitionSystem ts_;
    std::unordered_map<ProgKey, uint32_t, ProgKeyHash> index_;
};

ProgramTransitionSystem build_program_ts(const BAT& bat, const Program& p, uint32_t K,
                                         const BuildLimits& limits) {
    ProgramTsBuilder builder(bat, K, limits);
    builder.explore(p, nullptr);
    return builder.take();
}

RealizationResult find_realization(const BAT& bat, const Program& p,
                                   std::optional<uint32_t> K_override,
                                   const BuildLimits& limits) {
    RealizationResult result;
    result.K = effective_K(bat, program_tests(p), K_override);

    ProgramTsBuilder builder(bat, result.K, limits);
    std::optional<uint32_t> hit;
    builder.explore(p, [&](uint32_t id) {
        if (!builder.is_final(id)) return false;
        hit = id;
        return true;
    });
    ProgramTransitionSystem ts = builder.take();
    result.states_explored = ts.states().size();
    if (hit) result.actions = ts.path_to(*hit);
    return result;
}

bool replay_realization(const BAT& bat, const Program& p,
                        const std::vector<GroundAction>& actions, uint32_t K) {
    GroundKit kit(bat);
    // The step relation is nondeterministic in the remaining program, so
    // track every (remaining, state) configuration consistent with the trace.
    std::vector<std::pair<Program, WorldState>> configs{{p, kit.initial()}};
    for (const auto& act : actions) {
        std::vector<std::pair<Program, WorldState>> next;
        for (const auto& [prog, state] : configs) {
            for (auto& step : trans_steps(kit, prog, state, K)) {
                if (!(step.act == act)) continue;
                bool dup = false;
                for (const auto& [np, ns] : next)
                    if (np == step.rest && ns == step.next) {
                        dup = true;
                        break;
                    }
                if (!dup) next.emplace_back(step.rest, std::move(step.next));
            }
        }
        configs = std::move(next);
        if (configs.empty()) return false;
    }
    for (const auto& [prog, state] : configs)
        if (final_in(kit, prog, state)) return true;
    return false;
}

std::string ProgramTransitionSystem::to_json(const BAT& bat) const {
    nlohmann::ordered_json doc;
    doc["schema"] = "absts-prog/1";
    doc["K"] = k_;
    doc["states"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < states_.size(); ++i) {
        nlohmann::ordered_json st;
        st["id"] = i;
        st["region"] = states_[i].abs.region.render(bat);
        st["program"] = serialize_program(states_[i].remaining, bat);
        st["final"] = states_[i].final;
        doc["states"].push_back(std::move(st));
    }
    doc["initial"] = 0;
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : edges_) {
        nlohmann::ordered_json edge;
        edge["from"] = e.from;
        edge["action"] = bat.action_str(e.label);
        edge["to"] = e.to;
        doc["edges"].push_back(std::move(edge));
    }
    return doc.dump(2) + "\n";
}

}  // namespace cbat
