#include "cbat/reach.hpp"

#include <algorithm>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cbat/regression.hpp"

namespace cbat {

Situation TransitionSystem::witness(uint32_t id) const {
    std::vector<GroundAction> reversed;
    for (uint32_t cur = id; states_[cur].parent != UINT32_MAX;
         cur = states_[cur].parent)
        reversed.push_back(states_[cur].via);
    Situation s;
    s.actions.assign(reversed.rbegin(), reversed.rend());
    return s;
}

bool exec_check(const BAT& bat, const Situation& sigma) {
    Situation prefix;
    for (const auto& act : sigma.actions) {
        if (act.schema == bat.wait_schema) {
            if (!act.duration || sgn(*act.duration) < 0) return false;
        } else if (!holds_poss(bat, act, prefix)) {
            return false;
        }
        prefix.actions.push_back(act);
    }
    return true;
}

// ---------------------------------------------------------------------------
// worklist construction
// ---------------------------------------------------------------------------

class AbstsBuilder {
  public:
    AbstsBuilder(const BAT& bat, uint32_t K, const BuildLimits& limits)
        : kit_(bat), limits_(limits) {
        if (bat.general)
            throw std::invalid_argument(
                "general action theory: not accepted by the clocked engine "
                "(use the bounded simulator)");
        ts_.k_ = K;
    }

    const GroundKit& kit() const { return kit_; }

    bool eval_at(uint32_t id, const Formula& f) const {
        return kit_.eval(ts_.states_[id].world, f);
    }

    /// Runs the worklist until exhaustion or until visit() returns true.
    /// visit is called once per discovered state, the initial one included.
    bool explore(const std::function<bool(uint32_t)>& visit) {
        WorldState init = kit_.initial();
        add_state(std::move(init), UINT32_MAX, GroundAction{});
        if (visit && visit(0)) return true;

        for (uint32_t next = 0; next < ts_.states_.size(); ++next) {
            // Candidate actions: every ground non-wait action, then one wait
            // per canonical time successor of this state's valuation.
            const WorldState snapshot = ts_.states_[next].world;
            for (const auto& act : kit_.actions()) {
                if (!kit_.possible(snapshot, act)) continue;
                if (step(next, snapshot, act, visit)) return true;
            }
            for (const Rat& tau : tsuccs(snapshot.funcs, ts_.k_)) {
                if (step(next, snapshot, kit_.bat().make_wait(tau), visit)) return true;
            }
        }
        return false;
    }

    TransitionSystem take() { return std::move(ts_); }

  private:
    bool step(uint32_t from, const WorldState& snapshot, const GroundAction& act,
              const std::function<bool(uint32_t)>& visit) {
        WorldState succ = kit_.apply(snapshot, act);
        AbstractState abs = abstract_state_of(kit_, succ, ts_.k_);
        auto it = index_.find(abs);
        uint32_t to;
        bool fresh = false;
        if (it == index_.end()) {
            to = add_state(std::move(succ), from, act);
            fresh = true;
        } else {
            to = it->second;
        }
        ts_.edges_.push_back(TransitionSystem::Edge{from, act, to});
        return fresh && visit && visit(to);
    }

    uint32_t add_state(WorldState world, uint32_t parent, GroundAction via) {
        if (ts_.states_.size() >= limits_.max_states)
            throw StateLimitError(limits_.max_states);
        AbstractState abs = abstract_state_of(kit_, world, ts_.k_);
        uint32_t id = (uint32_t)ts_.states_.size();
        uint32_t depth = parent == UINT32_MAX ? 0 : ts_.states_[parent].depth + 1;
        index_.emplace(abs, id);
        ts_.states_.push_back(
            TransitionSystem::StateRec{std::move(abs), std::move(world), parent,
                                       std::move(via), depth});
        return id;
    }

    GroundKit kit_;
    BuildLimits limits_;
    TransitionSystem ts_;
    std::unordered_map<AbstractState, uint32_t> index_;
};

TransitionSystem build_absts(const BAT& bat, uint32_t K, const BuildLimits& limits) {
    AbstsBuilder builder(bat, K, limits);
    builder.explore(nullptr);
    return builder.take();
}

uint32_t effective_K(const BAT& bat, const std::vector<Formula>& extra,
                     std::optional<uint32_t> K_override) {
    uint32_t needed = max_constant(bat, extra);
    if (!K_override) return needed;
    if (*K_override < needed)
        throw std::invalid_argument(
            "K override " + std::to_string(*K_override) +
            " is below the maximal constant " + std::to_string(needed));
    return *K_override;
}

ReachResult reachable(const BAT& bat, const Formula& phi,
                      std::optional<uint32_t> K_override, const BuildLimits& limits) {
    ReachResult result;
    result.K = effective_K(bat, {phi}, K_override);

    AbstsBuilder builder(bat, result.K, limits);
    std::optional<uint32_t> hit;
    builder.explore([&](uint32_t id) {
        if (!builder.eval_at(id, phi)) return false;
        hit = id;
        return true;
    });
    result.ts = builder.take();
    result.states_explored = result.ts.states().size();
    if (hit) {
        result.reachable = true;
        result.witness = result.ts.witness(*hit);
    }
    return result;
}

// ---------------------------------------------------------------------------
// exports
// ---------------------------------------------------------------------------

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

/// Fluent atoms whose truth differs from the initial state.
std::string fluent_diff(const BAT& bat, const WorldState& s) {
    std::string out;
    for (size_t i = 0; i < bat.num_fluent_atoms(); ++i) {
        bool now = s.bit(i);
        if (now == (bool)bat.init_fluents[i]) continue;
        if (!out.empty()) out += " ";
        out += (now ? "+" : "-") + bat.fluent_atom_name(i);
    }
    return out;
}

}  // namespace

std::string TransitionSystem::to_dot(const BAT& bat) const {
    std::string out = "digraph absts {\n  rankdir=LR;\n  node [shape=box fontsize=10];\n";
    out += "  __init [shape=none label=\"\"];\n  __init -> q0;\n";
    for (size_t i = 0; i < states_.size(); ++i) {
        std::string label = "q" + std::to_string(i);
        std::string diff = fluent_diff(bat, states_[i].world);
        if (!diff.empty()) label += "\\n" + dot_escape(diff);
        label += "\\n" + dot_escape(states_[i].abs.region.render(bat));
        out += "  q" + std::to_string(i) + " [label=\"" + label + "\"];\n";
    }
    for (const auto& e : edges_) {
        out += "  q" + std::to_string(e.from) + " -> q" + std::to_string(e.to) +
               " [label=\"" + dot_escape(bat.action_str(e.label)) + "\"];\n";
    }
    out += "}\n";
    return out;
}

std::string TransitionSystem::to_json(const BAT& bat) const {
    nlohmann::ordered_json doc;
    doc["schema"] = "absts/1";
    doc["K"] = k_;
    doc["states"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < states_.size(); ++i) {
        nlohmann::ordered_json st;
        st["id"] = i;
        st["region"] = states_[i].abs.region.render(bat);
        auto atoms = nlohmann::ordered_json::array();
        for (size_t a = 0; a < bat.num_fluent_atoms(); ++a)
            if (states_[i].world.bit(a)) atoms.push_back(bat.fluent_atom_name(a));
        st["fluents"] = std::move(atoms);
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
    doc["witnesses"] = nlohmann::ordered_json::object();
    for (size_t i = 0; i < states_.size(); ++i) {
        auto acts = nlohmann::ordered_json::array();
        for (const auto& a : witness((uint32_t)i).actions)
            acts.push_back(bat.action_str(a));
        doc["witnesses"][std::to_string(i)] = std::move(acts);
    }
    return doc.dump(2) + "\n";
}

}  // namespace cbat
