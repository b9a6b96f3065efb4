// ============================================================================
// reach.hpp — time-abstract transition system and reachability
// ============================================================================
//
// Breadth-first worklist construction of the finite quotient of the situation
// tree: pop a representative situation, enumerate all ground non-wait actions
// plus one wait per canonical time successor, keep every successor whose
// abstract state (fluent assignment + region) is new. The first
// representative that discovers a class is stored as its witness, so
// witnesses are shortest in action count.
// ============================================================================

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbat/regions.hpp"
#include "cbat/world.hpp"

namespace cbat {

struct BuildLimits {
    uint64_t max_states = 1'000'000;
};

/// The configurable safety valve tripped: the theory guarantees finiteness,
/// so hitting the limit means either a modeling mistake or a too-small cap.
struct StateLimitError : std::runtime_error {
    explicit StateLimitError(uint64_t limit)
        : std::runtime_error("state limit of " + std::to_string(limit) +
                             " states exceeded") {}
};

class TransitionSystem {
  public:
    struct StateRec {
        AbstractState abs;
        WorldState world;
        uint32_t parent = UINT32_MAX;  // discovery edge; UINT32_MAX at the root
        GroundAction via;
        uint32_t depth = 0;
    };
    struct Edge {
        uint32_t from;
        GroundAction label;
        uint32_t to;
    };

    const std::vector<StateRec>& states() const { return states_; }
    const std::vector<Edge>& edges() const { return edges_; }
    uint32_t initial() const { return 0; }
    uint32_t K() const { return k_; }

    /// Shortest representative situation of a class (walks discovery edges).
    Situation witness(uint32_t id) const;

    std::string to_dot(const BAT& bat) const;
    std::string to_json(const BAT& bat) const;  // schema "absts/1", deterministic

    friend class AbstsBuilder;

  private:
    std::vector<StateRec> states_;
    std::vector<Edge> edges_;
    uint32_t k_ = 0;
};

struct ReachResult {
    bool reachable = false;
    std::optional<Situation> witness;
    uint64_t states_explored = 0;
    uint32_t K = 0;
    TransitionSystem ts;  // full on a negative verdict, partial on early stop
};

/// exec(sigma): every prefix action possible where it occurred. Decided by
/// regression against the initial theory (waits are always possible).
bool exec_check(const BAT& bat, const Situation& sigma);

/// Full construction of the time-abstract transition system.
TransitionSystem build_absts(const BAT& bat, uint32_t K, const BuildLimits& limits = {});

/// Decides reachability of phi. K defaults to the maximal constant of the
/// theory and the query; a smaller explicit K is rejected.
ReachResult reachable(const BAT& bat, const Formula& phi,
                      std::optional<uint32_t> K_override = std::nullopt,
                      const BuildLimits& limits = {});

/// Effective K for a query; throws std::invalid_argument if the override is
/// below the maximal constant.
uint32_t effective_K(const BAT& bat, const std::vector<Formula>& extra,
                     std::optional<uint32_t> K_override);

}  // namespace cbat
