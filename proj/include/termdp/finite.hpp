#pragma once

#include "termdp/problem.hpp"

#include <cstdint>
#include <vector>

namespace termdp {

/// Zero-cost cycles among non-terminal states.
struct CycleReport {
    /// One witness cycle per strongly connected component of the zero-cost
    /// arc subgraph that contains a cycle. Each cycle lists its states in
    /// traversal order; the last state has a zero-cost arc back to the first.
    std::vector<std::vector<StateIndex>> zero_cost_cycles;
    /// States lying on at least one zero-cost cycle.
    StateMask on_zero_cost_cycle;
    bool has_positive_cycles_only = true;
};

struct ReachabilityReport {
    StateMask can_terminate;
    std::vector<StateIndex> cannot_terminate;

    bool all() const noexcept { return cannot_terminate.empty(); }
};

/// Cost of a stationary policy on a deterministic graph problem.
///
/// Follows the unique trajectory from every state. A trajectory that closes
/// a cycle of positive total cost makes every state on or feeding into the
/// cycle infinite; a zero-cost cycle contributes nothing, so states reaching
/// it get the cost accumulated up to the cycle entry.
ValueFunction evaluate_policy(const Problem& p, const Policy& mu);

/// Zero-cost cycles among non-terminal states, over the arcs of every
/// (control, disturbance) pair. Requires a graph problem.
CycleReport positive_cycle_check(const Problem& p);

/// Backward closure from the terminal set over finite-cost arcs of a
/// deterministic problem.
ReachabilityReport terminating_reachability(const Problem& p);

/// Shortest-path distance to the terminal set (inf when unreachable).
/// Refuses problems with zero-cost cycles, where the optimal cost may be
/// attained without terminating and differs from this distance.
ValueFunction oracle_dijkstra(const Problem& p);

/// Shortest-path distance to the terminal set without the zero-cycle check:
/// the infimum of the cost over terminating control sequences.
ValueFunction terminating_distance(const Problem& p);

/// Pointwise minimum of evaluate_policy over every stationary policy.
/// Throws PreconditionError when the number of policies exceeds `budget`.
/// Choices at terminal states are not enumerated (they do not affect cost).
ValueFunction oracle_policy_enum(const Problem& p, std::uint64_t budget = 1'000'000);

/// Number of stationary policies over non-terminal states, saturated at
/// UINT64_MAX.
std::uint64_t count_policies(const Problem& p);

}  // namespace termdp
