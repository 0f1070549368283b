#pragma once

#include "termdp/problem.hpp"
#include "termdp/value_iteration.hpp"

#include <utility>
#include <vector>

namespace termdp {

/// (TJ)(x) = min_u max_w { g(x,u,w) + J(f(x,u,w)) } and a policy attaining
/// the outer minimum.
std::pair<ValueFunction, Policy> minimax_bellman(const Problem& p, const ValueFunction& J,
                                                 TieBreak tie = TieBreak::least_index);

/// The same problem with its single named disturbance dropped. Throws
/// PreconditionError unless the problem has exactly one disturbance value.
Problem induced_deterministic(const Problem& p);

/// Same dynamics with cost 0 on the terminal set and 1 elsewhere.
Problem min_time_problem(const Problem& p);

/// Minimax VI on min_time_problem(p) from 0 on the terminal set and inf
/// elsewhere. The k-th iterate is finite exactly where reaching the terminal
/// set within k steps can be guaranteed; the limit is the guaranteed step
/// count, inf outside the guaranteed-reachable set.
ViResult min_time_reachability(const Problem& p);

/// States from which reaching the terminal set is guaranteed against every
/// disturbance sequence (finite min-time value).
StateMask guaranteed_reachable(const Problem& p);

struct TubeResult {
    std::vector<StateMask> set_sequence;  ///< X_0 = hat_X, X_1, ..., last two equal
    StateMask fixed_set;
    std::size_t iterations_to_fix = 0;
};

/// X_{k+1} = { x in X_k : some control keeps every disturbance outcome in X_k },
/// iterated from hat_X until the set repeats. Requires a graph problem.
TubeResult target_tube(const Problem& p, const StateMask& hat_x);

/// Same dynamics, cost 0 inside hat_X and 1 outside, no terminal set.
Problem tube_cost_problem(const Problem& p, const StateMask& hat_x);

/// 0 inside hat_X, inf outside.
ValueFunction tube_seed(const Problem& tube_problem, const StateMask& hat_x);

std::vector<StateIndex> members(const StateMask& mask);

}  // namespace termdp
