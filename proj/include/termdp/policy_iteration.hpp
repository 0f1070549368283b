#pragma once

#include "termdp/problem.hpp"
#include "termdp/value_iteration.hpp"

#include <vector>

namespace termdp {

enum class StopReason { policy_repeat, value_converged, max_iters };

std::string_view to_string(StopReason r);

struct PiResult {
    std::vector<Policy> policies;      ///< mu^0, mu^1, ...
    std::vector<ValueFunction> values;  ///< J_{mu^k} for PI, J_k for optimistic PI
    StopReason stopped_reason = StopReason::max_iters;
    Policy final_policy;
    ValueFunction final_value;
    std::size_t iterations = 0;
    SolveTrace trace;
};

/// A policy attaining min_u { g(x,u) + J(f(x,u)) } at every state.
Policy improve_policy(const Problem& p, const ValueFunction& J, const Policy& current,
                      TieBreak tie = TieBreak::keep_current);

/// Exact policy iteration on a deterministic graph problem. Stops when the
/// improved policy equals the current one. Every round checks
/// J_{mu^k} >= T J_{mu^k} >= J_{mu^{k+1}} pointwise and throws InvariantError
/// if it fails.
PiResult run_pi(const Problem& p, const Policy& mu0, TieBreak tie = TieBreak::keep_current,
                std::size_t max_iters = 1'000);

/// J0 is in the J class and J0 >= T J0 pointwise.
bool check_opi_seed(const Problem& p, const ValueFunction& J0);

/// Number of policy-restricted sweeps per round. Rounds past the end of the
/// list reuse the last entry.
class SweepSchedule {
public:
    explicit SweepSchedule(std::size_t constant = 1);
    explicit SweepSchedule(std::vector<std::size_t> counts);

    std::size_t at(std::size_t round) const noexcept;

private:
    std::vector<std::size_t> counts_;
};

struct OpiOptions {
    double tol = 1e-9;
    std::size_t max_iters = 10'000;
    TieBreak tie = TieBreak::least_index;
    bool record_values = false;
};

/// Optimistic policy iteration: greedy mu^k from J_k, then m_k sweeps of
/// J <- g(., mu^k(.)) + J(f(., mu^k(.))). Refuses seeds failing
/// check_opi_seed. Disturbances are handled by the worst case in each sweep.
/// Stops when the change is at most tol with an unchanged inf-pattern and the
/// residual of the new iterate is at most tol.
PiResult run_opi(const Problem& p, const ValueFunction& J0, const SweepSchedule& schedule,
                 const OpiOptions& options = {});

}  // namespace termdp
