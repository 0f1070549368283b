#pragma once

#include "termdp/grid.hpp"
#include "termdp/policy_iteration.hpp"
#include "termdp/problem.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace termdp {

// ---------------------------------------------------------------------------
// Counterexamples

/// States {0, 1}, terminal {0}. State 1 can stay at no cost (control 0) or
/// move to 0 at cost 1 (control 1). The Bellman equation has every
/// J = (0, c) with 0 <= c <= 1 as a solution; the optimal cost is (0, 0).
Problem build_example1();

inline constexpr ControlIndex example1_stay = 0;
inline constexpr ControlIndex example1_move = 1;

/// Closed forms of the continuous-state example where VI from zero fails at
/// x = 0: states [0, inf) plus an absorbing state s, controls u > 0 (move to
/// x + u at cost x) or a stopping control (move to s at cost 1).
namespace example2 {

/// J_k(x) = min{1, k x} for x >= 0.
double iterate(std::uint64_t k, double x);
/// J*(x) = 1 for x >= 0.
inline double optimal(double) { return 1.0; }
/// One VI step reduced to a scalar recursion: min{1 + J_k(s), x + inf_{u>0} J_k(x+u)}
/// with J_k(s) = 0 and the infimum equal to J_k(x) by monotonicity and right
/// continuity of the closed form.
double reduced_step(double jk_at_x, double x);

}  // namespace example2

struct Example2Report {
    std::size_t samples_checked = 0;
    std::size_t recursion_checks = 0;
    double max_recursion_error = 0.0;
    /// J_k(x + u) >= J_k(x) for the probed u > 0, so the infimum over u > 0
    /// is the right limit at x.
    bool right_monotone = true;
    std::uint64_t k_max = 0;
    bool zero_state_stays_zero = true;  ///< J_k(0) = 0 for all k <= k_max
    double optimal_at_zero = 1.0;

    bool passed() const noexcept {
        return max_recursion_error <= 1e-12 && right_monotone && zero_state_stays_zero && optimal_at_zero == 1.0;
    }
};

/// Checks the closed form against the reduced recursion at every sample for
/// k = 0..64 and at logarithmically spaced k up to k_max, runs the recursion
/// at x = 0 for all k <= k_max, and compares with J*(0) = 1.
Example2Report verify_example2(std::uint64_t k_max, std::span<const double> sample_xs);

struct Example3Report {
    PiResult keep_current;  ///< from mu0(1) = move
    PiResult least_index;   ///< from mu0(1) = move, stay has index 0
    PiResult from_stay;     ///< from mu0(1) = stay
    ExtCost optimal_at_1;

    bool stall_reproduced = false;
    bool escape_reproduced = false;
    bool optimal_start_immediate = false;

    bool passed() const noexcept { return stall_reproduced && escape_reproduced && optimal_start_immediate; }
};

/// Policy iteration on build_example1(): stalls at the suboptimal "move"
/// policy under keep_current tie-breaking, escapes under least_index.
Example3Report build_example3_run();

struct LinearGridParams {
    double a = 2.0;
    double q = 0.0;
    double r = 1.0;
    double state_bound = 1.0;
    std::size_t state_points = 201;
    double control_bound = 4.0;
    std::size_t control_points = 41;
};

/// Scalar x' = a x + u with g = q x^2 + r u^2 on a uniform grid.
LinearGridProblem build_scalar_linear(const LinearGridParams& params);

/// a = 2, g = u^2, 201 states on [-1, 1], 41 controls on [-4, 4].
LinearGridProblem build_example4();

/// a = 2, g = x^2 + u^2, 201 states on [-1, 1], 401 controls on [-2, 2].
/// The control spacing equals the state spacing, so every node can be steered
/// exactly onto the origin node.
LinearGridProblem build_lq_grid();

// ---------------------------------------------------------------------------
// Auxiliary canonical problems

/// States 0..n-1, terminal {0}. Each state i > 0 has "wait" (self-loop,
/// cost `cost`) and "step" (to i-1, cost `cost`).
Problem build_unit_chain(std::size_t n, double cost = 1.0);

/// width x height cells, unit cost per move outside the targets. Controls
/// N, S, E, W; moves into walls or off the board leave the state unchanged.
Problem build_gridworld(std::size_t width, std::size_t height, const std::vector<std::pair<std::size_t, std::size_t>>& targets,
                        const std::vector<std::pair<std::size_t, std::size_t>>& walls = {});

/// States 0..3 on a line, target {0}. Controls left-1, left-2; the adversary
/// adds 0 or +1 to the position; positions are clamped to [0, 3]. Unit cost
/// outside the target.
Problem build_adversarial_line();

/// Five states with a two-valued disturbance, and the set hat_X = {0,1,2,3}
/// whose guaranteed-invariant subset is {0, 1}.
Problem build_tube_fixture();
StateMask tube_fixture_set();

// ---------------------------------------------------------------------------
// Lyapunov-style descent of J* along a closed-loop trajectory

struct DescentReport {
    std::vector<StateIndex> trajectory;
    std::vector<ExtCost> values;       ///< J*(x_k)
    std::vector<ExtCost> stage_costs;  ///< g(x_k, mu(x_k))
    bool monotone = true;
    std::optional<std::size_t> first_breach;
    bool reached_zero = false;
    /// max_k |J*(x_0) - (sum_{t<k} g_t + J*(x_k))|
    double max_telescoping_error = 0.0;

    bool passed() const noexcept { return monotone && reached_zero; }
};

/// Requires a deterministic graph problem and J*(x0) finite.
DescentReport trajectory_descent_check(const Problem& p, const Policy& mu, StateIndex x0, std::size_t horizon,
                                       const ValueFunction& jstar);

}  // namespace termdp
