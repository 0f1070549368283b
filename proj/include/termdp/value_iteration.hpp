#pragma once

#include "termdp/problem.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace termdp {

/// Value of the successor distribution of a transition under J: the
/// weighted sum over successors, infinite if any successor is infinite.
ExtCost successor_value(const Outcome& outcome, const ValueFunction& J);

/// Worst case over disturbances of cost + J(successor) for control u at x.
ExtCost q_value(const Problem& p, const ValueFunction& J, StateIndex x, ControlIndex u);

/// Greedy selection shared by the VI and PI engines. With keep_current and a
/// `current` policy, current(x) is retained whenever it attains the minimum.
std::pair<ValueFunction, Policy> greedy_sweep(const Problem& p, const ValueFunction& J, TieBreak tie,
                                              const Policy* current = nullptr);

/// (TJ)(x) = min_u { g(x,u) + J(f(x,u)) } and a policy attaining it.
/// Requires a problem without an adversary (one disturbance value).
std::pair<ValueFunction, Policy> bellman_operator(const Problem& p, const ValueFunction& J,
                                                  TieBreak tie = TieBreak::least_index,
                                                  const Policy* current = nullptr);

/// Sup-distance between two value functions, split into the finite part and
/// a flag for states where exactly one side is infinite.
struct SupDistance {
    double finite_sup = 0.0;
    bool pattern_changed = false;

    double value() const noexcept;
};

SupDistance sup_distance(const ValueFunction& a, const ValueFunction& b, const StateMask* region = nullptr);

/// sup_x |J(x) - (TJ)(x)| with inf - inf = 0 and |inf - finite| = inf,
/// optionally restricted to a region.
double residual(const Problem& p, const ValueFunction& J, const StateMask* region = nullptr);

struct TraceRow {
    std::size_t iteration = 0;
    double sup_change = 0.0;  ///< over states finite in both iterates
    double residual = 0.0;
    std::size_t num_infinite = 0;
    std::vector<ExtCost> values;  ///< empty unless snapshots were requested
};

struct SolveTrace {
    std::vector<std::string> state_ids;  ///< column names for snapshots
    std::vector<TraceRow> rows;
};

enum class Monotonicity { constant, nondecreasing, nonincreasing, mixed };

std::string_view to_string(Monotonicity m);

struct ViOptions {
    double tol = 1e-9;
    std::size_t max_iters = 10'000;
    TieBreak tie = TieBreak::least_index;
    bool record_values = false;
};

struct ViResult {
    ValueFunction final_value;
    Policy greedy_policy;
    std::size_t iterations = 0;
    double final_sup_change = 0.0;  ///< inf when the last step changed the inf-pattern
    double final_residual = 0.0;
    bool converged = false;
    Monotonicity monotonicity = Monotonicity::constant;
    SolveTrace trace;
};

/// J_{k+1} = T J_k from J0. Stops once the change on finite states is at most
/// tol, the set of infinite states is unchanged and the residual of the new
/// iterate is at most tol; otherwise reports converged = false at max_iters.
/// Problems with disturbances use the minimax operator.
ViResult run_vi(const Problem& p, const ValueFunction& J0, const ViOptions& options = {});

/// Fixed points found by VI from several seeds.
struct FixedPointCandidate {
    ValueFunction value;
    double residual = 0.0;
    bool in_j_class = false;
    std::vector<std::size_t> seeds;  ///< indices of the seeds that reached it
};

struct SkippedSeed {
    std::size_t seed = 0;
    std::string diagnostics;
};

struct MultiplicityOptions {
    double tol = 1e-9;
    std::size_t max_iters = 10'000;
    /// Limits further apart than this are distinct; defaults to 10 * tol.
    std::optional<double> cluster_distance;
    /// Certification threshold on the residual; defaults to tol.
    std::optional<double> residual_tol;
};

struct MultiplicityResult {
    std::vector<FixedPointCandidate> fixed_points;
    std::vector<SkippedSeed> skipped;

    std::size_t count_in_j_class() const noexcept;
};

MultiplicityResult multiplicity_scan(const Problem& p, const std::vector<ValueFunction>& seeds,
                                     const MultiplicityOptions& options = {});

/// Zero, 0-on-terminal/inf-elsewhere, and (for deterministic graph problems)
/// the costs of the least-index policy and `policy_samples` random policies.
std::vector<ValueFunction> default_seeds(const Problem& p, std::size_t policy_samples = 8,
                                         std::uint64_t rng_seed = 0x5eed);

}  // namespace termdp
