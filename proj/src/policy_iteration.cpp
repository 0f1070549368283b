#include "termdp/policy_iteration.hpp"

#include "termdp/finite.hpp"

#include <algorithm>

namespace termdp {

namespace {

std::string describe(const Problem& p, StateIndex x) { return "state '" + p.state_id(x) + "'"; }

// One sweep of the single-policy operator T_mu.
ValueFunction policy_sweep(const Problem& p, const ValueFunction& J, const Policy& mu) {
    std::vector<ExtCost> out(p.num_states());
    for (StateIndex x = 0; x < p.num_states(); ++x) out[x] = q_value(p, J, x, mu[x]);
    return ValueFunction(p, std::move(out));
}

void push_row(SolveTrace& trace, std::size_t k, const ValueFunction& prev, const ValueFunction& next, double res,
              bool record) {
    TraceRow row{k, sup_distance(prev, next).finite_sup, res, next.count_infinite(), {}};
    if (record) row.values.assign(next.values().begin(), next.values().end());
    trace.rows.push_back(std::move(row));
}

}  // namespace

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::policy_repeat: return "policy_repeat";
        case StopReason::value_converged: return "value_converged";
        case StopReason::max_iters: return "max_iters";
    }
    return "unknown";
}

Policy improve_policy(const Problem& p, const ValueFunction& J, const Policy& current, TieBreak tie) {
    return greedy_sweep(p, J, tie, &current).second;
}

PiResult run_pi(const Problem& p, const Policy& mu0, TieBreak tie, std::size_t max_iters) {
    if (!p.is_deterministic()) throw PreconditionError("run_pi: requires a deterministic graph problem");
    require_valid(p);

    PiResult result;
    result.trace.state_ids.assign(p.state_ids().begin(), p.state_ids().end());
    Policy mu = mu0;
    ValueFunction J = evaluate_policy(p, mu);
    result.policies.push_back(mu);
    result.values.push_back(J);

    for (std::size_t k = 1; k <= max_iters; ++k) {
        auto [TJ, improved] = greedy_sweep(p, J, tie, &mu);
        const ValueFunction J_next = evaluate_policy(p, improved);

        for (StateIndex x = 0; x < p.num_states(); ++x) {
            if (TJ[x] > J[x])
                throw InvariantError("run_pi: T J_mu exceeds J_mu at " + describe(p, x));
            if (J_next[x] > TJ[x])
                throw InvariantError("run_pi: J_mu' exceeds T J_mu at " + describe(p, x));
        }
        push_row(result.trace, k, J, J_next, sup_distance(J, TJ).value(), false);
        result.iterations = k;

        if (improved == mu) {
            result.stopped_reason = StopReason::policy_repeat;
            break;
        }
        mu = std::move(improved);
        J = J_next;
        result.policies.push_back(mu);
        result.values.push_back(J);
    }
    result.final_policy = mu;
    result.final_value = J;
    return result;
}

bool check_opi_seed(const Problem& p, const ValueFunction& J0) {
    if (!membership_in_J(J0, p)) return false;
    const ValueFunction TJ = greedy_sweep(p, J0, TieBreak::least_index).first;
    return dominates(J0, TJ);
}

SweepSchedule::SweepSchedule(std::size_t constant) : SweepSchedule(std::vector<std::size_t>{constant}) {}

SweepSchedule::SweepSchedule(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw std::invalid_argument("SweepSchedule: empty schedule");
    if (std::any_of(counts_.begin(), counts_.end(), [](std::size_t m) { return m == 0; }))
        throw std::invalid_argument("SweepSchedule: sweep counts must be at least 1");
}

std::size_t SweepSchedule::at(std::size_t round) const noexcept {
    return counts_[std::min(round, counts_.size() - 1)];
}

PiResult run_opi(const Problem& p, const ValueFunction& J0, const SweepSchedule& schedule,
                 const OpiOptions& options) {
    require_valid(p);
    if (J0.size() != p.num_states()) throw std::invalid_argument("run_opi: initial value function size mismatch");
    if (!check_opi_seed(p, J0)) {
        std::string why = !membership_in_J(J0, p) ? "J0 does not vanish on the terminal set"
                                                  : "J0 >= T J0 fails at some state";
        throw PreconditionError("run_opi: seed rejected: " + why);
    }

    PiResult result;
    result.trace.state_ids.assign(p.state_ids().begin(), p.state_ids().end());
    ValueFunction J = J0;
    auto [TJ, mu] = greedy_sweep(p, J, options.tie);
    result.values.push_back(J);

    for (std::size_t k = 0; k < options.max_iters; ++k) {
        result.policies.push_back(mu);
        ValueFunction next = TJ;
        for (std::size_t m = 1; m < schedule.at(k); ++m) next = policy_sweep(p, next, mu);

        for (StateIndex x = 0; x < p.num_states(); ++x)
            if (next[x] > J[x]) throw InvariantError("run_opi: iterate increased at " + describe(p, x));

        auto swept = greedy_sweep(p, next, options.tie);
        const SupDistance change = sup_distance(J, next);
        const double res = sup_distance(next, swept.first).value();
        push_row(result.trace, k + 1, J, next, res, options.record_values);

        J = std::move(next);
        TJ = std::move(swept.first);
        mu = std::move(swept.second);
        result.values.push_back(J);
        result.iterations = k + 1;
        if (!change.pattern_changed && change.finite_sup <= options.tol && res <= options.tol) {
            result.stopped_reason = StopReason::value_converged;
            break;
        }
    }
    result.final_policy = mu;
    result.final_value = J;
    return result;
}

}  // namespace termdp
