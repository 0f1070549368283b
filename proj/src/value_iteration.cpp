#include "termdp/value_iteration.hpp"

#include "termdp/finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace termdp {

ExtCost successor_value(const Outcome& outcome, const ValueFunction& J) {
    if (outcome.successors.size() == 1) return J[outcome.successors.front().state];
    double total = 0.0;
    for (const Successor& s : outcome.successors) {
        const ExtCost v = J[s.state];
        if (v.is_infinite()) return ExtCost::infinity();
        total += s.weight * v.value();
    }
    return ExtCost(std::max(total, 0.0));
}

ExtCost q_value(const Problem& p, const ValueFunction& J, StateIndex x, ControlIndex u) {
    const Control& c = p.controls(x)[u];
    ExtCost worst = c.outcomes.front().cost + successor_value(c.outcomes.front(), J);
    for (std::size_t w = 1; w < c.outcomes.size(); ++w)
        worst = std::max(worst, c.outcomes[w].cost + successor_value(c.outcomes[w], J));
    return worst;
}

std::pair<ValueFunction, Policy> greedy_sweep(const Problem& p, const ValueFunction& J, TieBreak tie,
                                              const Policy* current) {
    if (J.size() != p.num_states()) throw std::invalid_argument("greedy_sweep: value function size mismatch");
    if (current != nullptr && current->size() != p.num_states())
        throw std::invalid_argument("greedy_sweep: policy size mismatch");
    const bool keep = tie == TieBreak::keep_current && current != nullptr;

    std::vector<ExtCost> values(p.num_states());
    std::vector<ControlIndex> choice(p.num_states(), 0);
    for (StateIndex x = 0; x < p.num_states(); ++x) {
        const std::size_t nu = p.num_controls(x);
        if (nu == 0) throw ValidationError(validate(p));
        ExtCost best = q_value(p, J, x, 0);
        ControlIndex arg = 0;
        for (ControlIndex u = 1; u < nu; ++u) {
            const ExtCost q = q_value(p, J, x, u);
            if (q < best) {
                best = q;
                arg = u;
            }
        }
        if (keep) {
            const ControlIndex cur = (*current)[x];
            if (cur < nu && q_value(p, J, x, cur) == best) arg = cur;
        }
        values[x] = best;
        choice[x] = arg;
    }
    return {ValueFunction(p, std::move(values)), Policy(p, std::move(choice))};
}

std::pair<ValueFunction, Policy> bellman_operator(const Problem& p, const ValueFunction& J, TieBreak tie,
                                                  const Policy* current) {
    if (p.num_disturbances() != 1)
        throw PreconditionError("bellman_operator: problem has disturbances; use minimax_bellman");
    return greedy_sweep(p, J, tie, current);
}

double SupDistance::value() const noexcept {
    return pattern_changed ? std::numeric_limits<double>::infinity() : finite_sup;
}

SupDistance sup_distance(const ValueFunction& a, const ValueFunction& b, const StateMask* region) {
    if (a.size() != b.size()) throw std::invalid_argument("sup_distance: size mismatch");
    SupDistance d;
    for (StateIndex x = 0; x < a.size(); ++x) {
        if (region != nullptr && !(*region)[x]) continue;
        if (a[x].is_infinite() != b[x].is_infinite()) {
            d.pattern_changed = true;
        } else if (a[x].is_finite()) {
            d.finite_sup = std::max(d.finite_sup, std::abs(a[x].value() - b[x].value()));
        }
    }
    return d;
}

double residual(const Problem& p, const ValueFunction& J, const StateMask* region) {
    const auto [TJ, mu] = greedy_sweep(p, J, TieBreak::least_index);
    return sup_distance(J, TJ, region).value();
}

std::string_view to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::constant: return "constant";
        case Monotonicity::nondecreasing: return "nondecreasing";
        case Monotonicity::nonincreasing: return "nonincreasing";
        case Monotonicity::mixed: return "mixed";
    }
    return "unknown";
}

ViResult run_vi(const Problem& p, const ValueFunction& J0, const ViOptions& options) {
    require_valid(p);
    if (J0.size() != p.num_states()) throw std::invalid_argument("run_vi: initial value function size mismatch");
    if (!(options.tol > 0.0)) throw std::invalid_argument("run_vi: tol must be positive");

    ViResult result;
    result.trace.state_ids.assign(p.state_ids().begin(), p.state_ids().end());

    ValueFunction current = J0;
    auto [T_current, policy] = greedy_sweep(p, current, options.tie);
    bool went_up = false;
    bool went_down = false;

    for (std::size_t k = 1; k <= options.max_iters; ++k) {
        ValueFunction next = std::move(T_current);
        auto swept = greedy_sweep(p, next, options.tie);

        for (StateIndex x = 0; x < p.num_states(); ++x) {
            if (next[x] > current[x]) went_up = true;
            if (next[x] < current[x]) went_down = true;
        }
        const SupDistance change = sup_distance(current, next);
        const double res = sup_distance(next, swept.first).value();

        TraceRow row{k, change.finite_sup, res, next.count_infinite(), {}};
        if (options.record_values) row.values.assign(next.values().begin(), next.values().end());
        result.trace.rows.push_back(std::move(row));

        current = std::move(next);
        T_current = std::move(swept.first);
        policy = std::move(swept.second);
        result.iterations = k;
        result.final_sup_change = change.value();
        result.final_residual = res;
        if (!change.pattern_changed && change.finite_sup <= options.tol && res <= options.tol) {
            result.converged = true;
            break;
        }
    }
    if (options.max_iters == 0) result.final_residual = sup_distance(current, T_current).value();

    result.monotonicity = went_up && went_down ? Monotonicity::mixed
                          : went_up            ? Monotonicity::nondecreasing
                          : went_down          ? Monotonicity::nonincreasing
                                               : Monotonicity::constant;
    result.final_value = std::move(current);
    result.greedy_policy = std::move(policy);
    return result;
}

std::size_t MultiplicityResult::count_in_j_class() const noexcept {
    return static_cast<std::size_t>(std::count_if(fixed_points.begin(), fixed_points.end(),
                                                  [](const FixedPointCandidate& f) { return f.in_j_class; }));
}

MultiplicityResult multiplicity_scan(const Problem& p, const std::vector<ValueFunction>& seeds,
                                     const MultiplicityOptions& options) {
    if (seeds.empty()) throw std::invalid_argument("multiplicity_scan: no seeds");
    const double cluster = options.cluster_distance.value_or(10.0 * options.tol);
    const double certify = options.residual_tol.value_or(options.tol);

    MultiplicityResult result;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        ViOptions vi;
        vi.tol = options.tol;
        vi.max_iters = options.max_iters;
        const ViResult run = run_vi(p, seeds[i], vi);
        if (!run.converged) {
            result.skipped.push_back({i, "no convergence after " + std::to_string(run.iterations) +
                                             " iterations (sup change " + std::to_string(run.final_sup_change) +
                                             ", residual " + std::to_string(run.final_residual) + ")"});
            continue;
        }
        const double res = residual(p, run.final_value);
        if (res > certify) {
            result.skipped.push_back({i, "limit has residual " + std::to_string(res) + " above " +
                                             std::to_string(certify)});
            continue;
        }
        auto same = std::find_if(result.fixed_points.begin(), result.fixed_points.end(),
                                 [&](const FixedPointCandidate& f) {
                                     return sup_distance(f.value, run.final_value).value() <= cluster;
                                 });
        if (same != result.fixed_points.end()) {
            same->seeds.push_back(i);
        } else {
            result.fixed_points.push_back(
                {run.final_value, res, membership_in_J(run.final_value, p), std::vector<std::size_t>{i}});
        }
    }
    return result;
}

std::vector<ValueFunction> default_seeds(const Problem& p, std::size_t policy_samples, std::uint64_t rng_seed) {
    std::vector<ValueFunction> seeds{ValueFunction::zero(p), ValueFunction::infinite_outside(p)};
    if (!p.is_deterministic()) return seeds;

    seeds.push_back(evaluate_policy(p, Policy::first_control(p)));
    std::mt19937_64 rng(rng_seed);
    for (std::size_t s = 0; s < policy_samples; ++s) {
        std::vector<ControlIndex> choice(p.num_states());
        for (StateIndex x = 0; x < p.num_states(); ++x) {
            std::uniform_int_distribution<ControlIndex> pick(0, p.num_controls(x) - 1);
            choice[x] = pick(rng);
        }
        seeds.push_back(evaluate_policy(p, Policy(p, std::move(choice))));
    }
    return seeds;
}

}  // namespace termdp
