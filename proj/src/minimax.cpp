#include "termdp/minimax.hpp"

namespace termdp {

std::pair<ValueFunction, Policy> minimax_bellman(const Problem& p, const ValueFunction& J, TieBreak tie) {
    return greedy_sweep(p, J, tie);
}

Problem induced_deterministic(const Problem& p) {
    if (p.num_disturbances() != 1 || !p.has_disturbances())
        throw PreconditionError("induced_deterministic: problem must have exactly one named disturbance");
    std::vector<std::vector<Control>> controls(p.num_states());
    for (StateIndex x = 0; x < p.num_states(); ++x)
        controls[x].assign(p.controls(x).begin(), p.controls(x).end());
    return Problem({p.state_ids().begin(), p.state_ids().end()},
                   {p.terminal_states().begin(), p.terminal_states().end()}, std::move(controls));
}

namespace {

Problem with_costs(const Problem& p, const std::vector<ExtCost>& state_cost, std::vector<StateIndex> terminal) {
    std::vector<std::vector<Control>> controls(p.num_states());
    for (StateIndex x = 0; x < p.num_states(); ++x) {
        for (const Control& c : p.controls(x)) {
            Control copy = c;
            for (Outcome& o : copy.outcomes) o.cost = state_cost[x];
            controls[x].push_back(std::move(copy));
        }
    }
    return Problem({p.state_ids().begin(), p.state_ids().end()}, std::move(terminal), std::move(controls),
                   {p.disturbance_ids().begin(), p.disturbance_ids().end()});
}

}  // namespace

Problem min_time_problem(const Problem& p) {
    std::vector<ExtCost> unit(p.num_states(), ExtCost(1.0));
    for (StateIndex t : p.terminal_states()) unit[t] = ExtCost::zero();
    return with_costs(p, unit, {p.terminal_states().begin(), p.terminal_states().end()});
}

ViResult min_time_reachability(const Problem& p) {
    const Problem timed = min_time_problem(p);
    ViOptions options;
    options.tol = 1e-9;
    options.max_iters = p.num_states() + 2;
    return run_vi(timed, ValueFunction::infinite_outside(timed), options);
}

StateMask guaranteed_reachable(const Problem& p) {
    const ViResult r = min_time_reachability(p);
    StateMask mask(p.num_states());
    for (StateIndex x = 0; x < p.num_states(); ++x) mask[x] = r.final_value[x].is_finite();
    return mask;
}

TubeResult target_tube(const Problem& p, const StateMask& hat_x) {
    if (!p.is_graph()) throw PreconditionError("target_tube: requires a graph problem");
    if (hat_x.size() != p.num_states()) throw std::invalid_argument("target_tube: set size mismatch");

    TubeResult result;
    result.set_sequence.push_back(hat_x);
    while (true) {
        const StateMask& current = result.set_sequence.back();
        StateMask next(p.num_states(), false);
        for (StateIndex x = 0; x < p.num_states(); ++x) {
            if (!current[x]) continue;
            for (ControlIndex u = 0; u < p.num_controls(x) && !next[x]; ++u) {
                bool contained = true;
                for (DisturbanceIndex w = 0; w < p.num_disturbances() && contained; ++w)
                    contained = current[p.next(x, u, w)];
                next[x] = contained;
            }
        }
        const bool repeated = next == current;
        result.set_sequence.push_back(std::move(next));
        if (repeated) break;
    }
    result.iterations_to_fix = result.set_sequence.size() - 1;
    result.fixed_set = result.set_sequence.back();
    return result;
}

Problem tube_cost_problem(const Problem& p, const StateMask& hat_x) {
    if (hat_x.size() != p.num_states()) throw std::invalid_argument("tube_cost_problem: set size mismatch");
    std::vector<ExtCost> cost(p.num_states());
    for (StateIndex x = 0; x < p.num_states(); ++x) cost[x] = hat_x[x] ? ExtCost::zero() : ExtCost(1.0);
    return with_costs(p, cost, {});
}

ValueFunction tube_seed(const Problem& tube_problem, const StateMask& hat_x) {
    std::vector<ExtCost> v(tube_problem.num_states());
    for (StateIndex x = 0; x < v.size(); ++x) v[x] = hat_x.at(x) ? ExtCost::zero() : ExtCost::infinity();
    return ValueFunction(tube_problem, std::move(v));
}

std::vector<StateIndex> members(const StateMask& mask) {
    std::vector<StateIndex> out;
    for (StateIndex x = 0; x < mask.size(); ++x)
        if (mask[x]) out.push_back(x);
    return out;
}

}  // namespace termdp
