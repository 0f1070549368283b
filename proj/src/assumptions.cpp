#include "termdp/assumptions.hpp"

#include "termdp/finite.hpp"
#include "termdp/minimax.hpp"
#include "termdp/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

namespace termdp {

namespace {

constexpr std::string_view compactness_text =
    "finite control sets: the level sets of g(x,u) + J(f(x,u)) over u are finite, hence compact";

struct Labelled {
    std::vector<ExtCost> dist;
    /// Source state at which the best path ends.
    std::vector<StateIndex> source;
};

// Reverse Dijkstra from a set of zero-valued sources over the arcs of a
// deterministic problem.
Labelled distance_to(const Problem& p, const StateMask& sources) {
    const std::size_t n = p.num_states();
    std::vector<std::vector<std::pair<StateIndex, double>>> in(n);
    for (StateIndex x = 0; x < n; ++x)
        for (ControlIndex u = 0; u < p.num_controls(x); ++u) {
            const ExtCost g = p.cost(x, u);
            if (g.is_finite()) in[p.next(x, u)].emplace_back(x, g.value());
        }

    Labelled out{std::vector<ExtCost>(n, ExtCost::infinity()), std::vector<StateIndex>(n, n)};
    using Item = std::pair<double, StateIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (StateIndex x = 0; x < n; ++x)
        if (sources[x]) {
            out.dist[x] = ExtCost::zero();
            out.source[x] = x;
            heap.emplace(0.0, x);
        }
    std::vector<bool> done(n, false);
    while (!heap.empty()) {
        auto [d, y] = heap.top();
        heap.pop();
        if (done[y]) continue;
        done[y] = true;
        for (auto [x, g] : in[y]) {
            const ExtCost cand = ExtCost(d) + ExtCost(g);
            if (cand < out.dist[x]) {
                out.dist[x] = cand;
                out.source[x] = out.source[y];
                heap.emplace(cand.value(), x);
            }
        }
    }
    return out;
}

void finite_deterministic(const Problem& p, AssumptionReport& r) {
    const CycleReport cycles = positive_cycle_check(p);
    r.positive_cycles_only = cycles.has_positive_cycles_only;
    r.zero_cost_cycles = cycles.zero_cost_cycles;
    const ReachabilityReport reach = terminating_reachability(p);
    r.all_states_can_terminate = reach.all();
    r.cannot_terminate = reach.cannot_terminate;

    // An infinite trajectory of finite cost ends in a zero-cost cycle, so the
    // optimal cost is the distance to the terminal set or to such a cycle.
    StateMask sinks = p.terminal_mask();
    for (StateIndex x = 0; x < p.num_states(); ++x)
        if (cycles.on_zero_cost_cycle[x]) sinks[x] = true;
    const Labelled optimal = distance_to(p, sinks);
    const ValueFunction terminating = terminating_distance(p);

    for (StateIndex x = 0; x < p.num_states(); ++x) {
        if (p.is_terminal(x) || !(optimal.dist[x] < terminating[x])) continue;
        AssumptionWitness w;
        w.state = x;
        w.optimal = optimal.dist[x];
        w.terminating = terminating[x];
        const StateIndex end = optimal.source[x];
        for (const auto& cycle : cycles.zero_cost_cycles)
            if (std::find(cycle.begin(), cycle.end(), end) != cycle.end()) {
                w.cycle = cycle;
                break;
            }
        std::ostringstream d;
        d << "J*(" << p.state_id(x) << ") = " << w.optimal << " is attained by reaching the zero-cost cycle at "
          << p.state_id(end) << " and staying there; every terminating sequence costs at least " << w.terminating;
        w.description = d.str();
        r.witnesses.push_back(std::move(w));
    }

    for (StateIndex x = 0; x < p.num_states(); ++x)
        if (!p.is_terminal(x) && optimal.dist[x].is_zero()) {
            r.reasons.push_back("optimal cost vanishes at non-terminal state " + p.state_id(x) +
                                ", so the zero set of J* is larger than the terminal set");
            break;
        }

    if (!r.witnesses.empty()) {
        r.verdict = Verdict::assumption1_violated_with_witness;
    } else if (r.positive_cycles_only && r.all_states_can_terminate) {
        r.verdict = Verdict::assumption1_established;
    } else {
        if (!r.positive_cycles_only)
            r.reasons.push_back("zero-cost cycles present, but each is no cheaper than terminating");
        if (!r.all_states_can_terminate)
            r.reasons.push_back(std::to_string(r.cannot_terminate.size()) + " state(s) cannot reach the terminal set");
        r.verdict = Verdict::inconclusive;
    }
}

void finite_minimax(const Problem& p, AssumptionReport& r) {
    const CycleReport cycles = positive_cycle_check(p);
    r.positive_cycles_only = cycles.has_positive_cycles_only;
    r.zero_cost_cycles = cycles.zero_cost_cycles;
    const StateMask reach = guaranteed_reachable(p);
    for (StateIndex x = 0; x < p.num_states(); ++x)
        if (!reach[x]) r.cannot_terminate.push_back(x);
    r.all_states_can_terminate = r.cannot_terminate.empty();
    if (r.positive_cycles_only && r.all_states_can_terminate) {
        r.verdict = Verdict::assumption1_established;
        return;
    }
    if (!r.positive_cycles_only) r.reasons.push_back("zero-cost cycles present under some disturbance sequence");
    if (!r.all_states_can_terminate)
        r.reasons.push_back(std::to_string(r.cannot_terminate.size()) +
                            " state(s) cannot be steered to the terminal set against every disturbance sequence");
    r.verdict = Verdict::inconclusive;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

// Greedy steering of the underlying linear system from x: each step takes the
// control whose successor is closest to the origin, cheaper on ties.
bool greedy_terminates(const LinearGridProblem& g, std::vector<double> x, double epsilon, std::size_t budget,
                       double arrive) {
    const auto n = static_cast<Eigen::Index>(x.size());
    const auto m = static_cast<Eigen::Index>(g.grid.controls.front().size());
    Eigen::VectorXd xv(n);
    Eigen::VectorXd uv(m);
    double total = 0.0;
    for (std::size_t step = 0; step < budget; ++step) {
        if (norm(x) <= arrive) return true;
        for (Eigen::Index d = 0; d < n; ++d) xv[d] = x[static_cast<std::size_t>(d)];
        double best_norm = std::numeric_limits<double>::infinity();
        double best_cost = 0.0;
        std::vector<double> best_next;
        for (const auto& u : g.grid.controls) {
            for (Eigen::Index d = 0; d < m; ++d) uv[d] = u[static_cast<std::size_t>(d)];
            const Eigen::VectorXd next = g.system.A * xv + g.system.B * uv;
            std::vector<double> nx(next.data(), next.data() + n);
            const double nn = norm(nx);
            const double c = g.system.cost(x, u);
            if (nn < best_norm - arrive || (std::abs(nn - best_norm) <= arrive && c < best_cost)) {
                best_norm = nn;
                best_cost = c;
                best_next = std::move(nx);
            }
        }
        total += best_cost;
        if (total > epsilon) return false;
        x = std::move(best_next);
    }
    return norm(x) <= arrive;
}

}  // namespace

std::string_view to_string(PositivityStatus s) {
    switch (s) {
        case PositivityStatus::verified_on_samples: return "verified_on_samples";
        case PositivityStatus::violated: return "violated";
        case PositivityStatus::not_applicable: return "not_applicable";
    }
    return "?";
}

std::string_view to_string(Controllability c) {
    switch (c) {
        case Controllability::not_checked: return "not_checked";
        case Controllability::user_asserted: return "user_asserted";
        case Controllability::spot_checked_ok: return "spot_checked_ok";
        case Controllability::spot_check_failed: return "spot_check_failed";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::assumption1_established: return "assumption1_established";
        case Verdict::assumption1_violated_with_witness: return "assumption1_violated_with_witness";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

AssumptionReport check_assumption1(const Problem& p, const AssumptionConfig&) {
    AssumptionReport r;
    r.validation = validate(p);
    r.terminal_valid = r.validation.ok();
    r.compactness_note = std::string(compactness_text);
    if (!r.terminal_valid) {
        r.reasons.push_back("problem fails validation; terminal set is not cost-free and absorbing");
        return r;
    }
    if (!p.is_graph()) {
        r.reasons.push_back("transitions are interpolated; use the grid check");
        return r;
    }
    if (p.is_deterministic())
        finite_deterministic(p, r);
    else
        finite_minimax(p, r);
    return r;
}

AssumptionReport check_assumption1(const LinearGridProblem& g, const AssumptionConfig& config) {
    AssumptionReport r;
    r.finite_case = false;
    r.validation = validate(g.problem);
    r.terminal_valid = r.validation.ok();
    r.compactness_note = std::string(compactness_text);
    if (!r.terminal_valid) {
        r.reasons.push_back("problem fails validation; terminal set is not cost-free and absorbing");
        return r;
    }
    const Problem& p = g.problem;
    const double radius = g.radius();

    // Strict positivity away from the origin on a ladder of distances.
    std::vector<double> min_cost(p.num_states(), std::numeric_limits<double>::infinity());
    for (StateIndex x = 0; x < p.num_states(); ++x) {
        const auto pt = g.point(x);
        for (const auto& u : g.grid.controls) min_cost[x] = std::min(min_cost[x], g.system.cost(pt, u));
    }
    r.strict_positivity = PositivityStatus::verified_on_samples;
    for (double fraction : config.delta_fractions) {
        PositivityProbe probe;
        probe.delta = fraction * radius;
        probe.epsilon = std::numeric_limits<double>::infinity();
        for (StateIndex x = 0; x < p.num_states(); ++x) {
            if (x == g.origin || norm(g.point(x)) < probe.delta) continue;
            probe.epsilon = std::min(probe.epsilon, min_cost[x]);
            if (min_cost[x] <= 0.0) probe.violated_at.push_back(x);
        }
        if (!probe.violated_at.empty()) r.strict_positivity = PositivityStatus::violated;
        r.positivity_probes.push_back(std::move(probe));
    }

    // Cheap termination near the origin.
    if (config.assert_local_controllability) {
        r.local_controllability = Controllability::user_asserted;
    } else {
        const double near = config.local_delta_fraction * radius;
        const double arrive = 1e-9 * g.grid.max_spacing();
        for (StateIndex x = 0; x < p.num_states(); ++x) {
            if (x == g.origin || norm(g.point(x)) > near) continue;
            if (!greedy_terminates(g, g.point(x), config.local_epsilon, config.step_budget, arrive))
                r.controllability_failures.push_back(x);
        }
        r.local_controllability =
            r.controllability_failures.empty() ? Controllability::spot_checked_ok : Controllability::spot_check_failed;
    }

    // Witness search: the limit of VI from zero is the optimal cost over all
    // policies, the limit from the inf-outside seed only counts trajectories
    // that arrive. A gap beyond discretization error exposes a cost that is
    // attained without terminating.
    ViOptions opts;
    opts.tol = config.tol;
    opts.max_iters = config.max_iters;
    const ViResult from_zero = run_vi(p, ValueFunction::zero(p), opts);
    const ViResult from_inf = run_vi(p, ValueFunction::infinite_outside(p), opts);
    if (!from_zero.converged || !from_inf.converged) {
        r.reasons.push_back("grid value iteration did not converge within the iteration budget");
    } else {
        const double slack = 2.0 * g.grid_tolerance;
        StateIndex worst = p.num_states();
        double worst_gap = slack;
        for (StateIndex x = 0; x < p.num_states(); ++x) {
            const ExtCost lo = from_zero.final_value[x];
            const ExtCost hi = from_inf.final_value[x];
            if (lo.is_infinite()) continue;
            const double gap = hi.is_infinite() ? std::numeric_limits<double>::infinity() : hi.value() - lo.value();
            if (gap > worst_gap) {
                worst_gap = gap;
                worst = x;
            }
        }
        if (worst < p.num_states()) {
            AssumptionWitness w;
            w.state = worst;
            w.optimal = from_zero.final_value[worst];
            w.terminating = from_inf.final_value[worst];
            std::ostringstream d;
            d << "at x = " << g.point(worst).front() << " value iteration from zero settles at " << w.optimal
              << " while the terminating cost is " << w.terminating << " (grid tolerance " << g.grid_tolerance << ")";
            w.description = d.str();
            r.witnesses.push_back(std::move(w));
        }
    }

    if (!r.witnesses.empty()) {
        r.verdict = Verdict::assumption1_violated_with_witness;
    } else if (r.strict_positivity == PositivityStatus::verified_on_samples &&
               (r.local_controllability == Controllability::spot_checked_ok ||
                r.local_controllability == Controllability::user_asserted)) {
        r.verdict = Verdict::assumption1_established;
    } else {
        if (r.strict_positivity != PositivityStatus::verified_on_samples)
            r.reasons.push_back("stage cost is not strictly positive away from the origin");
        if (r.local_controllability == Controllability::spot_check_failed)
            r.reasons.push_back(std::to_string(r.controllability_failures.size()) +
                                " node(s) near the origin failed the greedy termination check");
        r.verdict = Verdict::inconclusive;
    }
    return r;
}

std::string format_report(const AssumptionReport& r, const Problem& p) {
    auto ids = [&](const std::vector<StateIndex>& xs) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + p.state_id(xs[i]);
        return s + "]";
    };
    std::ostringstream o;
    o << "assumption_report:\n";
    o << "  verdict: " << to_string(r.verdict) << "\n";
    o << "  terminal_valid: " << (r.terminal_valid ? "true" : "false") << "\n";
    if (!r.validation.ok()) o << "  validation:\n    " << r.validation.to_text() << "\n";
    if (r.finite_case) {
        o << "  positive_cycles_only: " << (r.positive_cycles_only ? "true" : "false") << "\n";
        if (!r.zero_cost_cycles.empty()) {
            o << "  zero_cost_cycles:\n";
            for (const auto& c : r.zero_cost_cycles) o << "    - " << ids(c) << "\n";
        }
        o << "  all_states_can_terminate: " << (r.all_states_can_terminate ? "true" : "false") << "\n";
        if (!r.cannot_terminate.empty()) o << "  cannot_terminate: " << ids(r.cannot_terminate) << "\n";
    } else {
        o << "  strict_positivity_outside: " << to_string(r.strict_positivity) << "\n";
        for (const auto& probe : r.positivity_probes) {
            o << "    - delta: " << probe.delta << "\n      epsilon: " << ExtCost(probe.epsilon) << "\n";
            if (!probe.violated_at.empty()) o << "      violated_at: " << probe.violated_at.size() << " node(s)\n";
        }
        o << "  local_controllability: " << to_string(r.local_controllability) << "\n";
        if (!r.controllability_failures.empty()) o << "    failures: " << ids(r.controllability_failures) << "\n";
    }
    o << "  compactness_note: " << r.compactness_note << "\n";
    if (!r.witnesses.empty()) {
        o << "  witnesses:\n";
        for (const auto& w : r.witnesses) {
            o << "    - state: " << p.state_id(w.state) << "\n";
            o << "      optimal: " << w.optimal << "\n";
            o << "      terminating: " << w.terminating << "\n";
            if (!w.cycle.empty()) o << "      cycle: " << ids(w.cycle) << "\n";
            o << "      note: " << w.description << "\n";
        }
    }
    if (!r.reasons.empty()) {
        o << "  reasons:\n";
        for (const auto& s : r.reasons) o << "    - " << s << "\n";
    }
    return o.str();
}

}  // namespace termdp
