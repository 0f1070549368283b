#include "termdp/fixtures.hpp"

#include "termdp/finite.hpp"

#include <algorithm>
#include <cmath>

namespace termdp {

Problem build_example1() {
    ProblemBuilder b;
    b.add_state("0", true);
    b.add_state("1");
    b.add_control("0", "stay", "0", ExtCost::zero());
    b.add_control("1", "stay", "1", ExtCost::zero());
    b.add_control("1", "move", "0", ExtCost(1.0));
    return b.build();
}

namespace example2 {

double iterate(std::uint64_t k, double x) { return std::min(1.0, static_cast<double>(k) * x); }

double reduced_step(double jk_at_x, double x) {
    constexpr double jk_at_s = 0.0;
    return std::min(1.0 + jk_at_s, x + jk_at_x);
}

}  // namespace example2

Example2Report verify_example2(std::uint64_t k_max, std::span<const double> sample_xs) {
    Example2Report report;
    report.k_max = k_max;

    std::vector<std::uint64_t> ks;
    for (std::uint64_t k = 0; k <= std::min<std::uint64_t>(64, k_max); ++k) ks.push_back(k);
    for (std::uint64_t k = 128; k < k_max; k *= 2) ks.push_back(k);
    if (k_max > 64) ks.push_back(k_max);

    for (double x : sample_xs) {
        if (!(x >= 0.0)) throw std::invalid_argument("verify_example2: samples must lie in [0, inf)");
        ++report.samples_checked;
        for (std::uint64_t k : ks) {
            const double jk = example2::iterate(k, x);
            const double err = std::abs(example2::reduced_step(jk, x) - example2::iterate(k + 1, x));
            report.max_recursion_error = std::max(report.max_recursion_error, err);
            ++report.recursion_checks;
            for (double u : {1e-3, 1e-6, 1e-9}) {
                if (example2::iterate(k, x + u) < jk) report.right_monotone = false;
            }
        }
    }

    double j = 0.0;
    for (std::uint64_t k = 0; k < k_max; ++k) {
        j = example2::reduced_step(j, 0.0);
        if (j != 0.0 || example2::iterate(k + 1, 0.0) != 0.0) {
            report.zero_state_stays_zero = false;
            break;
        }
    }
    report.optimal_at_zero = example2::optimal(0.0);
    return report;
}

Example3Report build_example3_run() {
    const Problem p = build_example1();
    Example3Report report;
    report.optimal_at_1 = oracle_policy_enum(p)[1];

    const Policy move(p, {0, example1_move});
    const Policy stay(p, {0, example1_stay});
    report.keep_current = run_pi(p, move, TieBreak::keep_current);
    report.least_index = run_pi(p, move, TieBreak::least_index);
    report.from_stay = run_pi(p, stay, TieBreak::keep_current);

    report.stall_reproduced = report.keep_current.stopped_reason == StopReason::policy_repeat &&
                              report.keep_current.final_policy == move &&
                              report.keep_current.final_value[1] == ExtCost(1.0) &&
                              report.optimal_at_1 == ExtCost::zero();
    report.escape_reproduced = report.least_index.stopped_reason == StopReason::policy_repeat &&
                               report.least_index.final_value[1] == ExtCost::zero();
    report.optimal_start_immediate = report.from_stay.stopped_reason == StopReason::policy_repeat &&
                                     report.from_stay.iterations == 1 &&
                                     report.from_stay.final_value[1] == ExtCost::zero();
    return report;
}

LinearGridProblem build_scalar_linear(const LinearGridParams& params) {
    LinearSystemSpec sys;
    sys.A = Eigen::MatrixXd::Constant(1, 1, params.a);
    sys.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
    sys.cost = CostForm{params.q, params.r, 2.0};
    GridSpec grid;
    grid.axes = {GridAxis{-params.state_bound, params.state_bound, params.state_points}};
    grid.controls =
        GridSpec::uniform_controls({GridAxis{-params.control_bound, params.control_bound, params.control_points}});
    return build_linear_problem(sys, grid);
}

LinearGridProblem build_example4() { return build_scalar_linear(LinearGridParams{}); }

LinearGridProblem build_lq_grid() {
    LinearGridParams params;
    params.q = 1.0;
    params.control_bound = 2.0;
    params.control_points = 401;
    return build_scalar_linear(params);
}

Problem build_unit_chain(std::size_t n, double cost) {
    if (n == 0) throw std::invalid_argument("build_unit_chain: need at least one state");
    ProblemBuilder b;
    for (std::size_t i = 0; i < n; ++i) b.add_state(std::to_string(i), i == 0);
    b.add_control("0", "stay", "0", ExtCost::zero());
    for (std::size_t i = 1; i < n; ++i) {
        const std::string id = std::to_string(i);
        b.add_control(id, "wait", id, ExtCost(cost));
        b.add_control(id, "step", std::to_string(i - 1), ExtCost(cost));
    }
    return b.build();
}

Problem build_gridworld(std::size_t width, std::size_t height,
                        const std::vector<std::pair<std::size_t, std::size_t>>& targets,
                        const std::vector<std::pair<std::size_t, std::size_t>>& walls) {
    auto is_in = [](const auto& cells, std::size_t r, std::size_t c) {
        return std::find(cells.begin(), cells.end(), std::pair{r, c}) != cells.end();
    };
    auto name = [](std::size_t r, std::size_t c) { return "r" + std::to_string(r) + "c" + std::to_string(c); };

    ProblemBuilder b;
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c)
            if (!is_in(walls, r, c)) b.add_state(name(r, c), is_in(targets, r, c));

    struct Move {
        const char* id;
        int dr;
        int dc;
    };
    constexpr Move moves[] = {{"N", -1, 0}, {"S", 1, 0}, {"E", 0, 1}, {"W", 0, -1}};
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            if (is_in(walls, r, c)) continue;
            const std::string here = name(r, c);
            const bool target = is_in(targets, r, c);
            for (const Move& m : moves) {
                std::string there = here;
                const long nr = static_cast<long>(r) + m.dr;
                const long nc = static_cast<long>(c) + m.dc;
                if (!target && nr >= 0 && nc >= 0 && nr < static_cast<long>(height) && nc < static_cast<long>(width) &&
                    !is_in(walls, static_cast<std::size_t>(nr), static_cast<std::size_t>(nc)))
                    there = name(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc));
                b.add_control(here, m.id, there, target ? ExtCost::zero() : ExtCost(1.0));
            }
        }
    }
    return b.build();
}

Problem build_adversarial_line() {
    ProblemBuilder b({"none", "push-right-1"});
    for (int i = 0; i < 4; ++i) b.add_state(std::to_string(i), i == 0);
    for (int x = 0; x < 4; ++x) {
        for (int step : {1, 2}) {
            std::vector<std::pair<std::string, ExtCost>> outcomes;
            for (int push : {0, 1}) {
                const int y = x == 0 ? 0 : std::clamp(x - step + push, 0, 3);
                outcomes.emplace_back(std::to_string(y), x == 0 ? ExtCost::zero() : ExtCost(1.0));
            }
            b.add_minimax_control(std::to_string(x), "left-" + std::to_string(step), outcomes);
        }
    }
    return b.build();
}

Problem build_tube_fixture() {
    ProblemBuilder b({"w0", "w1"});
    for (int i = 0; i < 5; ++i) b.add_state(std::to_string(i));
    const ExtCost one(1.0);
    b.add_minimax_control("0", "hold", {{"0", one}, {"1", one}});
    b.add_minimax_control("1", "hold", {{"1", one}, {"2", one}});
    b.add_minimax_control("1", "back", {{"0", one}, {"3", one}});
    b.add_minimax_control("1", "stay", {{"1", one}, {"1", one}});
    b.add_minimax_control("2", "hold", {{"2", one}, {"3", one}});
    b.add_minimax_control("2", "jump", {{"4", one}, {"0", one}});
    b.add_minimax_control("3", "hold", {{"3", one}, {"4", one}});
    b.add_minimax_control("3", "back", {{"2", one}, {"4", one}});
    b.add_minimax_control("4", "hold", {{"4", one}, {"4", one}});
    return b.build();
}

StateMask tube_fixture_set() { return {true, true, true, true, false}; }

DescentReport trajectory_descent_check(const Problem& p, const Policy& mu, StateIndex x0, std::size_t horizon,
                                       const ValueFunction& jstar) {
    if (!p.is_deterministic()) throw PreconditionError("trajectory_descent_check: requires a deterministic problem");
    if (jstar.size() != p.num_states() || mu.size() != p.num_states())
        throw std::invalid_argument("trajectory_descent_check: size mismatch");
    if (jstar.at(x0).is_infinite()) throw PreconditionError("trajectory_descent_check: J*(x0) is infinite");

    DescentReport report;
    StateIndex x = x0;
    ExtCost accumulated;
    const double start = jstar[x0].value();
    for (std::size_t k = 0; k <= horizon; ++k) {
        report.trajectory.push_back(x);
        report.values.push_back(jstar[x]);
        const ExtCost rebuilt = accumulated + jstar[x];
        const double err = std::abs(start - rebuilt.value());
        report.max_telescoping_error = std::max(report.max_telescoping_error, err);
        if (k > 0 && report.values[k] > report.values[k - 1] && report.monotone) {
            report.monotone = false;
            report.first_breach = k;
        }
        if (jstar[x].is_zero()) report.reached_zero = true;
        if (k == horizon) break;
        const ExtCost g = p.cost(x, mu[x]);
        report.stage_costs.push_back(g);
        accumulated += g;
        x = p.next(x, mu[x]);
    }
    return report;
}

}  // namespace termdp
