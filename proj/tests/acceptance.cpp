// One line per acceptance criterion; exit status 1 if any criterion fails.

#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "termdp/assumptions.hpp"
#include "termdp/finite.hpp"
#include "termdp/fixtures.hpp"
#include "termdp/minimax.hpp"
#include "termdp/policy_iteration.hpp"
#include "termdp/value_iteration.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace termdp;
using namespace termdp::testing;

namespace {

struct Criterion {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

std::vector<Problem> random_suite(std::uint64_t seed, std::size_t count, const InstanceShape& shape) {
    std::mt19937_64 rng(seed);
    std::vector<Problem> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(random_instance(rng, shape));
    return out;
}

const std::vector<Problem>& monotone_suite() {
    static const std::vector<Problem> suite = random_suite(20260101, 100, InstanceShape{});
    return suite;
}

// Small instances where free controls and free self-loops create zero-cost
// cycles; every instance is regenerated until it has at least one.
const std::vector<Problem>& zero_cycle_suite() {
    static const std::vector<Problem> suite = [] {
        InstanceShape shape;
        shape.max_states = 7;
        shape.max_actions = 3;
        shape.zero_cost_probability = 0.35;
        shape.zero_loop_probability = 0.35;
        std::mt19937_64 rng(4242);
        std::vector<Problem> out;
        while (out.size() < 20) {
            Problem p = random_instance(rng, shape);
            const auto cyc = dfs_zero_cycle_states(p);
            if (std::find(cyc.begin(), cyc.end(), true) != cyc.end()) out.push_back(std::move(p));
        }
        return out;
    }();
    return suite;
}

bool same_values(const ValueFunction& J, const std::vector<double>& v, double tol) {
    for (StateIndex x = 0; x < J.size(); ++x)
        if (!close(J[x].value(), v[x], tol)) return false;
    return true;
}

ValueFunction two_state(const Problem& p, double j1) { return ValueFunction(p, {ExtCost::zero(), ExtCost(j1)}); }

void criterion1(Criterion& o) {
    const Problem p = build_example1();
    for (double c : {0.0, 0.25, 0.5, 0.75, 1.0}) o.require(residual(p, two_state(p, c)) == 0.0, "residual at c");
    const MultiplicityResult m = multiplicity_scan(p, default_seeds(p));
    o.require(m.fixed_points.size() == 2, "two fixed points");
    if (m.fixed_points.size() == 2) {
        std::vector<double> j1{m.fixed_points[0].value[1].value(), m.fixed_points[1].value[1].value()};
        std::sort(j1.begin(), j1.end());
        o.require(j1 == std::vector<double>{0.0, 1.0}, "fixed points J(1) in {0, 1}");
        o.require(m.count_in_j_class() == 2, "both fixed points vanish on the terminal set");
    }
    o.require(lasso_optimal(p)[1] == 0.0, "brute-force J*(1) = 0");
    o.require(oracle_policy_enum(p)[1] == ExtCost::zero(), "enumerated J*(1) = 0");
    o.detail << "fixed points " << m.fixed_points.size() << ", J*(1) = " << lasso_optimal(p)[1];
}

void criterion2(Criterion& o) {
    std::vector<double> xs(10'000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 2.0 * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
    const Example2Report r = verify_example2(1'000'000, xs);
    o.require(r.samples_checked == 10'000, "10^4 samples");
    o.require(r.max_recursion_error <= 1e-12, "recursion error");
    o.require(r.zero_state_stays_zero && r.k_max == 1'000'000, "J_k(0) = 0 up to 10^6");
    o.require(r.optimal_at_zero == 1.0, "J*(0) = 1");

    // Independent replay of one VI step in closed form: from J_k = min{1, kx}
    // the minimization over stopping (cost 1) and moving to x + u (cost x,
    // infimum over u > 0 equal to kx by right continuity) gives min{1, (k+1)x}.
    double worst = 0.0;
    for (double x : xs)
        for (std::uint64_t k : {0ull, 1ull, 2ull, 10ull, 999ull, 65536ull, 999999ull}) {
            const double jk = std::min(1.0, static_cast<double>(k) * x);
            const double step = std::min(1.0, x + jk);
            worst = std::max(worst, std::abs(step - std::min(1.0, static_cast<double>(k + 1) * x)));
        }
    o.require(worst <= 1e-12, "independent replay");
    o.detail << "max recursion error " << r.max_recursion_error << ", replay error " << worst;
}

void criterion3(Criterion& o) {
    const Problem p = build_example1();
    const Policy move(p, {0, example1_move});
    const PiResult keep = run_pi(p, move, TieBreak::keep_current);
    const PiResult least = run_pi(p, move, TieBreak::least_index);
    o.require(keep.final_value[1] == ExtCost(1.0), "keep_current stops at J(1) = 1");
    o.require(keep.stopped_reason == StopReason::policy_repeat, "keep_current terminates");
    o.require(least.final_value[1] == ExtCost::zero(), "least_index reaches J(1) = 0");
    o.detail << "keep_current J(1) = " << keep.final_value[1] << ", least_index J(1) = " << least.final_value[1];
}

void criterion4(Criterion& o) {
    const LinearGridProblem g = build_example4();
    o.require(g.problem.num_states() == 201 && g.problem.num_controls(0) == 41, "grid shape");
    const StateMask inner = g.region(0.5);
    const double r0 = residual(g.problem, ValueFunction::zero(g.problem), &inner);
    const double r3 = residual(g.problem, g.sample([](std::span<const double> x) { return 3.0 * x[0] * x[0]; }), &inner);
    o.require(r0 <= g.grid_tolerance, "J = 0 residual");
    o.require(r3 <= g.grid_tolerance, "J = 3x^2 residual");
    o.detail << "residuals " << r0 << " and " << r3 << " vs tolerance " << g.grid_tolerance;
}

void criterion5(Criterion& o) {
    const auto start = std::chrono::steady_clock::now();
    const LinearGridProblem g = build_lq_grid();
    const ViResult a = run_vi(g.problem, ValueFunction::zero(g.problem));
    const ViResult b = run_vi(g.problem, ValueFunction::infinite_outside(g.problem));
    const double K = riccati_oracle(g.system)(0, 0);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(a.converged && b.converged, "both runs converge");
    const double gap = sup_distance(a.final_value, b.final_value).value();
    o.require(gap <= 2.0 * g.grid_tolerance, "seeds agree");
    o.require(std::abs(K - (2.0 + std::sqrt(5.0))) <= 1e-9, "K = 2 + sqrt 5");
    o.require(std::abs(K - scalar_riccati(2.0, 1.0, 1.0, 1.0)) <= 1e-9, "K matches the quadratic root");

    const double half = 0.5 * g.radius();
    double num = 0.0;
    double den = 0.0;
    for (StateIndex x = 0; x < g.problem.num_states(); ++x) {
        const double s = g.point(x)[0];
        if (std::abs(s) > half + 1e-12) continue;
        const double expect = K * s * s;
        num = std::max(num, std::abs(a.final_value[x].value() - expect));
        den = std::max(den, expect);
    }
    const double rel = num / den;
    o.require(rel <= 0.05, "relative error within 5%");
    o.require(seconds <= 10.0, "runtime");
    o.detail << "K = " << K << ", seed gap " << gap << ", relative error " << rel << ", " << seconds << " s";
}

void criterion6(Criterion& o) {
    std::size_t rounds = 0;
    for (const Problem& p : monotone_suite()) {
        const auto oracle = bellman_ford_distance(p);
        o.require(same_values(oracle_dijkstra(p), oracle, 1e-12), "Dijkstra vs Bellman-Ford");
        ViOptions opts;
        opts.record_values = true;
        const ViResult up = run_vi(p, ValueFunction::zero(p), opts);
        const ViResult down = run_vi(p, ValueFunction::infinite_outside(p), opts);
        ValueFunction prev = ValueFunction::zero(p);
        for (const TraceRow& row : up.trace.rows) {
            const ValueFunction cur(p, row.values);
            o.require(dominates(cur, prev), "VI from zero nondecreasing");
            prev = cur;
        }
        prev = ValueFunction::infinite_outside(p);
        for (const TraceRow& row : down.trace.rows) {
            const ValueFunction cur(p, row.values);
            o.require(dominates(prev, cur), "VI from inf-outside nonincreasing");
            prev = cur;
        }
        o.require(up.converged && same_values(up.final_value, oracle, 1e-9), "VI from zero limit");
        o.require(down.converged && same_values(down.final_value, oracle, 1e-9), "VI from inf-outside limit");

        const PiResult pi = run_pi(p, Policy::first_control(p), TieBreak::least_index);
        o.require(same_values(pi.final_value, oracle, 1e-9), "PI limit");
        for (std::size_t k = 0; k + 1 < pi.values.size(); ++k) {
            ++rounds;
            const auto J = as_doubles(pi.values[k]);
            const auto TJ = two_level_bellman(p, J);
            const auto Jn = as_doubles(pi.values[k + 1]);
            o.require(dominates(pi.values[k], pi.values[k + 1]), "PI costs nonincreasing");
            for (StateIndex x = 0; x < p.num_states(); ++x)
                o.require(J[x] >= TJ[x] && TJ[x] >= Jn[x], "sandwich inequality");
        }
    }
    o.detail << monotone_suite().size() << " instances, " << rounds << " PI rounds";
}

void criterion7(Criterion& o) {
    std::size_t runs = 0;
    for (const Problem& p : monotone_suite()) {
        ViOptions vo;
        vo.record_values = true;
        const ViResult vi = run_vi(p, ValueFunction::infinite_outside(p), vo);
        for (std::size_t m : {1u, 3u, 10u}) {
            ++runs;
            OpiOptions oo;
            oo.record_values = true;
            const PiResult r = run_opi(p, ValueFunction::infinite_outside(p), SweepSchedule(m), oo);
            o.require(r.stopped_reason == StopReason::value_converged, "OPI converges");
            for (std::size_t k = 1; k < r.values.size(); ++k)
                o.require(dominates(r.values[k - 1], r.values[k]), "OPI iterates nonincreasing");
            o.require(sup_distance(r.final_value, vi.final_value).value() <= 1e-9, "OPI limit equals VI limit");
            if (m == 1) {
                o.require(r.trace.rows.size() == vi.trace.rows.size(), "m = 1 iteration count");
                for (std::size_t k = 0; k < std::min(r.trace.rows.size(), vi.trace.rows.size()); ++k)
                    o.require(r.trace.rows[k].values == vi.trace.rows[k].values, "m = 1 iterates equal VI");
            }
        }
    }
    o.detail << runs << " runs with m in {1, 3, 10}";
}

void criterion8(Criterion& o) {
    std::size_t certified = 0;
    std::mt19937_64 rng(777);
    for (const Problem& p : zero_cycle_suite()) {
        const ValueFunction jstar = oracle_policy_enum(p);
        o.require(same_values(jstar, lasso_optimal(p), 1e-12), "enumeration vs lasso oracle");
        std::vector<ValueFunction> seeds = default_seeds(p, 16, rng());
        for (int s = 0; s < 8; ++s) {
            std::vector<ExtCost> v(p.num_states());
            for (StateIndex x = 1; x < v.size(); ++x) v[x] = ExtCost(static_cast<double>(rng() % 400) / 16.0);
            seeds.emplace_back(p, std::move(v));
        }
        const MultiplicityResult m = multiplicity_scan(p, seeds);
        for (const FixedPointCandidate& f : m.fixed_points) {
            ++certified;
            o.require(f.residual <= 1e-9, "certified residual");
            o.require(dominates(f.value, jstar), "fixed point dominates J*");
        }
    }
    o.require(certified >= zero_cycle_suite().size(), "every instance yields a fixed point");
    o.detail << zero_cycle_suite().size() << " instances, " << certified << " certified fixed points";
}

Problem with_single_disturbance(const Problem& p) {
    std::vector<std::vector<Control>> controls(p.num_states());
    for (StateIndex x = 0; x < p.num_states(); ++x) controls[x].assign(p.controls(x).begin(), p.controls(x).end());
    return Problem(std::vector<std::string>(p.state_ids().begin(), p.state_ids().end()),
                   std::vector<StateIndex>(p.terminal_states().begin(), p.terminal_states().end()), controls, {"w"});
}

void criterion9(Criterion& o) {
    std::vector<Problem> fixtures{build_example1(), build_unit_chain(6), build_gridworld(4, 3, {{0, 0}}, {{1, 1}})};
    for (std::size_t i = 0; i < 10; ++i) fixtures.push_back(monotone_suite()[i]);
    std::mt19937_64 rng(99);
    for (const Problem& p : fixtures) {
        const Problem w = with_single_disturbance(p);
        o.require(induced_deterministic(w) == p, "induced problem");
        for (int s = 0; s < 5; ++s) {
            std::vector<ExtCost> v(p.num_states());
            for (StateIndex x = 0; x < v.size(); ++x)
                if (!p.is_terminal(x)) v[x] = rng() % 5 == 0 ? ExtCost::infinity() : ExtCost(static_cast<double>(rng() % 64) / 8.0);
            const auto a = minimax_bellman(w, ValueFunction(w, v));
            const auto b = bellman_operator(p, ValueFunction(p, v));
            o.require(std::equal(a.first.values().begin(), a.first.values().end(), b.first.values().begin()),
                      "single disturbance operator");
            o.require(std::equal(a.second.choices().begin(), a.second.choices().end(), b.second.choices().begin()),
                      "single disturbance policy");
        }
        const ViResult mt = min_time_reachability(w);
        const auto bfs = bfs_distance(p);
        o.require(same_values(mt.final_value, bfs, 0.0), "single disturbance min-time equals BFS");
    }

    const Problem line = build_adversarial_line();
    const ViResult mt = min_time_reachability(line);
    const auto game = game_tree_min_time(line);
    o.require(same_values(mt.final_value, game, 0.0), "min-time vs game tree");

    const Problem tube = build_tube_fixture();
    const StateMask hat = tube_fixture_set();
    const TubeResult t = target_tube(tube, hat);
    const auto strat = tube_strategy_oracle(tube, hat);
    for (StateIndex x = 0; x < tube.num_states(); ++x) o.require(t.fixed_set[x] == strat[x], "tube vs strategy oracle");

    const Problem cost = tube_cost_problem(tube, hat);
    ValueFunction J = tube_seed(cost, hat);
    for (std::size_t k = 0; k <= tube.num_states(); ++k) J = minimax_bellman(cost, J).first;
    for (StateIndex x = 0; x < tube.num_states(); ++x) o.require(t.fixed_set[x] == J[x].is_zero(), "tube vs zero set");

    o.detail << fixtures.size() << " reduction fixtures; line values";
    for (ExtCost v : mt.final_value.values()) o.detail << " " << v;
    o.detail << "; tube {";
    const auto members_of = members(t.fixed_set);
    for (std::size_t i = 0; i < members_of.size(); ++i) o.detail << (i ? "," : "") << tube.state_id(members_of[i]);
    o.detail << "}";
}

void criterion10(Criterion& o) {
    const AssumptionReport ex1 = check_assumption1(build_example1());
    o.require(ex1.verdict == Verdict::assumption1_violated_with_witness, "two-state fixture violated");
    o.require(!ex1.witnesses.empty() && !ex1.witnesses[0].cycle.empty(), "witness cycle");
    for (std::size_t n : {2u, 5u, 12u})
        o.require(check_assumption1(build_unit_chain(n)).verdict == Verdict::assumption1_established, "unit chain");
    const AssumptionReport lq = check_assumption1(build_lq_grid());
    o.require(lq.verdict == Verdict::assumption1_established, "LQ grid established");

    std::size_t established = 0;
    std::size_t checked = 0;
    auto scan = [&](const Problem& p) {
        ++checked;
        if (check_assumption1(p).verdict != Verdict::assumption1_established) return;
        ++established;
        const MultiplicityResult m = multiplicity_scan(p, default_seeds(p));
        o.require(m.count_in_j_class() == 1, "unique fixed point where established");
    };
    for (const Problem& p : monotone_suite()) scan(p);
    for (const Problem& p : zero_cycle_suite()) scan(p);
    InstanceShape loose;
    loose.reachable = false;
    loose.zero_cost_probability = 0.15;
    loose.infinite_cost_probability = 0.1;
    for (const Problem& p : random_suite(31337, 100, loose)) scan(p);
    o.detail << established << " of " << checked << " finite instances established";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria{
        {"two-state fixture: multiplicity of fixed points", criterion1},
        {"continuous-state VI failure at zero", criterion2},
        {"PI stall under keep_current tie-breaking", criterion3},
        {"zero state cost grid: two solutions", criterion4},
        {"LQ grid: unique solution matching Riccati", criterion5},
        {"monotone convergence of VI and PI", criterion6},
        {"optimistic PI", criterion7},
        {"optimal cost is the smallest fixed point", criterion8},
        {"minimax, min-time and target tube", criterion9},
        {"assumption checker end to end", criterion10},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Criterion o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
