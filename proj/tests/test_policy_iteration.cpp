#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "termdp/finite.hpp"
#include "termdp/fixtures.hpp"
#include "termdp/minimax.hpp"
#include "termdp/policy_iteration.hpp"

#include <doctest.h>

using namespace termdp;
using namespace termdp::testing;

TEST_CASE("improvement keeps the current control on ties") {
    const Problem p = build_example1();
    const Policy move(p, {0, example1_move});
    const ValueFunction J = evaluate_policy(p, move);
    CHECK(J[1] == ExtCost(1.0));
    CHECK(improve_policy(p, J, move, TieBreak::keep_current) == move);
    CHECK(improve_policy(p, J, move, TieBreak::least_index)[1] == example1_stay);
}

TEST_CASE("improvement with a single control per state") {
    ProblemBuilder b;
    b.add_state("0", true);
    b.add_state("1");
    b.add_control("0", "stay", "0", ExtCost::zero());
    b.add_control("1", "go", "0", ExtCost(3.0));
    const Problem p = b.build();
    const Policy mu = Policy::first_control(p);
    CHECK(improve_policy(p, ValueFunction::zero(p), mu) == mu);
}

TEST_CASE("policy iteration stalls on the two-state fixture under keep_current") {
    const Problem p = build_example1();
    const PiResult r = run_pi(p, Policy(p, {0, example1_move}), TieBreak::keep_current);
    CHECK(r.stopped_reason == StopReason::policy_repeat);
    CHECK(r.final_value[1] == ExtCost(1.0));
    CHECK(oracle_policy_enum(p)[1] == ExtCost::zero());
}

TEST_CASE("policy iteration on chains reaches the shortest path") {
    for (std::size_t n : {2u, 5u, 9u}) {
        const Problem p = build_unit_chain(n);
        const PiResult r = run_pi(p, Policy::first_control(p), TieBreak::least_index);
        CHECK(r.stopped_reason == StopReason::policy_repeat);
        CHECK(r.iterations <= n);
        CHECK(r.final_value == oracle_dijkstra(p));
    }
}

TEST_CASE("policy iteration from an optimal policy stops at once") {
    const Problem p = build_unit_chain(4);
    const Policy step(p, {0, 1, 1, 1});
    const PiResult r = run_pi(p, step);
    CHECK(r.iterations == 1);
    CHECK(r.final_policy == step);
    CHECK(r.values.front() == r.final_value);
}

TEST_CASE("policy iteration requires a deterministic graph problem") {
    const Problem p = build_adversarial_line();
    CHECK_THROWS_AS(run_pi(p, Policy::first_control(p)), PreconditionError);
}

TEST_CASE("OPI seed condition") {
    const Problem p = build_unit_chain(4);
    CHECK(check_opi_seed(p, ValueFunction::infinite_outside(p)));
    CHECK(check_opi_seed(p, evaluate_policy(p, Policy(p, {0, 1, 0, 1}))));
    CHECK_FALSE(check_opi_seed(p, ValueFunction::zero(p)));
    CHECK_FALSE(check_opi_seed(p, ValueFunction::constant(p, ExtCost::infinity())));
    CHECK_THROWS_AS(run_opi(p, ValueFunction::zero(p), SweepSchedule(2)), PreconditionError);
}

TEST_CASE("OPI seeds from any policy cost are admissible") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const Problem p = random_instance(rng);
        std::vector<ControlIndex> c(p.num_states());
        for (StateIndex x = 0; x < p.num_states(); ++x) c[x] = rng() % p.num_controls(x);
        CHECK(check_opi_seed(p, evaluate_policy(p, Policy(p, c))));
    }
}

TEST_CASE("OPI with one sweep is VI") {
    const Problem p = build_gridworld(4, 4, {{3, 3}});
    const ValueFunction J0 = ValueFunction::infinite_outside(p);
    ViOptions vo;
    vo.record_values = true;
    OpiOptions oo;
    oo.record_values = true;
    const ViResult vi = run_vi(p, J0, vo);
    const PiResult opi = run_opi(p, J0, SweepSchedule(1), oo);
    REQUIRE(vi.trace.rows.size() == opi.trace.rows.size());
    for (std::size_t k = 0; k < vi.trace.rows.size(); ++k) CHECK(vi.trace.rows[k].values == opi.trace.rows[k].values);
}

TEST_CASE("OPI with three sweeps on a gridworld") {
    const Problem p = build_gridworld(6, 5, {{0, 0}}, {{2, 2}, {2, 3}, {3, 2}});
    const PiResult r = run_opi(p, ValueFunction::infinite_outside(p), SweepSchedule(3));
    CHECK(r.stopped_reason == StopReason::value_converged);
    CHECK(sup_distance(r.final_value, oracle_dijkstra(p)).value() <= 1e-9);
    for (std::size_t k = 1; k < r.values.size(); ++k) CHECK(dominates(r.values[k - 1], r.values[k]));
}

TEST_CASE("OPI with many sweeps matches PI") {
    const Problem p = build_unit_chain(7, 1.5);
    const PiResult opi = run_opi(p, ValueFunction::infinite_outside(p), SweepSchedule(1000));
    const PiResult pi = run_pi(p, Policy(p, {0, 1, 1, 1, 1, 1, 1}));
    CHECK(sup_distance(opi.final_value, pi.final_value).value() <= 1e-9);
}

TEST_CASE("sweep schedules") {
    const SweepSchedule s({1, 3, 5});
    CHECK(s.at(0) == 1);
    CHECK(s.at(2) == 5);
    CHECK(s.at(100) == 5);
    CHECK(SweepSchedule(4).at(9) == 4);
    CHECK_THROWS_AS(SweepSchedule(0), std::invalid_argument);
    CHECK_THROWS_AS(SweepSchedule(std::vector<std::size_t>{}), std::invalid_argument);
}

TEST_CASE("OPI on an adversarial problem") {
    const Problem p = build_adversarial_line();
    const PiResult r = run_opi(p, ValueFunction::infinite_outside(p), SweepSchedule(2));
    CHECK(r.stopped_reason == StopReason::value_converged);
    const auto oracle = game_tree_min_time(p);
    for (StateIndex x = 0; x < p.num_states(); ++x) CHECK(r.final_value[x].value() == oracle[x]);
}
