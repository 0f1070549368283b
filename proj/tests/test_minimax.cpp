#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "termdp/finite.hpp"
#include "termdp/fixtures.hpp"
#include "termdp/minimax.hpp"

#include <doctest.h>

using namespace termdp;
using namespace termdp::testing;

namespace {

// The same random graph problem with a single named disturbance.
Problem with_one_disturbance(const Problem& p) {
    std::vector<std::vector<Control>> controls(p.num_states());
    for (StateIndex x = 0; x < p.num_states(); ++x)
        controls[x].assign(p.controls(x).begin(), p.controls(x).end());
    std::vector<StateIndex> term(p.terminal_states().begin(), p.terminal_states().end());
    return Problem(std::vector<std::string>(p.state_ids().begin(), p.state_ids().end()), term, controls, {"w"});
}

}  // namespace

TEST_CASE("a single disturbance reduces to the deterministic operator") {
    std::mt19937_64 rng(37);
    InstanceShape shape;
    shape.zero_cost_probability = 0.2;
    for (int t = 0; t < 100; ++t) {
        const Problem p = random_instance(rng, shape);
        const Problem w = with_one_disturbance(p);
        CHECK(induced_deterministic(w) == p);
        std::vector<ExtCost> v(p.num_states());
        for (StateIndex x = 1; x < v.size(); ++x) v[x] = rng() % 4 == 0 ? ExtCost::infinity() : ExtCost((rng() % 100) * 0.125);
        const ValueFunction Jw(w, v);
        const ValueFunction Jp(p, v);
        const auto a = minimax_bellman(w, Jw);
        const auto b = bellman_operator(p, Jp);
        CHECK(std::equal(a.first.values().begin(), a.first.values().end(), b.first.values().begin()));
        CHECK(std::equal(a.second.choices().begin(), a.second.choices().end(), b.second.choices().begin()));
    }
    CHECK_THROWS_AS(induced_deterministic(build_adversarial_line()), PreconditionError);
}

TEST_CASE("minimax operator matches exhaustive evaluation over (u, w)") {
    const Problem p = build_adversarial_line();
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> J{0.0};
        for (int i = 1; i < 4; ++i) J.push_back(rng() % 6 == 0 ? inf : static_cast<double>(rng() % 50) / 4.0);
        const auto oracle = two_level_bellman(p, J);
        const auto got = as_doubles(minimax_bellman(p, from_doubles(p, J)).first);
        CHECK(got == oracle);
    }
}

TEST_CASE("one sweep from inf-outside is one-step guaranteed reachability") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 100; ++t) {
        const Problem p = random_minimax_instance(rng, 8, 3, 2);
        const ValueFunction J1 = minimax_bellman(p, ValueFunction::infinite_outside(p)).first;
        for (StateIndex x = 0; x < p.num_states(); ++x) {
            bool one_step = p.is_terminal(x);
            for (ControlIndex u = 0; u < p.num_controls(x) && !one_step; ++u) {
                bool all = true;
                for (DisturbanceIndex w = 0; w < p.num_disturbances(); ++w) all = all && p.is_terminal(p.next(x, u, w));
                one_step = all;
            }
            CHECK(J1[x].is_finite() == one_step);
        }
    }
}

TEST_CASE("min-time reachability on the adversarial line") {
    const Problem p = build_adversarial_line();
    const ViResult r = min_time_reachability(p);
    REQUIRE(r.converged);
    const auto oracle = game_tree_min_time(p);
    for (StateIndex x = 0; x < 4; ++x) {
        CHECK(r.final_value[x] == ExtCost(static_cast<double>(x)));
        CHECK(r.final_value[x].value() == oracle[x]);
    }
    CHECK(guaranteed_reachable(p) == StateMask{true, true, true, true});
}

TEST_CASE("min-time without disturbances is breadth-first distance") {
    const Problem p = build_gridworld(5, 5, {{2, 2}}, {{1, 2}, {3, 1}});
    const ViResult r = min_time_reachability(p);
    const auto bfs = bfs_distance(p);
    for (StateIndex x = 0; x < p.num_states(); ++x) CHECK(r.final_value[x].value() == bfs[x]);
}

TEST_CASE("adversary that can avoid the target forever gives infinity") {
    ProblemBuilder b({"w0", "w1"});
    b.add_state("0", true);
    b.add_state("1");
    const ExtCost one(1.0);
    b.add_minimax_control("0", "stay", {{"0", ExtCost::zero()}, {"0", ExtCost::zero()}});
    b.add_minimax_control("1", "try", {{"0", one}, {"1", one}});
    const Problem p = b.build();
    CHECK(min_time_reachability(p).final_value[1].is_infinite());
    CHECK(guaranteed_reachable(p) == StateMask{true, false});
}

TEST_CASE("min-time matches the game-tree oracle on random instances") {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 100; ++t) {
        const Problem p = random_minimax_instance(rng, 7, 3, 2);
        const auto oracle = game_tree_min_time(p);
        const auto got = as_doubles(min_time_reachability(p).final_value);
        CHECK(got == oracle);
    }
}

TEST_CASE("target tube on the five-state fixture") {
    const Problem p = build_tube_fixture();
    const TubeResult t = target_tube(p, tube_fixture_set());
    CHECK(t.fixed_set == StateMask{true, true, false, false, false});
    CHECK(t.iterations_to_fix == 3);
    REQUIRE(t.set_sequence.size() >= 2);
    CHECK(t.set_sequence.front() == tube_fixture_set());
    CHECK(t.set_sequence.back() == t.set_sequence[t.set_sequence.size() - 2]);
    const auto oracle = tube_strategy_oracle(p, tube_fixture_set());
    for (StateIndex x = 0; x < p.num_states(); ++x) CHECK(t.fixed_set[x] == oracle[x]);
}

TEST_CASE("invariant target set is its own tube") {
    const Problem p = build_tube_fixture();
    const StateMask all(5, true);
    const TubeResult t = target_tube(p, all);
    CHECK(t.fixed_set == all);
    CHECK(t.set_sequence.size() == 2);
}

TEST_CASE("ejectable boundary state is removed in the first iteration") {
    const Problem p = build_tube_fixture();
    const StateMask hat{true, true, true, true, false};
    const TubeResult t = target_tube(p, hat);
    CHECK_FALSE(t.set_sequence[1][3]);
}

TEST_CASE("tube fixed set is the zero set of the tube-cost problem") {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 100; ++t) {
        const Problem p = random_minimax_instance(rng, 7, 3, 2);
        StateMask hat(p.num_states());
        for (StateIndex x = 0; x < hat.size(); ++x) hat[x] = rng() % 3 != 0;
        const TubeResult tube = target_tube(p, hat);
        const auto oracle = tube_strategy_oracle(p, hat);
        const Problem c = tube_cost_problem(p, hat);
        ValueFunction J = tube_seed(c, hat);
        for (std::size_t k = 0; k <= p.num_states(); ++k) J = minimax_bellman(c, J).first;
        for (StateIndex x = 0; x < p.num_states(); ++x) {
            CHECK(tube.fixed_set[x] == oracle[x]);
            CHECK(tube.fixed_set[x] == J[x].is_zero());
        }
    }
}
