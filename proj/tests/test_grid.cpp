#include "support/oracles.hpp"
#include "termdp/fixtures.hpp"
#include "termdp/grid.hpp"

#include <doctest.h>

using namespace termdp;

TEST_CASE("grid axes and nodes") {
    const GridAxis a{-1.0, 1.0, 201};
    CHECK(a.spacing() == doctest::Approx(0.01));
    CHECK(a.node(100) == 0.0);
    CHECK(a.node(200) == 1.0);
    GridSpec g{{GridAxis{0.0, 1.0, 3}, GridAxis{-1.0, 1.0, 5}}, {{0.0}}};
    CHECK(g.num_nodes() == 15);
    CHECK(g.node(0) == std::vector<double>{0.0, -1.0});
    CHECK(g.node(4) == std::vector<double>{0.5, -0.5});
    CHECK_THROWS_AS((GridSpec{{GridAxis{1.0, 0.0, 3}}, {{0.0}}}.check()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{{GridAxis{0.0, 1.0, 1}}, {{0.0}}}.check()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{{GridAxis{0.0, 1.0, 3}}, {}}.check()), std::invalid_argument);
}

TEST_CASE("interpolation") {
    GridSpec g{{GridAxis{0.0, 2.0, 3}}, {{0.0}}};
    const std::vector<ExtCost> v{ExtCost(1.0), ExtCost(3.0), ExtCost::infinity()};
    const double on_node[] = {1.0};
    const double mid[] = {0.5};
    const double near_inf[] = {1.5};
    CHECK(interpolate_value(g, v, on_node) == ExtCost(3.0));
    CHECK(interpolate_value(g, v, mid) == ExtCost(2.0));
    CHECK(interpolate_value(g, v, near_inf).is_infinite());

    bool clamped = false;
    const double outside[] = {5.0};
    const auto s = interpolation_stencil(g, outside, &clamped);
    CHECK(clamped);
    REQUIRE(s.size() == 1);
    CHECK(s[0].state == 2);

    GridSpec g2{{GridAxis{0.0, 1.0, 2}, GridAxis{0.0, 1.0, 2}}, {{0.0}}};
    const double centre[] = {0.5, 0.5};
    const auto c = interpolation_stencil(g2, centre);
    CHECK(c.size() == 4);
    double total = 0.0;
    for (const Successor& x : c) total += x.weight;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("two-solution grid is valid and both candidates are near fixed points") {
    const LinearGridProblem g = build_example4();
    CHECK(validate(g.problem).ok());
    CHECK(g.problem.num_states() == 201);
    CHECK(g.problem.num_controls(0) == 41);
    CHECK(g.problem.is_terminal(g.origin));
    CHECK(g.point(g.origin) == std::vector<double>{0.0});
    CHECK(residual(g.problem, ValueFunction::zero(g.problem)) <= g.grid_tolerance);
    const StateMask inner = g.region(0.5);
    const ValueFunction quad = g.sample([](std::span<const double> x) { return 3.0 * x[0] * x[0]; });
    CHECK(residual(g.problem, quad, &inner) <= g.grid_tolerance);
}

TEST_CASE("identity dynamics with zero cost") {
    LinearSystemSpec sys{Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Constant(1, 1, 1.0), CostForm{0.0, 0.0, 2.0}};
    GridSpec grid{{GridAxis{-1.0, 1.0, 11}}, {{0.0}}};
    const LinearGridProblem g = build_linear_problem(sys, grid);
    const ViResult r = run_vi(g.problem, ValueFunction::zero(g.problem));
    CHECK(r.converged);
    for (ExtCost c : r.final_value.values()) CHECK(c.is_zero());
}

TEST_CASE("the origin must be a grid node") {
    LinearSystemSpec sys{Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1), CostForm{}};
    CHECK_THROWS_AS(build_linear_problem(sys, GridSpec{{GridAxis{-1.0, 1.0, 4}}, {{0.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(build_linear_problem(sys, GridSpec{{GridAxis{0.5, 1.0, 4}}, {{0.0}}}), std::invalid_argument);
}

TEST_CASE("Riccati oracle") {
    LinearSystemSpec sys{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Constant(1, 1, 1.0), CostForm{1.0, 1.0, 2.0}};
    const double K = riccati_oracle(sys)(0, 0);
    CHECK(K == doctest::Approx(2.0 + std::sqrt(5.0)).epsilon(1e-12));
    CHECK(K == doctest::Approx(testing::scalar_riccati(2.0, 1.0, 1.0, 1.0)).epsilon(1e-12));
    CHECK(K * K - 4.0 * K - 1.0 == doctest::Approx(0.0).epsilon(1e-9));

    sys.A(0, 0) = 0.0;
    CHECK(riccati_oracle(sys)(0, 0) == doctest::Approx(1.0));

    for (double a : {0.5, 1.0, 3.0})
        for (double q : {0.5, 2.0})
            for (double r : {0.25, 1.0}) {
                LinearSystemSpec s{Eigen::MatrixXd::Constant(1, 1, a), Eigen::MatrixXd::Constant(1, 1, 1.0), CostForm{q, r, 2.0}};
                CHECK(riccati_oracle(s)(0, 0) == doctest::Approx(testing::scalar_riccati(a, 1.0, q, r)).epsilon(1e-10));
            }

    sys.A(0, 0) = 2.0;
    sys.cost.q = 0.0;
    CHECK_THROWS_AS(riccati_oracle(sys), PreconditionError);
    sys.cost = CostForm{1.0, 1.0, 3.0};
    CHECK_THROWS_AS(riccati_oracle(sys), PreconditionError);
}

TEST_CASE("two-dimensional Riccati solution satisfies the algebraic equation") {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 1.0, 0.0, 1.0;
    Eigen::MatrixXd B(2, 1);
    B << 0.0, 1.0;
    const LinearSystemSpec sys{A, B, CostForm{1.0, 1.0, 2.0}};
    const Eigen::MatrixXd K = riccati_oracle(sys);
    const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(1, 1) + B.transpose() * K * B;
    const Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(2, 2) + A.transpose() * K * A -
                                A.transpose() * K * B * S.inverse() * B.transpose() * K * A;
    CHECK((rhs - K).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("two-dimensional grid problem") {
    Eigen::MatrixXd A = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2, 2);
    GridSpec grid{{GridAxis{-1.0, 1.0, 5}, GridAxis{-1.0, 1.0, 5}},
                  GridSpec::uniform_controls({GridAxis{-0.5, 0.5, 3}, GridAxis{-0.5, 0.5, 3}})};
    const LinearGridProblem g = build_linear_problem({A, B, CostForm{1.0, 1.0, 2.0}}, grid);
    CHECK(g.problem.num_states() == 25);
    CHECK(g.problem.num_controls(0) == 9);
    CHECK(g.origin == 12);
    CHECK(validate(g.problem).ok());
    const ViResult r = run_vi(g.problem, ValueFunction::zero(g.problem));
    CHECK(r.converged);
    CHECK(r.final_value[g.origin] == ExtCost::zero());
}
