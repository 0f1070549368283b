#pragma once

#include "termdp/problem.hpp"
#include "termdp/value_iteration.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace termdp {

struct GridAxis {
    double lower = -1.0;
    double upper = 1.0;
    std::size_t points = 2;

    double spacing() const noexcept { return (upper - lower) / static_cast<double>(points - 1); }
    double node(std::size_t i) const noexcept;
};

/// Uniform state grid plus a finite list of control vectors.
struct GridSpec {
    std::vector<GridAxis> axes;
    std::vector<std::vector<double>> controls;

    std::size_t dimension() const noexcept { return axes.size(); }
    std::size_t num_nodes() const noexcept;
    std::vector<double> node(std::size_t index) const;
    double max_spacing() const noexcept;

    /// Throws std::invalid_argument on fewer than 2 points, unordered bounds,
    /// an empty control list or mismatched control dimensions.
    void check() const;

    /// Cartesian product of uniform axes.
    static std::vector<std::vector<double>> uniform_controls(const std::vector<GridAxis>& axes);
};

/// g(x,u) = q * |x|^p + r * |u|^p with Euclidean norms.
struct CostForm {
    double q = 0.0;
    double r = 1.0;
    double p = 2.0;

    double operator()(std::span<const double> x, std::span<const double> u) const;
};

/// x_{k+1} = A x_k + B u_k with stage cost `cost`.
struct LinearSystemSpec {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    CostForm cost;

    void check() const;
};

/// A discretized linear system: grid nodes are states, the origin node is the
/// only terminal state, and off-grid successors are spread over the corners
/// of their grid cell by multilinear interpolation.
struct LinearGridProblem {
    Problem problem;
    GridSpec grid;
    LinearSystemSpec system;
    StateIndex origin = 0;
    /// clamped[x][u]: the successor left the grid and was projected onto it.
    std::vector<std::vector<bool>> clamped;
    std::size_t clamped_count = 0;
    /// Lipschitz estimate of g over the grid box times the control box.
    double cost_lipschitz = 0.0;
    /// 10 * cost_lipschitz * max grid spacing.
    double grid_tolerance = 0.0;

    std::vector<double> point(StateIndex x) const { return grid.node(x); }
    /// Nodes with max-norm at most `radius`.
    StateMask region(double radius) const;
    /// Euclidean distance of the largest grid corner from the origin.
    double radius() const;
    ValueFunction sample(const std::function<double(std::span<const double>)>& f) const;
};

/// Throws std::invalid_argument when the specs are malformed or the origin is
/// not a grid node.
LinearGridProblem build_linear_problem(const LinearSystemSpec& system, const GridSpec& grid);

/// Successor stencil of a point: corners of its grid cell with positive
/// multilinear weights. Coordinates within 1e-9 of a spacing from a node snap
/// to it. Points outside the grid are clamped and `clamped` is set.
std::vector<Successor> interpolation_stencil(const GridSpec& grid, std::span<const double> x,
                                             bool* clamped = nullptr);

/// Multilinear interpolation of grid values at x; inf if any corner with
/// positive weight is inf.
ExtCost interpolate_value(const GridSpec& grid, std::span<const ExtCost> values, std::span<const double> x);

/// K with J*(x) = x' K x for q|x|^2 + r|u|^2 cost, by iterating the Riccati
/// map from K = q I until the entrywise change is at most `tol`. Requires
/// p = 2, q > 0 and r > 0; throws PreconditionError otherwise or when the
/// iteration cap is hit.
Eigen::MatrixXd riccati_oracle(const LinearSystemSpec& system, double tol = 1e-12,
                               std::size_t max_iters = 100'000);

}  // namespace termdp
