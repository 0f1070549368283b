#include "termdp/grid.hpp"

#include <algorithm>
#include <cmath>

namespace termdp {

namespace {

constexpr double snap_fraction = 1e-9;

double euclidean(std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

}  // namespace

double GridAxis::node(std::size_t i) const noexcept {
    if (i + 1 == points) return upper;
    const double c = lower + static_cast<double>(i) * spacing();
    return std::abs(c) <= snap_fraction * spacing() ? 0.0 : c;
}

std::size_t GridSpec::num_nodes() const noexcept {
    std::size_t n = 1;
    for (const GridAxis& a : axes) n *= a.points;
    return n;
}

std::vector<double> GridSpec::node(std::size_t index) const {
    std::vector<double> x(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) {
        x[d] = axes[d].node(index % axes[d].points);
        index /= axes[d].points;
    }
    return x;
}

double GridSpec::max_spacing() const noexcept {
    double h = 0.0;
    for (const GridAxis& a : axes) h = std::max(h, a.spacing());
    return h;
}

void GridSpec::check() const {
    if (axes.empty()) throw std::invalid_argument("GridSpec: no axes");
    for (const GridAxis& a : axes) {
        if (a.points < 2) throw std::invalid_argument("GridSpec: each axis needs at least 2 points");
        if (!(a.lower < a.upper)) throw std::invalid_argument("GridSpec: axis bounds must satisfy lower < upper");
    }
    if (controls.empty()) throw std::invalid_argument("GridSpec: empty control list");
    const std::size_t m = controls.front().size();
    for (const auto& u : controls)
        if (u.size() != m || m == 0) throw std::invalid_argument("GridSpec: control vectors of mixed dimension");
}

std::vector<std::vector<double>> GridSpec::uniform_controls(const std::vector<GridAxis>& axes) {
    GridSpec tmp{axes, {}};
    std::vector<std::vector<double>> out;
    out.reserve(tmp.num_nodes());
    for (std::size_t i = 0; i < tmp.num_nodes(); ++i) out.push_back(tmp.node(i));
    return out;
}

double CostForm::operator()(std::span<const double> x, std::span<const double> u) const {
    const double nx = euclidean(x);
    const double nu = euclidean(u);
    double g = 0.0;
    if (q != 0.0 && nx != 0.0) g += q * std::pow(nx, p);
    if (r != 0.0 && nu != 0.0) g += r * std::pow(nu, p);
    return g;
}

void LinearSystemSpec::check() const {
    if (A.rows() == 0 || A.rows() != A.cols()) throw std::invalid_argument("LinearSystemSpec: A must be square");
    if (B.rows() != A.rows() || B.cols() == 0) throw std::invalid_argument("LinearSystemSpec: B must be n x m");
    if (!(cost.q >= 0.0) || !(cost.r >= 0.0)) throw std::invalid_argument("LinearSystemSpec: q and r must be >= 0");
    if (!(cost.p > 0.0)) throw std::invalid_argument("LinearSystemSpec: cost exponent must be positive");
}

std::vector<Successor> interpolation_stencil(const GridSpec& grid, std::span<const double> x, bool* clamped) {
    if (x.size() != grid.dimension()) throw std::invalid_argument("interpolation_stencil: dimension mismatch");
    bool outside = false;
    // Per axis: (node index, weight) pairs with positive weight.
    std::vector<std::vector<std::pair<std::size_t, double>>> axis_weights(grid.dimension());
    for (std::size_t d = 0; d < grid.dimension(); ++d) {
        const GridAxis& a = grid.axes[d];
        const double h = a.spacing();
        double v = x[d];
        if (v < a.lower - snap_fraction * h || v > a.upper + snap_fraction * h) outside = true;
        v = std::clamp(v, a.lower, a.upper);
        const double t = (v - a.lower) / h;
        auto i = static_cast<std::size_t>(std::floor(t));
        double frac = t - static_cast<double>(i);
        if (i >= a.points - 1) {
            i = a.points - 1;
            frac = 0.0;
        }
        if (frac > 1.0 - snap_fraction) {
            ++i;
            frac = 0.0;
        }
        if (frac < snap_fraction) {
            axis_weights[d] = {{i, 1.0}};
        } else {
            axis_weights[d] = {{i, 1.0 - frac}, {i + 1, frac}};
        }
    }
    if (clamped != nullptr) *clamped = outside;

    std::vector<Successor> out{{0, 1.0}};
    std::size_t stride = 1;
    for (std::size_t d = 0; d < grid.dimension(); ++d) {
        std::vector<Successor> grown;
        for (const Successor& s : out)
            for (auto [i, w] : axis_weights[d]) grown.push_back({s.state + i * stride, s.weight * w});
        out = std::move(grown);
        stride *= grid.axes[d].points;
    }
    return out;
}

ExtCost interpolate_value(const GridSpec& grid, std::span<const ExtCost> values, std::span<const double> x) {
    if (values.size() != grid.num_nodes()) throw std::invalid_argument("interpolate_value: value count mismatch");
    double total = 0.0;
    for (const Successor& s : interpolation_stencil(grid, x)) {
        if (values[s.state].is_infinite()) return ExtCost::infinity();
        total += s.weight * values[s.state].value();
    }
    return ExtCost(std::max(total, 0.0));
}

StateMask LinearGridProblem::region(double r) const {
    StateMask mask(problem.num_states());
    for (StateIndex x = 0; x < mask.size(); ++x) {
        const auto pt = grid.node(x);
        double m = 0.0;
        for (double c : pt) m = std::max(m, std::abs(c));
        mask[x] = m <= r + 1e-12;
    }
    return mask;
}

double LinearGridProblem::radius() const {
    double s = 0.0;
    for (const GridAxis& a : grid.axes) {
        const double m = std::max(std::abs(a.lower), std::abs(a.upper));
        s += m * m;
    }
    return std::sqrt(s);
}

ValueFunction LinearGridProblem::sample(const std::function<double(std::span<const double>)>& f) const {
    std::vector<ExtCost> v(problem.num_states());
    for (StateIndex x = 0; x < v.size(); ++x) v[x] = ExtCost(f(grid.node(x)));
    return ValueFunction(problem, std::move(v));
}

LinearGridProblem build_linear_problem(const LinearSystemSpec& system, const GridSpec& grid) {
    system.check();
    grid.check();
    const auto n = static_cast<std::size_t>(system.A.rows());
    const auto m = static_cast<std::size_t>(system.B.cols());
    if (grid.dimension() != n) throw std::invalid_argument("build_linear_problem: grid dimension differs from A");
    if (grid.controls.front().size() != m)
        throw std::invalid_argument("build_linear_problem: control dimension differs from B");

    // The origin must be a grid node; it is the terminal state.
    StateIndex origin = 0;
    std::size_t stride = 1;
    for (const GridAxis& a : grid.axes) {
        const double t = -a.lower / a.spacing();
        const double i = std::round(t);
        if (a.lower > 0.0 || a.upper < 0.0 || std::abs(t - i) > snap_fraction)
            throw std::invalid_argument("build_linear_problem: grid too coarse to contain the origin as a node");
        origin += static_cast<std::size_t>(i) * stride;
        stride *= a.points;
    }

    LinearGridProblem out;
    out.grid = grid;
    out.system = system;
    out.origin = origin;

    const std::size_t nodes = grid.num_nodes();
    std::vector<std::string> ids(nodes);
    std::vector<std::vector<Control>> controls(nodes);
    out.clamped.assign(nodes, std::vector<bool>(grid.controls.size(), false));

    Eigen::VectorXd xv(static_cast<Eigen::Index>(n));
    Eigen::VectorXd uv(static_cast<Eigen::Index>(m));
    for (StateIndex s = 0; s < nodes; ++s) {
        ids[s] = "n" + std::to_string(s);
        const std::vector<double> x = grid.node(s);
        controls[s].reserve(grid.controls.size());
        for (std::size_t j = 0; j < grid.controls.size(); ++j) {
            Control c{"u" + std::to_string(j), {}};
            if (s == origin) {
                c.outcomes.push_back(Outcome{ExtCost::zero(), {Successor{origin, 1.0}}});
            } else {
                const std::vector<double>& u = grid.controls[j];
                for (std::size_t d = 0; d < n; ++d) xv[static_cast<Eigen::Index>(d)] = x[d];
                for (std::size_t d = 0; d < m; ++d) uv[static_cast<Eigen::Index>(d)] = u[d];
                const Eigen::VectorXd next = system.A * xv + system.B * uv;
                bool was_clamped = false;
                auto stencil = interpolation_stencil(grid, std::span<const double>(next.data(), n), &was_clamped);
                if (was_clamped) {
                    out.clamped[s][j] = true;
                    ++out.clamped_count;
                }
                c.outcomes.push_back(Outcome{ExtCost(system.cost(x, u)), std::move(stencil)});
            }
            controls[s].push_back(std::move(c));
        }
    }
    out.problem = Problem(std::move(ids), {origin}, std::move(controls));

    double x_max = 0.0;
    for (const GridAxis& a : grid.axes) {
        const double r = std::max(std::abs(a.lower), std::abs(a.upper));
        x_max += r * r;
    }
    x_max = std::sqrt(x_max);
    double u_max = 0.0;
    for (const auto& u : grid.controls) u_max = std::max(u_max, euclidean(u));
    const CostForm& g = system.cost;
    out.cost_lipschitz = g.p * (g.q * std::pow(x_max, g.p - 1.0) + g.r * std::pow(u_max, g.p - 1.0));
    out.grid_tolerance = 10.0 * out.cost_lipschitz * grid.max_spacing();
    return out;
}

Eigen::MatrixXd riccati_oracle(const LinearSystemSpec& system, double tol, std::size_t max_iters) {
    system.check();
    const CostForm& g = system.cost;
    if (g.p != 2.0) throw PreconditionError("riccati_oracle: requires quadratic cost (p = 2)");
    if (!(g.q > 0.0))
        throw PreconditionError(
            "riccati_oracle: requires q > 0; with q = 0 the Riccati equation can have several nonnegative solutions");
    if (!(g.r > 0.0)) throw PreconditionError("riccati_oracle: requires r > 0");

    const Eigen::Index n = system.A.rows();
    const Eigen::Index m = system.B.cols();
    const Eigen::MatrixXd Q = g.q * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd R = g.r * Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd& A = system.A;
    const Eigen::MatrixXd& B = system.B;

    Eigen::MatrixXd K = Q;
    for (std::size_t it = 0; it < max_iters; ++it) {
        const Eigen::MatrixXd S = R + B.transpose() * K * B;
        const Eigen::MatrixXd KA = K * A;
        const Eigen::MatrixXd gain = S.ldlt().solve(B.transpose() * KA);
        Eigen::MatrixXd next = Q + A.transpose() * KA - KA.transpose() * B * gain;
        next = 0.5 * (next + next.transpose());
        if (!next.allFinite()) throw PreconditionError("riccati_oracle: iteration diverged");
        const double change = (next - K).cwiseAbs().maxCoeff();
        K = std::move(next);
        if (change <= tol) return K;
    }
    throw PreconditionError("riccati_oracle: no convergence within " + std::to_string(max_iters) + " iterations");
}

}  // namespace termdp
