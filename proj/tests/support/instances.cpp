#include "instances.hpp"

namespace termdp::testing {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

Problem random_instance(std::mt19937_64& rng, const InstanceShape& shape) {
    const std::size_t n = pick(rng, shape.min_states, shape.max_states);
    std::uniform_real_distribution<double> cost(shape.min_cost, shape.max_cost);

    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    std::vector<std::vector<Control>> controls(n);
    controls[0].push_back(Control{"a0", {Outcome{ExtCost::zero(), {{0, 1.0}}}}});

    for (StateIndex x = 1; x < n; ++x) {
        const std::size_t k = pick(rng, 1, shape.max_actions);
        for (std::size_t u = 0; u < k; ++u) {
            StateIndex next = pick(rng, 0, n - 1);
            ExtCost g(cost(rng));
            if (u == 0 && shape.reachable) {
                next = pick(rng, 0, x - 1);
            } else if (u > 0) {
                if (coin(rng, shape.zero_cost_probability))
                    g = ExtCost::zero();
                else if (coin(rng, shape.infinite_cost_probability))
                    g = ExtCost::infinity();
            }
            controls[x].push_back(Control{"a" + std::to_string(u), {Outcome{g, {{next, 1.0}}}}});
        }
        if (coin(rng, shape.zero_loop_probability)) {
            const std::string id = "a" + std::to_string(controls[x].size());
            controls[x].push_back(Control{id, {Outcome{ExtCost::zero(), {{x, 1.0}}}}});
        }
    }
    return Problem(std::move(ids), {0}, std::move(controls));
}

Problem random_minimax_instance(std::mt19937_64& rng, std::size_t max_states, std::size_t max_actions,
                                std::size_t disturbances) {
    const std::size_t n = pick(rng, 2, max_states);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    std::vector<std::string> ws;
    for (std::size_t w = 0; w < disturbances; ++w) ws.push_back("w" + std::to_string(w));

    std::vector<std::vector<Control>> controls(n);
    controls[0].push_back(Control{"a0", std::vector<Outcome>(disturbances, Outcome{ExtCost::zero(), {{0, 1.0}}})});
    for (StateIndex x = 1; x < n; ++x) {
        const std::size_t k = pick(rng, 1, max_actions);
        for (std::size_t u = 0; u < k; ++u) {
            Control c{"a" + std::to_string(u), {}};
            for (std::size_t w = 0; w < disturbances; ++w)
                c.outcomes.push_back(Outcome{ExtCost(1.0), {{pick(rng, 0, n - 1), 1.0}}});
            controls[x].push_back(std::move(c));
        }
    }
    return Problem(std::move(ids), {0}, std::move(controls), std::move(ws));
}

}  // namespace termdp::testing
