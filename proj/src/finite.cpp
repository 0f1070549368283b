#include "termdp/finite.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

namespace termdp {

namespace {

void require_deterministic(const Problem& p, const char* op) {
    if (!p.is_deterministic())
        throw PreconditionError(std::string(op) + ": requires a deterministic graph problem");
}

// Trajectory-following evaluation; assumes p valid and mu admissible.
std::vector<ExtCost> evaluate_unchecked(const Problem& p, std::span<const ControlIndex> mu) {
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    const std::size_t n = p.num_states();
    std::vector<ExtCost> value(n);
    std::vector<bool> done(n, false);
    std::vector<std::size_t> pos(n, npos);
    std::vector<StateIndex> path;

    for (StateIndex start = 0; start < n; ++start) {
        if (done[start]) continue;
        path.clear();
        StateIndex x = start;
        while (true) {
            if (done[x]) break;
            if (p.is_terminal(x)) {
                value[x] = ExtCost::zero();
                done[x] = true;
                break;
            }
            if (pos[x] != npos) {
                // Closed a cycle: path[entry..] are its states.
                const std::size_t entry = pos[x];
                ExtCost total;
                for (std::size_t i = entry; i < path.size(); ++i) total += p.cost(path[i], mu[path[i]]);
                const ExtCost on_cycle = total.is_zero() ? ExtCost::zero() : ExtCost::infinity();
                for (std::size_t i = entry; i < path.size(); ++i) {
                    value[path[i]] = on_cycle;
                    done[path[i]] = true;
                    pos[path[i]] = npos;
                }
                path.resize(entry);
                break;
            }
            pos[x] = path.size();
            path.push_back(x);
            x = p.next(x, mu[x]);
        }
        // Back-fill the states that lead into x.
        for (std::size_t i = path.size(); i-- > 0;) {
            const StateIndex s = path[i];
            if (done[s]) continue;
            value[s] = p.cost(s, mu[s]) + value[p.next(s, mu[s])];
            done[s] = true;
            pos[s] = npos;
        }
    }
    return value;
}

struct ZeroArcGraph {
    std::vector<std::vector<StateIndex>> out;
};

ZeroArcGraph zero_arc_graph(const Problem& p) {
    ZeroArcGraph g;
    g.out.resize(p.num_states());
    for (StateIndex x = 0; x < p.num_states(); ++x) {
        if (p.is_terminal(x)) continue;
        auto& out = g.out[x];
        for (ControlIndex u = 0; u < p.num_controls(x); ++u) {
            for (DisturbanceIndex w = 0; w < p.num_disturbances(); ++w) {
                if (!p.cost(x, u, w).is_zero()) continue;
                const StateIndex y = p.next(x, u, w);
                if (!p.is_terminal(y)) out.push_back(y);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return g;
}

// Iterative Tarjan; returns component id per state.
std::vector<std::size_t> strongly_connected_components(const std::vector<std::vector<StateIndex>>& out,
                                                       std::size_t& count) {
    constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
    const std::size_t n = out.size();
    std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
    std::vector<bool> on_stack(n, false);
    std::vector<StateIndex> stack;
    std::vector<std::pair<StateIndex, std::size_t>> call;  // (state, next edge)
    std::size_t counter = 0;
    count = 0;

    for (StateIndex root = 0; root < n; ++root) {
        if (index[root] != unset) continue;
        call.emplace_back(root, 0);
        while (!call.empty()) {
            auto& [v, edge] = call.back();
            if (edge == 0 && index[v] == unset) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (edge < out[v].size()) {
                const StateIndex w = out[v][edge++];
                if (index[w] == unset) {
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                StateIndex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            const StateIndex finished = v;
            call.pop_back();
            if (!call.empty()) {
                const StateIndex parent = call.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }
    return comp;
}

std::vector<ExtCost> shortest_to_terminal(const Problem& p) {
    const std::size_t n = p.num_states();
    std::vector<std::vector<std::pair<StateIndex, ExtCost>>> incoming(n);
    for (StateIndex x = 0; x < n; ++x) {
        if (p.is_terminal(x)) continue;
        for (ControlIndex u = 0; u < p.num_controls(x); ++u) {
            const ExtCost c = p.cost(x, u);
            if (c.is_finite()) incoming[p.next(x, u)].emplace_back(x, c);
        }
    }
    std::vector<ExtCost> dist(n, ExtCost::infinity());
    using Entry = std::pair<ExtCost, StateIndex>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (StateIndex t : p.terminal_states()) {
        dist[t] = ExtCost::zero();
        queue.emplace(ExtCost::zero(), t);
    }
    while (!queue.empty()) {
        auto [d, y] = queue.top();
        queue.pop();
        if (d > dist[y]) continue;
        for (auto [x, c] : incoming[y]) {
            const ExtCost candidate = c + d;
            if (candidate < dist[x]) {
                dist[x] = candidate;
                queue.emplace(candidate, x);
            }
        }
    }
    return dist;
}

}  // namespace

ValueFunction evaluate_policy(const Problem& p, const Policy& mu) {
    require_deterministic(p, "evaluate_policy");
    require_valid(p);
    if (mu.size() != p.num_states()) throw std::invalid_argument("evaluate_policy: policy size mismatch");
    for (StateIndex x = 0; x < p.num_states(); ++x)
        if (mu[x] >= p.num_controls(x)) throw std::invalid_argument("evaluate_policy: inadmissible policy");
    return ValueFunction(p, evaluate_unchecked(p, mu.choices()));
}

CycleReport positive_cycle_check(const Problem& p) {
    if (!p.is_graph()) throw PreconditionError("positive_cycle_check: requires a graph problem");
    const ZeroArcGraph g = zero_arc_graph(p);
    std::size_t ncomp = 0;
    const std::vector<std::size_t> comp = strongly_connected_components(g.out, ncomp);

    std::vector<std::vector<StateIndex>> members(ncomp);
    for (StateIndex x = 0; x < p.num_states(); ++x) members[comp[x]].push_back(x);

    CycleReport report;
    report.on_zero_cost_cycle.assign(p.num_states(), false);
    for (const auto& scc : members) {
        const StateIndex root = scc.front();
        const bool self_loop = std::binary_search(g.out[root].begin(), g.out[root].end(), root);
        if (scc.size() == 1 && !self_loop) continue;
        for (StateIndex x : scc) report.on_zero_cost_cycle[x] = true;
        if (self_loop) {
            report.zero_cost_cycles.push_back({root});
            continue;
        }
        // Breadth-first search inside the component for a path back to root.
        std::vector<StateIndex> parent(p.num_states(), root);
        std::vector<bool> seen(p.num_states(), false);
        std::queue<StateIndex> frontier;
        frontier.push(root);
        seen[root] = true;
        StateIndex closing = root;
        bool found = false;
        while (!frontier.empty() && !found) {
            const StateIndex v = frontier.front();
            frontier.pop();
            for (StateIndex w : g.out[v]) {
                if (comp[w] != comp[root]) continue;
                if (w == root) {
                    closing = v;
                    found = true;
                    break;
                }
                if (!seen[w]) {
                    seen[w] = true;
                    parent[w] = v;
                    frontier.push(w);
                }
            }
        }
        std::vector<StateIndex> cycle;
        for (StateIndex v = closing; v != root; v = parent[v]) cycle.push_back(v);
        cycle.push_back(root);
        std::reverse(cycle.begin(), cycle.end());
        report.zero_cost_cycles.push_back(std::move(cycle));
    }
    report.has_positive_cycles_only = report.zero_cost_cycles.empty();
    return report;
}

ReachabilityReport terminating_reachability(const Problem& p) {
    require_deterministic(p, "terminating_reachability");
    const std::size_t n = p.num_states();
    std::vector<std::vector<StateIndex>> incoming(n);
    for (StateIndex x = 0; x < n; ++x)
        for (ControlIndex u = 0; u < p.num_controls(x); ++u)
            if (p.cost(x, u).is_finite()) incoming[p.next(x, u)].push_back(x);

    ReachabilityReport report;
    report.can_terminate.assign(n, false);
    std::queue<StateIndex> frontier;
    for (StateIndex t : p.terminal_states()) {
        report.can_terminate[t] = true;
        frontier.push(t);
    }
    while (!frontier.empty()) {
        const StateIndex y = frontier.front();
        frontier.pop();
        for (StateIndex x : incoming[y]) {
            if (report.can_terminate[x]) continue;
            report.can_terminate[x] = true;
            frontier.push(x);
        }
    }
    for (StateIndex x = 0; x < n; ++x)
        if (!report.can_terminate[x]) report.cannot_terminate.push_back(x);
    return report;
}

ValueFunction terminating_distance(const Problem& p) {
    require_deterministic(p, "terminating_distance");
    require_valid(p);
    return ValueFunction(p, shortest_to_terminal(p));
}

ValueFunction oracle_dijkstra(const Problem& p) {
    require_deterministic(p, "oracle_dijkstra");
    require_valid(p);
    const CycleReport cycles = positive_cycle_check(p);
    if (!cycles.has_positive_cycles_only)
        throw PreconditionError("oracle_dijkstra: problem has " + std::to_string(cycles.zero_cost_cycles.size()) +
                                " zero-cost cycle(s); shortest distance need not equal the optimal cost");
    return ValueFunction(p, shortest_to_terminal(p));
}

std::uint64_t count_policies(const Problem& p) {
    std::uint64_t total = 1;
    for (StateIndex x = 0; x < p.num_states(); ++x) {
        if (p.is_terminal(x)) continue;
        const std::uint64_t k = p.num_controls(x);
        if (k == 0) return 0;
        if (total > std::numeric_limits<std::uint64_t>::max() / k) return std::numeric_limits<std::uint64_t>::max();
        total *= k;
    }
    return total;
}

ValueFunction oracle_policy_enum(const Problem& p, std::uint64_t budget) {
    require_deterministic(p, "oracle_policy_enum");
    require_valid(p);
    const std::uint64_t total = count_policies(p);
    if (total > budget)
        throw PreconditionError("oracle_policy_enum: " + std::to_string(total) +
                                " stationary policies exceed the enumeration budget of " + std::to_string(budget));

    std::vector<StateIndex> free_states;
    for (StateIndex x = 0; x < p.num_states(); ++x)
        if (!p.is_terminal(x)) free_states.push_back(x);

    std::vector<ControlIndex> mu(p.num_states(), 0);
    std::vector<ExtCost> best(p.num_states(), ExtCost::infinity());
    while (true) {
        const std::vector<ExtCost> value = evaluate_unchecked(p, mu);
        for (StateIndex x = 0; x < best.size(); ++x) best[x] = std::min(best[x], value[x]);

        // Odometer step over the non-terminal choices.
        std::size_t i = 0;
        for (; i < free_states.size(); ++i) {
            const StateIndex x = free_states[i];
            if (++mu[x] < p.num_controls(x)) break;
            mu[x] = 0;
        }
        if (i == free_states.size()) break;
    }
    return ValueFunction(p, std::move(best));
}

}  // namespace termdp
