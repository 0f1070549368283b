#include "termdp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace termdp {

Problem::Problem(std::vector<std::string> state_ids, std::vector<StateIndex> terminal,
                 std::vector<std::vector<Control>> controls, std::vector<std::string> disturbance_ids)
    : state_ids_(std::move(state_ids)),
      terminal_(std::move(terminal)),
      controls_(std::move(controls)),
      disturbance_ids_(std::move(disturbance_ids)) {
    const std::size_t n = state_ids_.size();
    if (controls_.size() != n)
        throw std::invalid_argument("Problem: control table has " + std::to_string(controls_.size()) +
                                    " rows for " + std::to_string(n) + " states");
    for (StateIndex x = 0; x < n; ++x) {
        if (!index_.emplace(state_ids_[x], x).second)
            throw std::invalid_argument("Problem: duplicate state id '" + state_ids_[x] + "'");
    }
    terminal_mask_.assign(n, false);
    std::sort(terminal_.begin(), terminal_.end());
    terminal_.erase(std::unique(terminal_.begin(), terminal_.end()), terminal_.end());
    for (StateIndex t : terminal_) {
        if (t >= n) throw std::invalid_argument("Problem: terminal index out of range");
        terminal_mask_[t] = true;
    }
    const std::size_t nw = num_disturbances();
    for (StateIndex x = 0; x < n; ++x) {
        for (const Control& c : controls_[x]) {
            if (c.outcomes.size() != nw)
                throw std::invalid_argument("Problem: control '" + c.id + "' at state '" + state_ids_[x] +
                                            "' has " + std::to_string(c.outcomes.size()) + " outcomes, expected " +
                                            std::to_string(nw));
            for (const Outcome& o : c.outcomes) {
                if (o.successors.empty())
                    throw std::invalid_argument("Problem: control '" + c.id + "' at state '" + state_ids_[x] +
                                                "' has no successor");
                for (const Successor& s : o.successors) {
                    if (s.state >= n) throw std::invalid_argument("Problem: successor index out of range");
                }
                if (o.successors.size() != 1) is_graph_ = false;
            }
        }
    }
}

std::optional<StateIndex> Problem::find_state(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

StateIndex Problem::next(StateIndex x, ControlIndex u, DisturbanceIndex w) const {
    const Outcome& o = outcome(x, u, w);
    if (o.successors.size() != 1) throw std::logic_error("Problem::next on an interpolated transition");
    return o.successors.front().state;
}

ProblemBuilder::ProblemBuilder(std::vector<std::string> disturbance_ids) : disturbances_(std::move(disturbance_ids)) {}

StateIndex ProblemBuilder::add_state(std::string id, bool terminal) {
    if (std::find(ids_.begin(), ids_.end(), id) != ids_.end())
        throw std::invalid_argument("ProblemBuilder: duplicate state '" + id + "'");
    ids_.push_back(std::move(id));
    controls_.emplace_back();
    if (terminal) terminal_.push_back(ids_.size() - 1);
    return ids_.size() - 1;
}

StateIndex ProblemBuilder::lookup(std::string_view id) const {
    auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) throw std::invalid_argument("ProblemBuilder: unknown state '" + std::string(id) + "'");
    return static_cast<StateIndex>(it - ids_.begin());
}

ProblemBuilder& ProblemBuilder::add_control(std::string_view state, std::string id, std::string_view next,
                                            ExtCost cost) {
    const StateIndex x = lookup(state);
    const StateIndex y = lookup(next);
    const std::size_t nw = disturbances_.empty() ? 1 : disturbances_.size();
    Control c{std::move(id), std::vector<Outcome>(nw, Outcome{cost, {Successor{y, 1.0}}})};
    controls_[x].push_back(std::move(c));
    return *this;
}

ProblemBuilder& ProblemBuilder::add_minimax_control(std::string_view state, std::string id,
                                                    const std::vector<std::pair<std::string, ExtCost>>& outcomes) {
    const StateIndex x = lookup(state);
    Control c{std::move(id), {}};
    for (const auto& [next, cost] : outcomes) c.outcomes.push_back(Outcome{cost, {Successor{lookup(next), 1.0}}});
    controls_[x].push_back(std::move(c));
    return *this;
}

Problem ProblemBuilder::build() const { return Problem(ids_, terminal_, controls_, disturbances_); }

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::terminal_not_cost_free: return "terminal_not_cost_free";
        case ViolationKind::terminal_not_absorbing: return "terminal_not_absorbing";
        case ViolationKind::empty_control_set: return "empty_control_set";
        case ViolationKind::negative_cost: return "negative_cost";
        case ViolationKind::bad_interpolation_weights: return "bad_interpolation_weights";
    }
    return "unknown";
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    for (const Violation& v : violations) os << to_string(v.kind) << ": " << v.message << '\n';
    return os.str();
}

ValidationError::ValidationError(ValidationReport report)
    : Error("problem validation failed:\n" + report.to_text()), report_(std::move(report)) {}

ValidationReport validate(const Problem& p) {
    ValidationReport report;
    for (StateIndex x = 0; x < p.num_states(); ++x) {
        const auto controls = p.controls(x);
        if (controls.empty()) {
            report.violations.push_back(
                {ViolationKind::empty_control_set, x, std::nullopt, "state '" + p.state_id(x) + "' has no controls"});
            continue;
        }
        for (ControlIndex u = 0; u < controls.size(); ++u) {
            for (DisturbanceIndex w = 0; w < p.num_disturbances(); ++w) {
                const Outcome& o = controls[u].outcomes[w];
                std::string where = "state '" + p.state_id(x) + "', control '" + controls[u].id + "'";
                if (p.has_disturbances()) where += ", disturbance '" + p.disturbance_ids()[w] + "'";

                double total = 0.0;
                bool bad_weight = false;
                for (const Successor& s : o.successors) {
                    if (!(s.weight > 0.0) || !std::isfinite(s.weight)) bad_weight = true;
                    total += s.weight;
                }
                if (bad_weight || std::abs(total - 1.0) > 1e-12)
                    report.violations.push_back({ViolationKind::bad_interpolation_weights, x, u,
                                                 where + ": successor weights must be positive and sum to 1"});

                if (!p.is_terminal(x)) continue;
                if (!o.cost.is_zero())
                    report.violations.push_back({ViolationKind::terminal_not_cost_free, x, u,
                                                 where + ": terminal state has cost " + to_string(o.cost)});
                if (o.successors.size() != 1 || o.successors.front().state != x)
                    report.violations.push_back({ViolationKind::terminal_not_absorbing, x, u,
                                                 where + ": terminal state does not map to itself"});
            }
        }
    }
    return report;
}

void require_valid(const Problem& p) {
    ValidationReport report = validate(p);
    if (!report.ok()) throw ValidationError(std::move(report));
}

namespace {

bool vanishes_on_terminal(std::span<const ExtCost> values, const Problem& p) {
    return std::all_of(p.terminal_states().begin(), p.terminal_states().end(),
                       [&](StateIndex t) { return values[t].is_zero(); });
}

}  // namespace

ValueFunction::ValueFunction(const Problem& p, std::vector<ExtCost> values) : values_(std::move(values)) {
    if (values_.size() != p.num_states())
        throw std::invalid_argument("ValueFunction: " + std::to_string(values_.size()) + " values for " +
                                    std::to_string(p.num_states()) + " states");
    in_j_class_ = vanishes_on_terminal(values_, p);
}

ValueFunction ValueFunction::zero(const Problem& p) { return ValueFunction(p, std::vector<ExtCost>(p.num_states())); }

ValueFunction ValueFunction::infinite_outside(const Problem& p) {
    std::vector<ExtCost> v(p.num_states(), ExtCost::infinity());
    for (StateIndex t : p.terminal_states()) v[t] = ExtCost::zero();
    return ValueFunction(p, std::move(v));
}

ValueFunction ValueFunction::constant(const Problem& p, ExtCost c) {
    return ValueFunction(p, std::vector<ExtCost>(p.num_states(), c));
}

std::size_t ValueFunction::count_infinite() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](ExtCost c) { return c.is_infinite(); }));
}

bool membership_in_J(const ValueFunction& J, const Problem& p) {
    if (J.size() != p.num_states())
        throw std::invalid_argument("membership_in_J: value function has " + std::to_string(J.size()) +
                                    " entries, problem has " + std::to_string(p.num_states()) + " states");
    return vanishes_on_terminal(J.values(), p);
}

bool dominates(const ValueFunction& upper, const ValueFunction& lower) {
    if (upper.size() != lower.size()) throw std::invalid_argument("dominates: size mismatch");
    for (StateIndex x = 0; x < upper.size(); ++x)
        if (upper[x] < lower[x]) return false;
    return true;
}

std::string_view to_string(TieBreak t) { return t == TieBreak::keep_current ? "keep_current" : "least_index"; }

Policy::Policy(const Problem& p, std::vector<ControlIndex> choice) : choice_(std::move(choice)) {
    if (choice_.size() != p.num_states())
        throw std::invalid_argument("Policy: " + std::to_string(choice_.size()) + " choices for " +
                                    std::to_string(p.num_states()) + " states");
    for (StateIndex x = 0; x < choice_.size(); ++x) {
        if (choice_[x] >= p.num_controls(x))
            throw std::invalid_argument("Policy: control " + std::to_string(choice_[x]) + " not admissible at state '" +
                                        p.state_id(x) + "'");
    }
}

Policy Policy::first_control(const Problem& p) { return Policy(p, std::vector<ControlIndex>(p.num_states(), 0)); }

}  // namespace termdp
