#pragma once

#include "termdp/errors.hpp"
#include "termdp/ext_cost.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace termdp {

using StateIndex = std::size_t;
using ControlIndex = std::size_t;
using DisturbanceIndex = std::size_t;

/// Membership mask over the states of a problem.
using StateMask = std::vector<bool>;

/// One successor of a transition. Graph problems have a single successor of
/// weight 1; discretized problems spread the successor over the corners of
/// the enclosing grid cell.
struct Successor {
    StateIndex state = 0;
    double weight = 1.0;

    friend bool operator==(const Successor&, const Successor&) = default;
};

/// Cost and successor of a (state, control, disturbance) triple.
struct Outcome {
    ExtCost cost;
    std::vector<Successor> successors;

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// An admissible control, with one outcome per disturbance.
struct Control {
    std::string id;
    std::vector<Outcome> outcomes;

    friend bool operator==(const Control&, const Control&) = default;
};

/// A control problem to a terminal set: finitely many states, finite control
/// sets, and an optional finite disturbance set chosen by an adversary.
///
/// The constructor checks only structure (indices in range, one outcome per
/// disturbance, unique ids). Semantic conditions, such as the terminal set
/// being cost-free and absorbing, are checked by validate() so that every
/// violation can be reported at once.
class Problem {
public:
    Problem() = default;
    Problem(std::vector<std::string> state_ids, std::vector<StateIndex> terminal,
            std::vector<std::vector<Control>> controls, std::vector<std::string> disturbance_ids = {});

    std::size_t num_states() const noexcept { return state_ids_.size(); }
    const std::string& state_id(StateIndex x) const { return state_ids_.at(x); }
    std::span<const std::string> state_ids() const noexcept { return state_ids_; }
    std::optional<StateIndex> find_state(std::string_view id) const;

    bool is_terminal(StateIndex x) const { return terminal_mask_.at(x); }
    std::span<const StateIndex> terminal_states() const noexcept { return terminal_; }
    const StateMask& terminal_mask() const noexcept { return terminal_mask_; }

    std::span<const Control> controls(StateIndex x) const { return controls_.at(x); }
    std::size_t num_controls(StateIndex x) const { return controls_.at(x).size(); }

    /// Number of disturbance values; 1 for problems without an adversary.
    std::size_t num_disturbances() const noexcept {
        return disturbance_ids_.empty() ? 1 : disturbance_ids_.size();
    }
    bool has_disturbances() const noexcept { return !disturbance_ids_.empty(); }
    std::span<const std::string> disturbance_ids() const noexcept { return disturbance_ids_; }

    const Outcome& outcome(StateIndex x, ControlIndex u, DisturbanceIndex w = 0) const {
        return controls_.at(x).at(u).outcomes.at(w);
    }
    ExtCost cost(StateIndex x, ControlIndex u, DisturbanceIndex w = 0) const { return outcome(x, u, w).cost; }

    /// Successor of a graph transition. Throws std::logic_error when the
    /// transition is interpolated over several states.
    StateIndex next(StateIndex x, ControlIndex u, DisturbanceIndex w = 0) const;

    /// Every transition has exactly one successor.
    bool is_graph() const noexcept { return is_graph_; }
    /// Graph problem with a single disturbance value.
    bool is_deterministic() const noexcept { return is_graph_ && num_disturbances() == 1; }

    friend bool operator==(const Problem&, const Problem&) = default;

private:
    std::vector<std::string> state_ids_;
    std::vector<StateIndex> terminal_;
    StateMask terminal_mask_;
    std::vector<std::vector<Control>> controls_;
    std::vector<std::string> disturbance_ids_;
    std::unordered_map<std::string, StateIndex> index_;
    bool is_graph_ = true;
};

/// Incremental construction of graph problems by state id.
class ProblemBuilder {
public:
    explicit ProblemBuilder(std::vector<std::string> disturbance_ids = {});

    StateIndex add_state(std::string id, bool terminal = false);
    /// Deterministic control (same outcome under every disturbance).
    ProblemBuilder& add_control(std::string_view state, std::string id, std::string_view next, ExtCost cost);
    /// One (next, cost) pair per disturbance, in disturbance order.
    ProblemBuilder& add_minimax_control(std::string_view state, std::string id,
                                        const std::vector<std::pair<std::string, ExtCost>>& outcomes);

    Problem build() const;

private:
    StateIndex lookup(std::string_view id) const;

    std::vector<std::string> ids_;
    std::vector<StateIndex> terminal_;
    std::vector<std::vector<Control>> controls_;
    std::vector<std::string> disturbances_;
};

enum class ViolationKind {
    terminal_not_cost_free,
    terminal_not_absorbing,
    empty_control_set,
    negative_cost,
    bad_interpolation_weights,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::optional<StateIndex> state;
    std::optional<ControlIndex> control;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    std::string to_text() const;
};

class ValidationError : public Error {
public:
    explicit ValidationError(ValidationReport report);
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

/// Lists every breach of the cost-free absorbing terminal condition, every
/// empty control set and every malformed interpolation stencil.
ValidationReport validate(const Problem& p);

/// Throws ValidationError when validate(p) is not empty.
void require_valid(const Problem& p);

/// A map from states to [0, inf], tagged with whether it vanishes on the
/// terminal set of the problem it was built for.
class ValueFunction {
public:
    ValueFunction() = default;
    /// Throws std::invalid_argument when the size does not match p.
    ValueFunction(const Problem& p, std::vector<ExtCost> values);

    static ValueFunction zero(const Problem& p);
    /// 0 on the terminal set, inf elsewhere.
    static ValueFunction infinite_outside(const Problem& p);
    static ValueFunction constant(const Problem& p, ExtCost c);

    std::size_t size() const noexcept { return values_.size(); }
    ExtCost operator[](StateIndex x) const { return values_[x]; }
    ExtCost at(StateIndex x) const { return values_.at(x); }
    std::span<const ExtCost> values() const noexcept { return values_; }
    bool in_j_class() const noexcept { return in_j_class_; }
    std::size_t count_infinite() const noexcept;

    friend bool operator==(const ValueFunction&, const ValueFunction&) = default;

private:
    std::vector<ExtCost> values_;
    bool in_j_class_ = false;
};

/// True iff J vanishes on the terminal set. Throws std::invalid_argument on
/// a domain mismatch.
bool membership_in_J(const ValueFunction& J, const Problem& p);

/// Pointwise comparison helpers.
bool dominates(const ValueFunction& upper, const ValueFunction& lower);

enum class TieBreak { keep_current, least_index };

std::string_view to_string(TieBreak t);

/// A stationary policy. Construction checks admissibility.
class Policy {
public:
    Policy() = default;
    Policy(const Problem& p, std::vector<ControlIndex> choice);

    /// Control 0 at every state.
    static Policy first_control(const Problem& p);

    std::size_t size() const noexcept { return choice_.size(); }
    ControlIndex operator[](StateIndex x) const { return choice_[x]; }
    std::span<const ControlIndex> choices() const noexcept { return choice_; }

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    std::vector<ControlIndex> choice_;
};

}  // namespace termdp
