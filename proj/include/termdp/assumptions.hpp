#pragma once

#include "termdp/grid.hpp"
#include "termdp/problem.hpp"

#include <string>
#include <vector>

namespace termdp {

enum class PositivityStatus { verified_on_samples, violated, not_applicable };
enum class Controllability { not_checked, user_asserted, spot_checked_ok, spot_check_failed };
enum class Verdict { assumption1_established, assumption1_violated_with_witness, inconclusive };

std::string_view to_string(PositivityStatus s);
std::string_view to_string(Controllability c);
std::string_view to_string(Verdict v);

struct AssumptionConfig {
    /// Distances probed for strict positivity, as fractions of the grid radius.
    std::vector<double> delta_fractions{0.5, 0.25, 0.1};
    /// Local controllability: from every node within local_delta_fraction *
    /// radius of the origin, a greedy control sequence must reach the origin
    /// within step_budget steps at total cost at most local_epsilon.
    double local_epsilon = 0.1;
    double local_delta_fraction = 0.1;
    std::size_t step_budget = 50;
    /// Accept local controllability on the user's word instead of checking.
    bool assert_local_controllability = false;
    double tol = 1e-9;
    std::size_t max_iters = 100'000;
};

struct PositivityProbe {
    double delta = 0.0;
    /// min over nodes at distance >= delta of min_u g(x, u).
    double epsilon = 0.0;
    std::vector<StateIndex> violated_at;
};

struct AssumptionWitness {
    StateIndex state = 0;
    ExtCost optimal;      ///< J*(state)
    ExtCost terminating;  ///< best cost over terminating control sequences
    std::vector<StateIndex> cycle;
    std::string description;
};

struct AssumptionReport {
    bool terminal_valid = false;
    ValidationReport validation;

    bool finite_case = true;
    bool positive_cycles_only = false;
    std::vector<std::vector<StateIndex>> zero_cost_cycles;
    bool all_states_can_terminate = false;
    std::vector<StateIndex> cannot_terminate;

    PositivityStatus strict_positivity = PositivityStatus::not_applicable;
    std::vector<PositivityProbe> positivity_probes;
    Controllability local_controllability = Controllability::not_checked;
    std::vector<StateIndex> controllability_failures;

    std::string compactness_note;
    Verdict verdict = Verdict::inconclusive;
    std::vector<AssumptionWitness> witnesses;
    std::vector<std::string> reasons;
};

/// Finite case. Deterministic problems: zero-cost cycles, terminating
/// reachability, and a comparison of the optimal cost with the best
/// terminating cost at every state. Minimax problems use guaranteed
/// reachability in place of plain reachability.
AssumptionReport check_assumption1(const Problem& p, const AssumptionConfig& config = {});

/// Grid case: strict positivity of min_u g away from the origin, a bounded
/// greedy search for cheap termination near the origin, and a check that the
/// optimal cost is positive outside the origin.
AssumptionReport check_assumption1(const LinearGridProblem& grid, const AssumptionConfig& config = {});

/// Indented text rendering.
std::string format_report(const AssumptionReport& report, const Problem& p);

}  // namespace termdp
