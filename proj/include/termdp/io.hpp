#pragma once

#include "termdp/grid.hpp"
#include "termdp/problem.hpp"
#include "termdp/value_iteration.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace termdp {

/// A parsed problem document. `grid` is set for kind = "linear_grid", in
/// which case `problem` is grid->problem.
struct ProblemDocument {
    std::string kind;
    Problem problem;
    std::optional<LinearGridProblem> grid;
};

/// Parses a JSON problem document. Syntax and schema errors throw ParseError
/// naming the line/column or the JSON path; semantic problems (negative
/// costs, a terminal set that is not cost-free and absorbing) throw
/// ValidationError with the JSON path in each message.
ProblemDocument parse_problem_text(std::string_view text);
ProblemDocument parse_problem_file(const std::filesystem::path& path);

/// Finite documents for any problem; interpolated successors are written as
/// lists of {state, weight}.
std::string emit_problem_json(const Problem& p);
/// linear_grid document reproducing build_linear_problem(system, grid).
std::string emit_linear_grid_json(const LinearGridProblem& g);

/// `state,value` with "inf" for infinity.
std::string emit_value_csv(const Problem& p, const ValueFunction& J);
ValueFunction parse_value_csv(const Problem& p, std::string_view text);

/// `state,control` by id.
std::string emit_policy_csv(const Problem& p, const Policy& mu);
Policy parse_policy_csv(const Problem& p, std::string_view text);

/// Header `iter,sup_change,residual,num_infinite` plus `state_<id>` columns
/// when the rows carry value snapshots. 17 significant digits.
std::string emit_trace_csv(const SolveTrace& trace);
SolveTrace parse_trace_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace termdp
