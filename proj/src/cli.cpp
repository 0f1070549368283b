#include "termdp/cli.hpp"

#include "termdp/assumptions.hpp"
#include "termdp/finite.hpp"
#include "termdp/fixtures.hpp"
#include "termdp/io.hpp"
#include "termdp/minimax.hpp"
#include "termdp/policy_iteration.hpp"
#include "termdp/value_iteration.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iomanip>

namespace termdp {

namespace {

struct SolveArgs {
    std::string problem;
    std::string algo = "vi";
    std::string init;
    double tol = 1e-9;
    std::size_t max_iters = 10'000;
    std::string tie;
    std::vector<std::size_t> m{1};
    std::string trace;
    std::string out;
    std::string policy_out;
};

struct AnalyzeArgs {
    std::string mode;
    std::string problem;
    std::string value;
    double tol = 1e-9;
};

struct CheckArgs {
    std::string what;
    std::string problem;
    bool assert_local = false;
};

struct FixtureArgs {
    std::string name;
};

class UsageError : public Error {
public:
    using Error::Error;
};

ValueFunction initial_value(const Problem& p, const std::string& init) {
    if (init == "zero") return ValueFunction::zero(p);
    if (init == "inf-outside") return ValueFunction::infinite_outside(p);
    if (init.rfind("value:", 0) == 0) return parse_value_csv(p, read_text_file(init.substr(6)));
    if (init.rfind("policy:", 0) == 0) {
        if (!p.is_deterministic()) throw UsageError("--init policy: needs a deterministic graph problem");
        return evaluate_policy(p, parse_policy_csv(p, read_text_file(init.substr(7))));
    }
    throw UsageError("--init must be zero, inf-outside, policy:<file> or value:<file>");
}

TieBreak parse_tie(const std::string& s, TieBreak fallback) {
    if (s.empty()) return fallback;
    if (s == "keep") return TieBreak::keep_current;
    if (s == "least") return TieBreak::least_index;
    throw UsageError("--tie must be keep or least");
}

void emit_result(const Problem& p, const ValueFunction& J, const Policy& mu, const SolveArgs& a, std::ostream& out) {
    if (a.out.empty())
        out << emit_value_csv(p, J);
    else
        write_text_file(a.out, emit_value_csv(p, J));
    if (!a.policy_out.empty()) write_text_file(a.policy_out, emit_policy_csv(p, mu));
}

int solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const ProblemDocument doc = parse_problem_file(a.problem);
    const Problem& p = doc.problem;

    if (a.algo == "vi" || a.algo == "mm-vi") {
        if (a.algo == "vi" && p.has_disturbances()) throw UsageError("problem has disturbances; use --algo mm-vi");
        ViOptions opts;
        opts.tol = a.tol;
        opts.max_iters = a.max_iters;
        opts.tie = parse_tie(a.tie, TieBreak::least_index);
        opts.record_values = !a.trace.empty();
        const ViResult r = run_vi(p, initial_value(p, a.init.empty() ? "zero" : a.init), opts);
        if (!a.trace.empty()) write_text_file(a.trace, emit_trace_csv(r.trace));
        emit_result(p, r.final_value, r.greedy_policy, a, out);
        err << a.algo << ": " << r.iterations << " iteration(s), residual " << ExtCost(r.final_residual) << ", "
            << to_string(r.monotonicity) << (r.converged ? "" : ", not converged") << "\n";
        return r.converged ? exit_ok : exit_not_converged;
    }
    if (a.algo == "pi") {
        if (!p.is_deterministic()) throw UsageError("pi needs a deterministic graph problem; use opi or mm-vi");
        Policy mu0 = Policy::first_control(p);
        if (!a.init.empty()) {
            if (a.init.rfind("policy:", 0) != 0) throw UsageError("pi takes --init policy:<file>");
            mu0 = parse_policy_csv(p, read_text_file(a.init.substr(7)));
        }
        const PiResult r = run_pi(p, mu0, parse_tie(a.tie, TieBreak::keep_current), a.max_iters);
        if (!a.trace.empty()) write_text_file(a.trace, emit_trace_csv(r.trace));
        emit_result(p, r.final_value, r.final_policy, a, out);
        err << "pi: " << r.iterations << " round(s), stopped by " << to_string(r.stopped_reason) << "\n";
        return r.stopped_reason == StopReason::max_iters ? exit_not_converged : exit_ok;
    }
    if (a.algo == "opi") {
        OpiOptions opts;
        opts.tol = a.tol;
        opts.max_iters = a.max_iters;
        opts.tie = parse_tie(a.tie, TieBreak::least_index);
        opts.record_values = !a.trace.empty();
        const ValueFunction J0 = initial_value(p, a.init.empty() ? "inf-outside" : a.init);
        const PiResult r = run_opi(p, J0, SweepSchedule(a.m), opts);
        if (!a.trace.empty()) write_text_file(a.trace, emit_trace_csv(r.trace));
        emit_result(p, r.final_value, r.final_policy, a, out);
        err << "opi: " << r.iterations << " round(s), stopped by " << to_string(r.stopped_reason) << "\n";
        return r.stopped_reason == StopReason::max_iters ? exit_not_converged : exit_ok;
    }
    throw UsageError("--algo must be vi, pi, opi or mm-vi");
}

void print_value(std::ostream& out, const Problem& p, const ValueFunction& J, std::string_view indent) {
    for (StateIndex x = 0; x < p.num_states(); ++x) out << indent << p.state_id(x) << ": " << J[x] << "\n";
}

int analyze(const AnalyzeArgs& a, std::ostream& out) {
    const ProblemDocument doc = parse_problem_file(a.problem);
    const Problem& p = doc.problem;
    if (a.mode == "residual") {
        if (a.value.empty()) throw UsageError("analyze residual needs --value");
        const ValueFunction J = parse_value_csv(p, read_text_file(a.value));
        const double res = residual(p, J);
        out << "residual: " << ExtCost(res) << "\n";
        out << "in_j_class: " << (J.in_j_class() ? "true" : "false") << "\n";
        out << "fixed_point: " << (res <= a.tol ? "true" : "false") << "\n";
        return exit_ok;
    }
    if (a.mode == "multiplicity") {
        std::vector<ValueFunction> seeds = default_seeds(p);
        if (!a.value.empty()) seeds.push_back(parse_value_csv(p, read_text_file(a.value)));
        MultiplicityOptions opts;
        opts.tol = a.tol;
        if (doc.grid) opts.cluster_distance = doc.grid->grid_tolerance;
        const MultiplicityResult r = multiplicity_scan(p, seeds, opts);
        out << "fixed_points: " << r.fixed_points.size() << "\n";
        out << "in_j_class: " << r.count_in_j_class() << "\n";
        for (std::size_t i = 0; i < r.fixed_points.size(); ++i) {
            const FixedPointCandidate& c = r.fixed_points[i];
            out << "- fixed_point " << i << ":\n    residual: " << ExtCost(c.residual)
                << "\n    in_j_class: " << (c.in_j_class ? "true" : "false") << "\n    seeds:";
            for (std::size_t s : c.seeds) out << " " << s;
            out << "\n    value:\n";
            print_value(out, p, c.value, "      ");
        }
        for (const SkippedSeed& s : r.skipped) out << "- skipped seed " << s.seed << ": " << s.diagnostics << "\n";
        return exit_ok;
    }
    throw UsageError("analyze takes residual or multiplicity");
}

int check(const CheckArgs& a, std::ostream& out) {
    if (a.what != "assumptions") throw UsageError("check takes assumptions");
    const ProblemDocument doc = parse_problem_file(a.problem);
    AssumptionConfig cfg;
    cfg.assert_local_controllability = a.assert_local;
    const AssumptionReport r = doc.grid ? check_assumption1(*doc.grid, cfg) : check_assumption1(doc.problem, cfg);
    out << format_report(r, doc.problem);
    return exit_ok;
}

const char* verdict(bool ok) { return ok ? "reproduced" : "NOT reproduced"; }

int fixture_example1(std::ostream& out) {
    const Problem p = build_example1();
    bool ok = true;
    out << "example1: two states, stay free, move costs 1\n  residual of (0, c):\n";
    for (double c : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double res = residual(p, ValueFunction(p, {ExtCost::zero(), ExtCost(c)}));
        ok = ok && res == 0.0;
        out << "    c = " << c << ": " << res << "\n";
    }
    const MultiplicityResult m = multiplicity_scan(p, default_seeds(p));
    out << "  fixed points from default seeds: " << m.fixed_points.size() << "\n";
    for (const auto& c : m.fixed_points) out << "    J(1) = " << c.value[1] << "\n";
    const ValueFunction jstar = oracle_policy_enum(p);
    out << "  optimal J(1) = " << jstar[1] << "\n";
    ok = ok && m.fixed_points.size() == 2 && jstar[1].is_zero();
    out << "  " << verdict(ok) << "\n";
    return ok ? exit_ok : exit_not_converged;
}

int fixture_example2(std::ostream& out) {
    std::vector<double> xs(10'000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 2.0 * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
    const Example2Report r = verify_example2(1'000'000, xs);
    out << "example2: J_k(x) = min{1, kx}\n";
    out << "  samples: " << r.samples_checked << ", recursion checks: " << r.recursion_checks << "\n";
    out << "  max recursion error: " << r.max_recursion_error << "\n";
    out << "  J_k(0) = 0 for k <= " << r.k_max << ": " << (r.zero_state_stays_zero ? "true" : "false") << "\n";
    out << "  J*(0) = " << r.optimal_at_zero << "\n";
    out << "  " << verdict(r.passed()) << "\n";
    return r.passed() ? exit_ok : exit_not_converged;
}

int fixture_example3(std::ostream& out) {
    const Example3Report r = build_example3_run();
    out << "example3: policy iteration from mu(1) = move\n";
    out << "  keep_current: J(1) = " << r.keep_current.final_value[1] << " after " << r.keep_current.iterations
        << " round(s)\n";
    out << "  least_index:  J(1) = " << r.least_index.final_value[1] << " after " << r.least_index.iterations
        << " round(s)\n";
    out << "  optimal J(1) = " << r.optimal_at_1 << "\n";
    out << "  " << verdict(r.passed()) << "\n";
    return r.passed() ? exit_ok : exit_not_converged;
}

int fixture_example4(std::ostream& out) {
    const LinearGridProblem g = build_example4();
    const StateMask inner = g.region(0.5);
    const double r0 = residual(g.problem, ValueFunction::zero(g.problem), &inner);
    const double r3 = residual(g.problem, g.sample([](std::span<const double> x) { return 3.0 * x[0] * x[0]; }), &inner);
    const bool ok = r0 <= g.grid_tolerance && r3 <= g.grid_tolerance;
    out << "example4: x' = 2x + u, g = u^2, " << g.problem.num_states() << " nodes\n";
    out << "  grid tolerance: " << g.grid_tolerance << "\n";
    out << "  residual of J = 0 on |x| <= 0.5: " << r0 << "\n";
    out << "  residual of J = 3x^2 on |x| <= 0.5: " << r3 << "\n";
    out << "  " << verdict(ok) << "\n";
    return ok ? exit_ok : exit_not_converged;
}

int fixture_lq(std::ostream& out) {
    const LinearGridProblem g = build_lq_grid();
    const double K = riccati_oracle(g.system)(0, 0);
    const ViResult a = run_vi(g.problem, ValueFunction::zero(g.problem));
    const ViResult b = run_vi(g.problem, ValueFunction::infinite_outside(g.problem));
    const double gap = sup_distance(a.final_value, b.final_value).value();
    const StateMask inner = g.region(0.5);
    double num = 0.0;
    double den = 0.0;
    for (StateIndex x = 0; x < inner.size(); ++x) {
        if (!inner[x]) continue;
        const double e = K * g.point(x)[0] * g.point(x)[0];
        num = std::max(num, std::abs(a.final_value[x].value() - e));
        den = std::max(den, e);
    }
    const double rel = num / den;
    const bool ok = a.converged && b.converged && gap <= 2.0 * g.grid_tolerance && rel <= 0.05;
    out << "lq: x' = 2x + u, g = x^2 + u^2\n";
    out << "  Riccati K = " << std::setprecision(12) << K << std::setprecision(6) << "\n";
    out << "  iterations from zero / inf-outside: " << a.iterations << " / " << b.iterations << "\n";
    out << "  sup distance between limits: " << gap << " (tolerance " << 2.0 * g.grid_tolerance << ")\n";
    out << "  relative error against Kx^2 on |x| <= 0.5: " << rel << "\n";
    out << "  " << verdict(ok) << "\n";
    return ok ? exit_ok : exit_not_converged;
}

int fixture_min_time(std::ostream& out) {
    const Problem p = build_adversarial_line();
    const ViResult r = min_time_reachability(p);
    out << "min-time: adversarial line, target {0}\n";
    print_value(out, p, r.final_value, "  ");
    bool ok = r.converged;
    for (StateIndex x = 0; x < p.num_states(); ++x) ok = ok && r.final_value[x] == ExtCost(static_cast<double>(x));
    out << "  " << verdict(ok) << "\n";
    return ok ? exit_ok : exit_not_converged;
}

int fixture_tube(std::ostream& out) {
    const Problem p = build_tube_fixture();
    const TubeResult t = target_tube(p, tube_fixture_set());
    out << "tube: five states, hat_X = {0, 1, 2, 3}\n";
    for (std::size_t k = 0; k < t.set_sequence.size(); ++k) {
        out << "  X_" << k << " = {";
        const auto xs = members(t.set_sequence[k]);
        for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? ", " : "") << p.state_id(xs[i]);
        out << "}\n";
    }
    const bool ok = members(t.fixed_set) == std::vector<StateIndex>{0, 1};
    out << "  " << verdict(ok) << "\n";
    return ok ? exit_ok : exit_not_converged;
}

int fixture(const FixtureArgs& a, std::ostream& out) {
    if (a.name == "example1") return fixture_example1(out);
    if (a.name == "example2") return fixture_example2(out);
    if (a.name == "example3") return fixture_example3(out);
    if (a.name == "example4") return fixture_example4(out);
    if (a.name == "lq") return fixture_lq(out);
    if (a.name == "min-time") return fixture_min_time(out);
    if (a.name == "tube") return fixture_tube(out);
    throw UsageError("unknown fixture '" + a.name + "'");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Undiscounted optimal control to a terminal set", "termdp"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Run a solver on a problem file");
    solve_cmd->add_option("--problem", sa.problem, "Problem JSON")->required();
    solve_cmd->add_option("--algo", sa.algo, "vi, pi, opi or mm-vi")
        ->check(CLI::IsMember({"vi", "pi", "opi", "mm-vi"}));
    solve_cmd->add_option("--init", sa.init, "zero, inf-outside, policy:<file> or value:<file>");
    solve_cmd->add_option("--tol", sa.tol, "Stopping tolerance");
    solve_cmd->add_option("--max-iters", sa.max_iters, "Iteration cap");
    solve_cmd->add_option("--tie", sa.tie, "keep or least")->check(CLI::IsMember({"keep", "least"}));
    solve_cmd->add_option("--m", sa.m, "Sweeps per round for opi; a list is used round by round")->delimiter(',');
    solve_cmd->add_option("--trace", sa.trace, "Trace CSV output");
    solve_cmd->add_option("--out", sa.out, "Value CSV output (default: stdout)");
    solve_cmd->add_option("--policy-out", sa.policy_out, "Policy CSV output");

    AnalyzeArgs aa;
    auto* analyze_cmd = app.add_subcommand("analyze", "Residual and fixed-point multiplicity");
    analyze_cmd->add_option("mode", aa.mode, "residual or multiplicity")
        ->required()
        ->check(CLI::IsMember({"residual", "multiplicity"}));
    analyze_cmd->add_option("--problem", aa.problem, "Problem JSON")->required();
    analyze_cmd->add_option("--value", aa.value, "Value CSV");
    analyze_cmd->add_option("--tol", aa.tol, "Certification tolerance");

    CheckArgs ca;
    auto* check_cmd = app.add_subcommand("check", "Check the termination assumption");
    check_cmd->add_option("what", ca.what, "assumptions")->required()->check(CLI::IsMember({"assumptions"}));
    check_cmd->add_option("--problem", ca.problem, "Problem JSON")->required();
    check_cmd->add_flag("--assert-local-controllability", ca.assert_local,
                        "Take cheap termination near the origin as given");

    FixtureArgs fa;
    auto* fixture_cmd = app.add_subcommand("fixture", "Reproduce a built-in counterexample or benchmark");
    auto* run_cmd = fixture_cmd->add_subcommand("run", "Run one fixture");
    fixture_cmd->require_subcommand(1);
    run_cmd->add_option("name", fa.name, "example1, example2, example3, example4, lq, min-time or tube")
        ->required()
        ->check(CLI::IsMember({"example1", "example2", "example3", "example4", "lq", "min-time", "tube"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (solve_cmd->parsed()) return solve(sa, out, err);
        if (analyze_cmd->parsed()) return analyze(aa, out);
        if (check_cmd->parsed()) return check(ca, out);
        if (run_cmd->parsed()) return fixture(fa, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ValidationError& e) {
        err << "error: invalid problem\n" << e.report().to_text() << "\n";
        return exit_validation;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }
    err << "error: no command\n";
    return exit_usage;
}

}  // namespace termdp
