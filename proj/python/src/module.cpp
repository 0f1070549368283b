#include "termdp/assumptions.hpp"
#include "termdp/errors.hpp"
#include "termdp/finite.hpp"
#include "termdp/fixtures.hpp"
#include "termdp/io.hpp"
#include "termdp/minimax.hpp"
#include "termdp/policy_iteration.hpp"
#include "termdp/value_iteration.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <variant>

namespace py = pybind11;
using namespace termdp;

namespace {

using Values = std::vector<double>;
using Init = std::variant<std::string, Values>;

Values to_list(const ValueFunction& J) {
    Values out;
    out.reserve(J.size());
    for (ExtCost c : J.values()) out.push_back(c.is_infinite() ? std::numeric_limits<double>::infinity() : c.value());
    return out;
}

ValueFunction from_list(const Problem& p, const Values& v) {
    if (v.size() != p.num_states()) throw py::value_error("expected one value per state");
    std::vector<ExtCost> out;
    out.reserve(v.size());
    for (double d : v) out.push_back(std::isinf(d) && d > 0 ? ExtCost::infinity() : ExtCost(d));
    return ValueFunction(p, std::move(out));
}

ValueFunction initial(const Problem& p, const Init& init) {
    if (const auto* v = std::get_if<Values>(&init)) return from_list(p, *v);
    const auto& s = std::get<std::string>(init);
    if (s == "zero") return ValueFunction::zero(p);
    if (s == "inf-outside") return ValueFunction::infinite_outside(p);
    throw py::value_error("init must be 'zero', 'inf-outside' or a list of values");
}

TieBreak tie_from(const std::string& s) {
    if (s == "keep") return TieBreak::keep_current;
    if (s == "least") return TieBreak::least_index;
    throw py::value_error("tie must be 'keep' or 'least'");
}

std::vector<std::string> policy_ids(const Problem& p, const Policy& mu) {
    std::vector<std::string> out;
    for (StateIndex x = 0; x < mu.size(); ++x)
        out.push_back(p.num_controls(x) == 0 ? std::string() : p.controls(x)[mu[x]].id);
    return out;
}

Policy policy_from(const Problem& p, const std::vector<std::string>& ids) {
    if (ids.size() != p.num_states()) throw py::value_error("expected one control id per state");
    std::vector<ControlIndex> choice(ids.size(), 0);
    for (StateIndex x = 0; x < ids.size(); ++x) {
        const auto controls = p.controls(x);
        if (controls.empty()) continue;
        const auto it = std::find_if(controls.begin(), controls.end(), [&](const Control& c) { return c.id == ids[x]; });
        if (it == controls.end()) throw py::value_error("unknown control '" + ids[x] + "' at state " + p.state_id(x));
        choice[x] = static_cast<ControlIndex>(it - controls.begin());
    }
    return Policy(p, std::move(choice));
}

std::vector<std::string> ids_of(const Problem& p, const std::vector<StateIndex>& xs) {
    std::vector<std::string> out;
    for (StateIndex x : xs) out.push_back(p.state_id(x));
    return out;
}

StateMask mask_of(const Problem& p, const std::vector<std::string>& ids) {
    StateMask m(p.num_states(), false);
    for (const auto& id : ids) {
        const auto x = p.find_state(id);
        if (!x) throw py::value_error("unknown state '" + id + "'");
        m[*x] = true;
    }
    return m;
}

py::dict vi_dict(const Problem& p, const ViResult& r) {
    py::dict d;
    d["values"] = to_list(r.final_value);
    d["policy"] = policy_ids(p, r.greedy_policy);
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["residual"] = r.final_residual;
    d["monotonicity"] = std::string(to_string(r.monotonicity));
    return d;
}

py::dict pi_dict(const Problem& p, const PiResult& r) {
    py::dict d;
    d["values"] = to_list(r.final_value);
    d["policy"] = policy_ids(p, r.final_policy);
    d["iterations"] = r.iterations;
    d["stopped_reason"] = std::string(to_string(r.stopped_reason));
    py::list history;
    for (const auto& v : r.values) history.append(to_list(v));
    d["history"] = history;
    return d;
}

ProblemDocument wrap(Problem p) { return ProblemDocument{"finite", std::move(p), std::nullopt}; }

ProblemDocument wrap(LinearGridProblem g) {
    Problem p = g.problem;
    return ProblemDocument{"linear_grid", std::move(p), std::move(g)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Undiscounted nonnegative-cost control to a terminal set";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

    py::class_<ProblemDocument>(m, "Problem")
        .def_readonly("kind", &ProblemDocument::kind)
        .def_property_readonly("num_states", [](const ProblemDocument& d) { return d.problem.num_states(); })
        .def_property_readonly("state_ids", [](const ProblemDocument& d) {
            return std::vector<std::string>(d.problem.state_ids().begin(), d.problem.state_ids().end());
        })
        .def_property_readonly("terminal", [](const ProblemDocument& d) {
            return ids_of(d.problem, {d.problem.terminal_states().begin(), d.problem.terminal_states().end()});
        })
        .def_property_readonly("has_disturbances", [](const ProblemDocument& d) { return d.problem.has_disturbances(); })
        .def_property_readonly("grid_tolerance", [](const ProblemDocument& d) -> std::optional<double> {
            if (!d.grid) return std::nullopt;
            return d.grid->grid_tolerance;
        })
        .def_property_readonly("points", [](const ProblemDocument& d) -> std::optional<std::vector<std::vector<double>>> {
            if (!d.grid) return std::nullopt;
            std::vector<std::vector<double>> out;
            for (StateIndex x = 0; x < d.problem.num_states(); ++x) out.push_back(d.grid->point(x));
            return out;
        })
        .def("to_json", [](const ProblemDocument& d) {
            return d.grid ? emit_linear_grid_json(*d.grid) : emit_problem_json(d.problem);
        })
        .def("__repr__", [](const ProblemDocument& d) {
            return "<termdp.Problem kind=" + d.kind + " states=" + std::to_string(d.problem.num_states()) + ">";
        });

    m.def("parse_problem", [](const std::string& text) { return parse_problem_text(text); }, py::arg("text"));
    m.def("load_problem", [](const std::string& path) { return parse_problem_file(path); }, py::arg("path"));

    m.def(
        "fixture",
        [](const std::string& name, std::size_t n) -> ProblemDocument {
            if (name == "example1") return wrap(build_example1());
            if (name == "example4") return wrap(build_example4());
            if (name == "lq") return wrap(build_lq_grid());
            if (name == "chain") return wrap(build_unit_chain(n));
            if (name == "adversarial_line") return wrap(build_adversarial_line());
            if (name == "tube") return wrap(build_tube_fixture());
            throw py::value_error("unknown fixture '" + name + "'");
        },
        py::arg("name"), py::arg("n") = 5);

    m.def(
        "value_iteration",
        [](const ProblemDocument& d, const Init& init, double tol, std::size_t max_iters, const std::string& tie) {
            ViOptions o;
            o.tol = tol;
            o.max_iters = max_iters;
            o.tie = tie_from(tie);
            return vi_dict(d.problem, run_vi(d.problem, initial(d.problem, init), o));
        },
        py::arg("problem"), py::arg("init") = "zero", py::arg("tol") = 1e-9, py::arg("max_iters") = 10'000,
        py::arg("tie") = "least");

    m.def(
        "policy_iteration",
        [](const ProblemDocument& d, std::optional<std::vector<std::string>> policy, const std::string& tie,
           std::size_t max_iters) {
            const Policy mu0 = policy ? policy_from(d.problem, *policy) : Policy::first_control(d.problem);
            return pi_dict(d.problem, run_pi(d.problem, mu0, tie_from(tie), max_iters));
        },
        py::arg("problem"), py::arg("policy") = py::none(), py::arg("tie") = "keep", py::arg("max_iters") = 1'000);

    m.def(
        "optimistic_policy_iteration",
        [](const ProblemDocument& d, std::vector<std::size_t> m_k, const Init& init, double tol, std::size_t max_iters) {
            OpiOptions o;
            o.tol = tol;
            o.max_iters = max_iters;
            return pi_dict(d.problem, run_opi(d.problem, initial(d.problem, init), SweepSchedule(std::move(m_k)), o));
        },
        py::arg("problem"), py::arg("m") = std::vector<std::size_t>{1}, py::arg("init") = "inf-outside",
        py::arg("tol") = 1e-9, py::arg("max_iters") = 10'000);

    m.def(
        "residual",
        [](const ProblemDocument& d, const Values& values) { return residual(d.problem, from_list(d.problem, values)); },
        py::arg("problem"), py::arg("values"));

    m.def("optimal_cost", [](const ProblemDocument& d) { return to_list(oracle_dijkstra(d.problem)); }, py::arg("problem"));

    m.def(
        "multiplicity",
        [](const ProblemDocument& d, double tol) {
            MultiplicityOptions o;
            o.tol = tol;
            if (d.grid) o.cluster_distance = d.grid->grid_tolerance;
            py::list out;
            for (const auto& f : multiplicity_scan(d.problem, default_seeds(d.problem), o).fixed_points) {
                py::dict e;
                e["values"] = to_list(f.value);
                e["residual"] = f.residual;
                e["in_j_class"] = f.in_j_class;
                out.append(e);
            }
            return out;
        },
        py::arg("problem"), py::arg("tol") = 1e-9);

    m.def(
        "check_assumptions",
        [](const ProblemDocument& d, bool assert_local) {
            AssumptionConfig cfg;
            cfg.assert_local_controllability = assert_local;
            const AssumptionReport r = d.grid ? check_assumption1(*d.grid, cfg) : check_assumption1(d.problem, cfg);
            py::dict out;
            out["verdict"] = std::string(to_string(r.verdict));
            out["reasons"] = r.reasons;
            py::list witnesses;
            for (const auto& w : r.witnesses) {
                py::dict e;
                e["state"] = d.problem.state_id(w.state);
                e["cycle"] = ids_of(d.problem, w.cycle);
                e["description"] = w.description;
                witnesses.append(e);
            }
            out["witnesses"] = witnesses;
            out["report"] = format_report(r, d.problem);
            return out;
        },
        py::arg("problem"), py::arg("assert_local_controllability") = false);

    m.def(
        "min_time",
        [](const ProblemDocument& d) { return vi_dict(d.problem, min_time_reachability(d.problem)); },
        py::arg("problem"));

    m.def(
        "target_tube",
        [](const ProblemDocument& d, const std::vector<std::string>& states) {
            const TubeResult t = target_tube(d.problem, mask_of(d.problem, states));
            py::dict out;
            out["fixed_set"] = ids_of(d.problem, members(t.fixed_set));
            out["iterations"] = t.iterations_to_fix;
            return out;
        },
        py::arg("problem"), py::arg("states"));
}
