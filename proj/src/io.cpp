#include "termdp/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace termdp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view s, std::string_view what) {
    if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ParseError(std::string(what) + ": malformed number '" + std::string(s) + "'");
    return v;
}

// Cursor into a document that remembers its JSON path for diagnostics.
struct Node {
    const json& value;
    std::string path;

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError((path.empty() ? std::string("/") : path) + ": " + message);
    }
    Node operator[](std::string_view key) const {
        if (!value.is_object()) fail("expected an object");
        auto it = value.find(std::string(key));
        if (it == value.end()) fail("missing field '" + std::string(key) + "'");
        return {*it, path + "/" + std::string(key)};
    }
    Node operator[](std::size_t i) const { return {value.at(i), path + "/" + std::to_string(i)}; }
    bool has(std::string_view key) const { return value.is_object() && value.contains(std::string(key)); }
    std::size_t size() const {
        if (!value.is_array()) fail("expected an array");
        return value.size();
    }
    std::string string() const {
        if (!value.is_string()) fail("expected a string");
        return value.get<std::string>();
    }
    double number() const {
        if (!value.is_number()) fail("expected a number");
        return value.get<double>();
    }
    std::size_t count() const {
        if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
            fail("expected a nonnegative integer");
        return value.get<std::size_t>();
    }
    /// Cost as a signed double so that negatives can be reported as
    /// violations rather than syntax errors.
    double cost() const {
        if (value.is_string()) {
            const std::string s = value.get<std::string>();
            if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
            fail("cost must be a number or \"inf\", got \"" + s + "\"");
        }
        if (!value.is_number()) fail("cost must be a number or \"inf\"");
        return value.get<double>();
    }
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

struct CostSink {
    ValidationReport report;

    ExtCost take(double c, const Node& at, std::optional<StateIndex> x, std::optional<ControlIndex> u) {
        if (std::isnan(c)) at.fail("cost is not a number");
        if (c < 0.0) {
            report.violations.push_back(
                {ViolationKind::negative_cost, x, u, at.path + ": negative cost " + format_double(c)});
            return ExtCost::zero();
        }
        return ExtCost(c);
    }
};

std::vector<Successor> parse_next(const Node& n, const std::unordered_map<std::string, StateIndex>& index) {
    auto lookup = [&](const Node& id) {
        const std::string s = id.string();
        auto it = index.find(s);
        if (it == index.end()) id.fail("unknown state '" + s + "'");
        return it->second;
    };
    if (n.value.is_string()) return {Successor{lookup(n), 1.0}};
    std::vector<Successor> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const Node s = n[i];
        out.push_back(Successor{lookup(s["state"]), s["weight"].number()});
    }
    if (out.empty()) n.fail("empty successor list");
    return out;
}

Problem parse_finite(const Node& root) {
    const Node states = root["states"];
    std::vector<std::string> ids;
    std::unordered_map<std::string, StateIndex> index;
    for (std::size_t i = 0; i < states.size(); ++i) {
        ids.push_back(states[i].string());
        if (!index.emplace(ids.back(), i).second) states[i].fail("duplicate state '" + ids.back() + "'");
    }

    std::vector<StateIndex> terminal;
    const Node term = root["terminal"];
    for (std::size_t i = 0; i < term.size(); ++i) {
        const std::string s = term[i].string();
        auto it = index.find(s);
        if (it == index.end()) term[i].fail("unknown state '" + s + "'");
        terminal.push_back(it->second);
    }

    std::vector<std::string> disturbances;
    if (root.has("disturbances")) {
        const Node d = root["disturbances"];
        for (std::size_t i = 0; i < d.size(); ++i) disturbances.push_back(d[i].string());
    }
    const std::size_t num_w = disturbances.empty() ? 1 : disturbances.size();

    const Node actions = root["actions"];
    if (!actions.value.is_object()) actions.fail("expected an object keyed by state id");
    for (auto it = actions.value.begin(); it != actions.value.end(); ++it)
        if (!index.contains(it.key())) actions.fail("unknown state '" + it.key() + "'");

    CostSink costs;
    std::vector<std::vector<Control>> controls(ids.size());
    for (StateIndex x = 0; x < ids.size(); ++x) {
        if (!actions.has(ids[x])) continue;
        const Node list = actions[ids[x]];
        for (ControlIndex u = 0; u < list.size(); ++u) {
            const Node a = list[u];
            Control c{a["id"].string(), {}};
            if (a.has("outcomes")) {
                const Node outs = a["outcomes"];
                if (disturbances.empty()) outs.fail("outcomes given but no disturbances are declared");
                for (const std::string& w : disturbances) {
                    const Node o = outs[w];
                    c.outcomes.push_back(Outcome{costs.take(o["cost"].cost(), o["cost"], x, u), parse_next(o["next"], index)});
                }
                if (outs.value.size() != disturbances.size()) outs.fail("outcomes must list exactly the declared disturbances");
            } else {
                const Outcome o{costs.take(a["cost"].cost(), a["cost"], x, u), parse_next(a["next"], index)};
                c.outcomes.assign(num_w, o);
            }
            controls[x].push_back(std::move(c));
        }
    }
    if (!costs.report.ok()) throw ValidationError(costs.report);
    try {
        return Problem(std::move(ids), std::move(terminal), std::move(controls), std::move(disturbances));
    } catch (const std::invalid_argument& e) {
        root.fail(e.what());
    }
}

Eigen::MatrixXd parse_matrix(const Node& n) {
    if (n.value.is_number()) return Eigen::MatrixXd::Constant(1, 1, n.number());
    const std::size_t rows = n.size();
    if (rows == 0) n.fail("empty matrix");
    const std::size_t cols = n[0].value.is_array() ? n[0].size() : 1;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const Node row = n[i];
        if (row.value.is_number()) {
            if (cols != 1) row.fail("ragged matrix");
            m(static_cast<Eigen::Index>(i), 0) = row.number();
            continue;
        }
        if (row.size() != cols) row.fail("ragged matrix");
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].number();
    }
    return m;
}

std::vector<GridAxis> parse_axes(const Node& n) {
    const Node bounds = n["bounds"];
    const Node points = n["points"];
    std::vector<GridAxis> axes;
    if (bounds.size() == 2 && bounds[0].value.is_number()) {
        axes.push_back(GridAxis{bounds[0].number(), bounds[1].number(), points.value.is_array() ? points[0].count() : points.count()});
        return axes;
    }
    if (points.size() != bounds.size()) points.fail("needs one entry per axis");
    for (std::size_t d = 0; d < bounds.size(); ++d) {
        const Node b = bounds[d];
        if (b.size() != 2) b.fail("bounds are [lower, upper]");
        axes.push_back(GridAxis{b[0].number(), b[1].number(), points[d].count()});
    }
    return axes;
}

LinearGridProblem parse_linear_grid(const Node& root) {
    LinearSystemSpec sys;
    sys.A = parse_matrix(root["A"]);
    sys.B = parse_matrix(root["B"]);
    const Node cost = root["cost"];
    const double q = cost["q"].number();
    const double r = cost["r"].number();
    if (q < 0.0 || r < 0.0) {
        ValidationReport report;
        report.violations.push_back({ViolationKind::negative_cost, std::nullopt, std::nullopt,
                                     cost.path + ": cost weights must be nonnegative"});
        throw ValidationError(report);
    }
    sys.cost = CostForm{q, r, cost.has("p") ? cost["p"].number() : 2.0};
    GridSpec grid;
    grid.axes = parse_axes(root["grid"]);
    grid.controls = GridSpec::uniform_controls(parse_axes(root["controls"]));
    try {
        return build_linear_problem(sys, grid);
    } catch (const std::invalid_argument& e) {
        root.fail(e.what());
    }
}

ordered_json cost_json(ExtCost c) {
    if (c.is_infinite()) return "inf";
    return c.value();
}

ordered_json next_json(const Problem& p, const Outcome& o) {
    if (o.successors.size() == 1 && o.successors.front().weight == 1.0) return p.state_id(o.successors.front().state);
    ordered_json list = ordered_json::array();
    for (const Successor& s : o.successors) list.push_back({{"state", p.state_id(s.state)}, {"weight", s.weight}});
    return list;
}

ordered_json axes_json(const std::vector<GridAxis>& axes) {
    ordered_json bounds = ordered_json::array();
    ordered_json points = ordered_json::array();
    for (const GridAxis& a : axes) {
        bounds.push_back({a.lower, a.upper});
        points.push_back(a.points);
    }
    return {{"bounds", bounds}, {"points", points}};
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> lines(std::string_view text) {
    std::vector<std::string> out;
    for (std::string& l : split(text, '\n')) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
        if (!l.empty()) out.push_back(std::move(l));
    }
    return out;
}

void check_id(const std::string& id) {
    if (id.find_first_of(",\n\r") != std::string::npos)
        throw std::invalid_argument("identifier '" + id + "' cannot be written to CSV");
}

StateIndex csv_state(const Problem& p, const std::string& id, std::size_t line) {
    auto x = p.find_state(id);
    if (!x) throw ParseError("line " + std::to_string(line) + ": unknown state '" + id + "'");
    return *x;
}

}  // namespace

ProblemDocument parse_problem_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    const Node root{doc, ""};
    const std::string kind = root["kind"].string();
    ProblemDocument out;
    out.kind = kind;
    if (kind == "finite") {
        out.problem = parse_finite(root);
    } else if (kind == "linear_grid") {
        out.grid = parse_linear_grid(root);
        out.problem = out.grid->problem;
    } else {
        root["kind"].fail("unknown kind '" + kind + "'; expected finite or linear_grid");
    }
    require_valid(out.problem);
    return out;
}

ProblemDocument parse_problem_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return parse_problem_text(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string emit_problem_json(const Problem& p) {
    ordered_json doc;
    doc["kind"] = "finite";
    doc["states"] = std::vector<std::string>(p.state_ids().begin(), p.state_ids().end());
    ordered_json terminal = ordered_json::array();
    for (StateIndex x : p.terminal_states()) terminal.push_back(p.state_id(x));
    doc["terminal"] = terminal;
    if (p.has_disturbances())
        doc["disturbances"] = std::vector<std::string>(p.disturbance_ids().begin(), p.disturbance_ids().end());
    ordered_json actions = ordered_json::object();
    for (StateIndex x = 0; x < p.num_states(); ++x) {
        ordered_json list = ordered_json::array();
        for (const Control& c : p.controls(x)) {
            ordered_json a;
            a["id"] = c.id;
            const bool uniform = std::all_of(c.outcomes.begin(), c.outcomes.end(),
                                             [&](const Outcome& o) { return o == c.outcomes.front(); });
            if (uniform) {
                a["next"] = next_json(p, c.outcomes.front());
                a["cost"] = cost_json(c.outcomes.front().cost);
            } else {
                ordered_json outs;
                for (std::size_t w = 0; w < c.outcomes.size(); ++w)
                    outs[p.disturbance_ids()[w]] = {{"next", next_json(p, c.outcomes[w])}, {"cost", cost_json(c.outcomes[w].cost)}};
                a["outcomes"] = outs;
            }
            list.push_back(a);
        }
        actions[p.state_id(x)] = list;
    }
    doc["actions"] = actions;
    return doc.dump(2) + "\n";
}

std::string emit_linear_grid_json(const LinearGridProblem& g) {
    ordered_json doc;
    doc["kind"] = "linear_grid";
    doc["A"] = matrix_json(g.system.A);
    doc["B"] = matrix_json(g.system.B);
    doc["cost"] = {{"q", g.system.cost.q}, {"r", g.system.cost.r}, {"p", g.system.cost.p}};
    doc["grid"] = axes_json(g.grid.axes);

    // Recover the control axes from the Cartesian product (axis 0 fastest).
    const std::size_t m = g.grid.controls.front().size();
    std::vector<GridAxis> axes(m);
    std::size_t stride = 1;
    for (std::size_t d = 0; d < m; ++d) {
        std::size_t points = 1;
        while (stride * points < g.grid.controls.size() &&
               g.grid.controls[stride * points][d] != g.grid.controls.front()[d])
            ++points;
        axes[d] = GridAxis{g.grid.controls.front()[d], g.grid.controls[stride * (points - 1)][d], points};
        stride *= points;
    }
    if (GridSpec::uniform_controls(axes) != g.grid.controls)
        throw std::invalid_argument("emit_linear_grid_json: control list is not a uniform product grid");
    doc["controls"] = axes_json(axes);
    return doc.dump(2) + "\n";
}

std::string emit_value_csv(const Problem& p, const ValueFunction& J) {
    if (J.size() != p.num_states()) throw std::invalid_argument("emit_value_csv: size mismatch");
    std::string out = "state,value\n";
    for (StateIndex x = 0; x < p.num_states(); ++x) {
        check_id(p.state_id(x));
        out += p.state_id(x) + "," + to_string(J[x]) + "\n";
    }
    return out;
}

ValueFunction parse_value_csv(const Problem& p, std::string_view text) {
    const auto rows = lines(text);
    if (rows.empty() || rows.front() != "state,value") throw ParseError("line 1: expected header 'state,value'");
    std::vector<ExtCost> values(p.num_states());
    std::vector<bool> seen(p.num_states(), false);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split(rows[i], ',');
        if (cells.size() != 2) throw ParseError("line " + std::to_string(i + 1) + ": expected 2 fields");
        const StateIndex x = csv_state(p, cells[0], i + 1);
        if (seen[x]) throw ParseError("line " + std::to_string(i + 1) + ": duplicate state '" + cells[0] + "'");
        seen[x] = true;
        try {
            values[x] = parse_ext_cost(cells[1]);
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    for (StateIndex x = 0; x < p.num_states(); ++x)
        if (!seen[x]) throw ParseError("missing value for state '" + p.state_id(x) + "'");
    return ValueFunction(p, std::move(values));
}

std::string emit_policy_csv(const Problem& p, const Policy& mu) {
    if (mu.size() != p.num_states()) throw std::invalid_argument("emit_policy_csv: size mismatch");
    std::string out = "state,control\n";
    for (StateIndex x = 0; x < p.num_states(); ++x) {
        const std::string& c = p.controls(x)[mu[x]].id;
        check_id(p.state_id(x));
        check_id(c);
        out += p.state_id(x) + "," + c + "\n";
    }
    return out;
}

Policy parse_policy_csv(const Problem& p, std::string_view text) {
    const auto rows = lines(text);
    if (rows.empty() || rows.front() != "state,control") throw ParseError("line 1: expected header 'state,control'");
    std::vector<ControlIndex> choice(p.num_states());
    std::vector<bool> seen(p.num_states(), false);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split(rows[i], ',');
        if (cells.size() != 2) throw ParseError("line " + std::to_string(i + 1) + ": expected 2 fields");
        const StateIndex x = csv_state(p, cells[0], i + 1);
        if (seen[x]) throw ParseError("line " + std::to_string(i + 1) + ": duplicate state '" + cells[0] + "'");
        seen[x] = true;
        const auto cs = p.controls(x);
        auto it = std::find_if(cs.begin(), cs.end(), [&](const Control& c) { return c.id == cells[1]; });
        if (it == cs.end())
            throw ParseError("line " + std::to_string(i + 1) + ": state '" + cells[0] + "' has no control '" + cells[1] + "'");
        choice[x] = static_cast<ControlIndex>(it - cs.begin());
    }
    for (StateIndex x = 0; x < p.num_states(); ++x)
        if (!seen[x]) throw ParseError("missing control for state '" + p.state_id(x) + "'");
    return Policy(p, std::move(choice));
}

std::string emit_trace_csv(const SolveTrace& trace) {
    const bool snapshots = !trace.rows.empty() && !trace.rows.front().values.empty();
    std::string out = "iter,sup_change,residual,num_infinite";
    if (snapshots)
        for (const std::string& id : trace.state_ids) {
            check_id(id);
            out += ",state_" + id;
        }
    out += "\n";
    for (const TraceRow& r : trace.rows) {
        out += std::to_string(r.iteration) + "," + format_double(r.sup_change) + "," + format_double(r.residual) + "," +
               std::to_string(r.num_infinite);
        if (snapshots) {
            if (r.values.size() != trace.state_ids.size())
                throw std::invalid_argument("emit_trace_csv: snapshot width differs from state list");
            for (ExtCost v : r.values) out += "," + to_string(v);
        }
        out += "\n";
    }
    return out;
}

SolveTrace parse_trace_csv(std::string_view text) {
    const auto rows = lines(text);
    if (rows.empty()) throw ParseError("line 1: missing header");
    const auto header = split(rows.front(), ',');
    if (header.size() < 4 || header[0] != "iter" || header[1] != "sup_change" || header[2] != "residual" ||
        header[3] != "num_infinite")
        throw ParseError("line 1: expected header 'iter,sup_change,residual,num_infinite[,state_<id>...]'");
    SolveTrace trace;
    for (std::size_t c = 4; c < header.size(); ++c) {
        if (header[c].rfind("state_", 0) != 0) throw ParseError("line 1: column '" + header[c] + "' lacks the state_ prefix");
        trace.state_ids.push_back(header[c].substr(6));
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::string where = "line " + std::to_string(i + 1);
        const auto cells = split(rows[i], ',');
        if (cells.size() != header.size()) throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields");
        TraceRow r;
        r.iteration = static_cast<std::size_t>(parse_double(cells[0], where));
        r.sup_change = parse_double(cells[1], where);
        r.residual = parse_double(cells[2], where);
        r.num_infinite = static_cast<std::size_t>(parse_double(cells[3], where));
        for (std::size_t c = 4; c < cells.size(); ++c) {
            try {
                r.values.push_back(parse_ext_cost(cells[c]));
            } catch (const std::exception& e) {
                throw ParseError(where + ": " + e.what());
            }
        }
        trace.rows.push_back(std::move(r));
    }
    return trace;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream s;
    s << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    return s.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace termdp
