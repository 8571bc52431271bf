// metricgeo: batch front-end over the metricgeo library.
//
// Every subcommand writes one report (JSON by default, CSV with --format csv)
// to stdout or --out. Exit status: 0 when all checks pass, 2 when a violation
// or failure witness is found, 1 on input errors.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "metricgeo/io.hpp"
#include "metricgeo/metricgeo.hpp"

namespace {

using namespace metricgeo;
using io::json;
using io::num;
using io::nums;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitViolation = 2;

struct Options {
    std::string space;
    std::string field;
    std::string instance;
    std::string p;
    std::optional<double> tol;
    std::string schedule;
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string out;

    // subcommand-local
    double threshold = 2.0;
    std::optional<double> eps;
    double lambda = 1.0;
    std::string gradient;
    std::string name;
    std::optional<int> n_max;
    std::optional<int> samples;
    std::string emit;
    std::string corpus_action;
};

struct Report {
    json body = json::object();
    std::optional<io::Csv> table;
    int exit_code = kExitOk;
};

[[noreturn]] void input_error(const std::string& what) { throw Error(ErrorCode::Schema, what); }

double parse_p(const std::string& text, double fallback) {
    if (text.empty()) return fallback;
    if (text == "inf" || text == "infinity") return kInfinity;
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        input_error("--p: expected a number or 'inf', got '" + text + "'");
    }
}

ScheduleSpec parse_schedule(const std::string& text) {
    ScheduleSpec spec;
    if (text.empty()) return spec;
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        auto colon = text.find(':', start);
        auto piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(piece, &used));
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            input_error("--schedule: expected r0:ratio:rmin, got '" + text + "'");
        }
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 3) input_error("--schedule: expected r0:ratio:rmin, got '" + text + "'");
    spec.r0 = parts[0];
    spec.ratio = parts[1];
    spec.r_min = parts[2];
    try {
        spec.validate();
    } catch (const Error& e) {
        input_error(std::string("--schedule: ") + e.what());
    }
    return spec;
}

json schedule_json(const ScheduleSpec& s) {
    return {{"r0", s.r0}, {"ratio", s.ratio}, {"r_min", s.r_min}, {"r_min_rule", s.r_min == 0.0 ? "2*nn" : "fixed"}};
}

io::SpaceFile require_space(const Options& o) {
    if (o.space.empty()) input_error("--space is required");
    return io::load_space(o.space);
}

const ScalarField& require_field(const io::SpaceFile& s, const Options& o) {
    if (o.field.empty()) input_error("--field is required");
    return s.field(o.field);
}

Measure measure_of(const io::SpaceFile& s) {
    return s.measure ? *s.measure : Measure::counting(s.space.size());
}

double max_nearest(const MetricSpace& space) {
    double worst = 0.0;
    for (PointId x = 0; x < space.size(); ++x) {
        double nn = space.nearest_distance(x);
        if (std::isfinite(nn)) worst = std::max(worst, nn);
    }
    return worst;
}

// Walks for graph-based analyses: the graph itself, or an eps-graph whose
// default scale keeps every point linked to its nearest neighbour.
WeightedGraph walk_graph(const MetricSpace& space, const Options& o, double* used_eps) {
    if (const auto* g = space.graph(); g && !o.eps) {
        *used_eps = 0.0;
        return *g;
    }
    double eps = o.eps ? *o.eps : 2.0 * max_nearest(space);
    *used_eps = eps;
    return epsilon_graph(space, eps);
}

// ---------------------------------------------------------------------------

Report cmd_verify_metric(const Options& o) {
    auto s = require_space(o);
    double tau = o.tol.value_or(1e-9);
    auto rep = verify_metric_axioms(s.space, tau);
    Report r;
    json viol = json::array();
    io::Csv csv({"x", "z", "y", "defect"});
    for (const auto& v : rep.triangle_violations) {
        viol.push_back({{"x", v.x}, {"z", v.z}, {"y", v.y}, {"defect", v.defect}});
        csv.row({io::cell(v.x), io::cell(v.z), io::cell(v.y), io::cell(v.defect)});
    }
    json asym = json::array();
    for (auto [a, b] : rep.asymmetric_pairs) asym.push_back({a, b});
    r.body = {{"command", "verify-metric"},
              {"points", s.space.size()},
              {"tau", tau},
              {"ok", rep.ok()},
              {"max_triangle_defect", rep.max_triangle_defect},
              {"triangle_violations", viol},
              {"asymmetric_pairs", asym},
              {"nonzero_diagonal", rep.nonzero_diagonal}};
    r.table = csv;
    r.exit_code = rep.ok() ? kExitOk : kExitViolation;
    return r;
}

Report cmd_lip(const Options& o) {
    auto s = require_space(o);
    const auto& f = require_field(s, o);
    auto spec = parse_schedule(o.schedule);
    SchedulePolicy policy(s.space, spec);
    auto field = lip_field(s.space, f, policy);
    auto sup = sup_lip(field);
    Report r;
    json points = json::array();
    io::Csv csv({"point", "lip", "finest_r", "converged", "isolated_at_finest"});
    std::size_t unconverged = 0;
    for (const auto& e : field) {
        double finest = e.scales.empty() ? 0.0 : e.scales.back().r;
        if (!e.converged) ++unconverged;
        points.push_back({{"point", e.point}, {"lip", e.value}, {"finest_r", finest}, {"converged", e.converged}});
        csv.row({io::cell(e.point), io::cell(e.value), io::cell(finest), io::cell(e.converged),
                 io::cell(e.isolated_at_finest)});
    }
    r.body = {{"command", "lip"},
              {"field", o.field},
              {"schedule", schedule_json(policy.spec())},
              {"sup_lip", sup.value},
              {"sup_lip_point", sup.point},
              {"unconverged_points", unconverged},
              {"points", points}};
    r.table = csv;
    return r;
}

Report cmd_classify(const Options& o) {
    auto s = require_space(o);
    const auto& f = require_field(s, o);
    auto spec = parse_schedule(o.schedule);
    SchedulePolicy policy(s.space, spec);
    auto rep = classify_membership(s.space, f, policy, o.threshold);
    Report r;
    json local = nullptr;
    if (rep.local_failure)
        local = {{"center", rep.local_failure->center},
                 {"radius", rep.local_failure->radius},
                 {"pair", {rep.local_failure->pair.x, rep.local_failure->pair.y}},
                 {"ratio", rep.local_failure->pair.value}};
    r.body = {{"command", "classify"},
              {"field", o.field},
              {"schedule", schedule_json(policy.spec())},
              {"threshold", rep.threshold},
              {"in_D", rep.in_D},
              {"in_LIP", rep.in_LIP},
              {"in_LIP_loc", rep.in_LIP_loc},
              {"sup_lip", rep.sup_lip.value},
              {"sup_lip_point", rep.sup_lip.point},
              {"global_lip", rep.global.value},
              {"global_witness", {rep.global.x, rep.global.y}},
              {"local_failure", local},
              {"finest_scale_min", num(rep.finest_scale_min)},
              {"finest_scale_max", rep.finest_scale_max},
              {"note", "membership is relative to the tested scales"}};
    return r;
}

Report cmd_chains(const Options& o) {
    auto s = require_space(o);
    const std::size_t n = s.space.size();
    if (n < 2) input_error("chains: the space needs at least two points");
    // Pairs from the first point to evenly spaced points, plus the two ends.
    std::vector<std::pair<PointId, PointId>> pairs;
    for (std::size_t k = 1; k <= 4; ++k) {
        PointId y = k * (n - 1) / 4;
        if (y != 0 && (pairs.empty() || pairs.back().second != y)) pairs.emplace_back(0, y);
    }
    double base = o.eps ? *o.eps : 2.0 * max_nearest(s.space);
    std::vector<double> eps_list{base, 2.0 * base, 4.0 * base};
    auto ql = quasi_length_constant(s.space, pairs, eps_list);
    auto qc = quasi_convexity_constant(s.space, pairs, base);
    Report r;
    json rows = json::array();
    io::Csv csv({"x", "y", "eps", "nodes", "d", "ratio"});
    for (const auto& row : ql.rows) {
        rows.push_back({{"x", row.x}, {"y", row.y}, {"eps", row.eps}, {"nodes", row.ell}, {"d", row.d}, {"ratio", row.ratio}});
        csv.row({io::cell(row.x), io::cell(row.y), io::cell(row.eps), io::cell(row.ell), io::cell(row.d),
                 io::cell(row.ratio)});
    }
    json walks = json::array();
    for (const auto& row : qc.rows)
        walks.push_back({{"x", row.x}, {"y", row.y}, {"walk", row.walk}, {"d", row.d}, {"ratio", row.ratio}});
    r.body = {{"command", "chains"},
              {"eps", eps_list},
              {"quasi_length_lower_bound", ql.k_lower_bound},
              {"quasi_length_rows", rows},
              {"quasi_convexity_estimate", qc.c_estimate},
              {"quasi_convexity_rows", walks}};
    if (!o.field.empty()) {
        auto sem = semmes_required_K(s.space, s.field(o.field), pairs, eps_list);
        json srows = json::array();
        for (const auto& row : sem.rows)
            srows.push_back({{"x", row.x},
                             {"y", row.y},
                             {"eps", row.eps},
                             {"sup_d_eps", row.sup_d_eps},
                             {"required_k", row.required_k ? json(*row.required_k) : json(nullptr)}});
        r.body["semmes_max_required_k"] = sem.max_required_k;
        r.body["semmes_rows"] = srows;
        r.body["field"] = o.field;
    }
    r.table = csv;
    return r;
}

Report cmd_modulus(const Options& o) {
    if (o.instance.empty()) input_error("--instance is required");
    auto inst = io::load_instance(o.instance);
    double p = parse_p(o.p, inst.p.value_or(2.0));
    Exponent e = exponent_from(p);
    ModulusOptions opts;
    if (o.tol) opts.tol = *o.tol;
    else if (inst.tol) opts.tol = *inst.tol;
    if (!(opts.tol > 0.0)) input_error("--tol must be positive");
    auto res = modulus_p(inst.graph, inst.sigma, inst.family, e, opts);
    Report r;
    json active = json::array();
    for (const auto& path : res.active_paths) active.push_back(io::path_json(path));
    io::Csv csv({"edge", "u", "v", "length", "sigma", "rho"});
    for (std::size_t id = 0; id < inst.graph.edge_count(); ++id) {
        const auto& ed = inst.graph.edge(id);
        csv.row({io::cell(id), io::cell(ed.u), io::cell(ed.v), io::cell(ed.length), io::cell(inst.sigma[id]),
                 io::cell(res.rho.empty() ? 0.0 : res.rho[id])});
    }
    r.body = {{"command", "modulus"},
              {"p", num(p)},
              {"tol", opts.tol},
              {"value", num(res.value)},
              {"rho", nums(res.rho)},
              {"active_paths", active},
              {"lower_bound", num(res.lower_bound)},
              {"upper_bound", num(res.upper_bound)},
              {"gap", num(res.gap)},
              {"iterations", res.iterations}};
    r.table = csv;
    return r;
}

// ---------------------------------------------------------------------------
// sobolev

Report cmd_hajlasz(const Options& o) {
    auto s = require_space(o);
    const auto& f = require_field(s, o);
    double p = parse_p(o.p, kInfinity);
    HajlaszResult res;
    if (std::isinf(p)) {
        res = minimal_hajlasz_gradient_inf(s.space, f);
    } else {
        if (p != 1.0 && p != 2.0)
            throw Error(ErrorCode::UnsupportedExponent, "Hajlasz gradients support p = 1, 2 or inf");
        res = minimal_hajlasz_gradient_p(s.space, f, measure_of(s), static_cast<int>(p));
    }
    Report r;
    io::Csv csv({"point", "g"});
    for (PointId x = 0; x < res.g.size(); ++x) csv.row({io::cell(x), io::cell(res.g[x])});
    r.body = {{"command", "sobolev hajlasz"},
              {"field", o.field},
              {"p", num(p)},
              {"value", res.value},
              {"g", res.g.values()},
              {"max_violation", res.max_violation},
              {"complementarity", res.complementarity}};
    r.table = csv;
    return r;
}

Report cmd_newtonian(const Options& o) {
    auto s = require_space(o);
    const auto& f = require_field(s, o);
    double eps = 0.0;
    auto g = walk_graph(s.space, o, &eps);
    auto rep = newtonian_seminorm_inf(g, f);
    Report r;
    json argmax = nullptr;
    if (rep.argmax_edge) argmax = {{"edge", *rep.argmax_edge}, {"u", g.edge(*rep.argmax_edge).u}, {"v", g.edge(*rep.argmax_edge).v}};
    r.body = {{"command", "sobolev newtonian"},
              {"field", o.field},
              {"walk_eps", eps},
              {"value", rep.value},
              {"argmax", argmax},
              {"connected", rep.connected},
              {"per_component", rep.per_component}};
    return r;
}

std::vector<PointId> default_centers(std::size_t n, std::size_t cap = 200) {
    std::vector<PointId> c;
    std::size_t count = std::min(n, cap);
    for (std::size_t k = 0; k < count; ++k) c.push_back(count == n ? k : k * (n - 1) / (count - 1));
    return c;
}

std::vector<double> default_radii(const MetricSpace& space) {
    // From the diameter down to twice the sampling gap.
    double top = diameter(space), bottom = 2.0 * max_nearest(space);
    std::vector<double> radii;
    for (double r = top; r >= bottom && radii.size() < 12; r /= 2.0) radii.push_back(r);
    if (radii.empty()) radii.push_back(top > 0.0 ? top : 1.0);
    return radii;
}

Report cmd_doubling(const Options& o) {
    auto s = require_space(o);
    auto mu = measure_of(s);
    auto centers = default_centers(s.space.size());
    auto radii = default_radii(s.space);
    auto rep = doubling_constant(s.space, mu, centers, radii);
    Report r;
    io::Csv csv({"center", "r", "mass_r", "mass_2r", "ratio"});
    json rows = json::array();
    for (const auto& row : rep.rows) {
        csv.row({io::cell(row.center), io::cell(row.r), io::cell(row.mass_r), io::cell(row.mass_2r), io::cell(row.ratio)});
        rows.push_back({{"center", row.center}, {"r", row.r}, {"mass_r", row.mass_r}, {"mass_2r", row.mass_2r}, {"ratio", row.ratio}});
    }
    r.body = {{"command", "sobolev doubling"},
              {"estimate", rep.estimate},
              {"radii", radii},
              {"centers", centers.size()},
              {"zero_mass_balls", rep.zero_mass_balls.size()},
              {"rows", rows}};
    r.table = csv;
    return r;
}

Report cmd_poincare(const Options& o) {
    auto s = require_space(o);
    auto mu = measure_of(s);
    double p = parse_p(o.p, 1.0);
    double eps = 0.0;
    auto g = walk_graph(s.space, o, &eps);
    auto functions = default_test_functions(s.space, o.seed);
    if (!o.field.empty()) functions.insert(functions.begin(), {o.field, s.field(o.field)});
    auto centers = default_centers(s.space.size(), 50);
    auto radii = default_radii(s.space);
    auto est = poincare_constant(s.space, g, mu, p, o.lambda, functions, centers, radii);
    Report r;
    io::Csv csv({"function", "center", "r", "lhs", "rhs_core", "ratio", "status"});
    json witnesses = json::array();
    std::size_t counts[4] = {0, 0, 0, 0};
    for (const auto& row : est.rows) {
        ++counts[static_cast<int>(row.status)];
        csv.row({row.function, io::cell(row.center), io::cell(row.r), io::cell(row.lhs), io::cell(row.rhs_core),
                 io::cell(row.ratio), std::string(to_string(row.status))});
        if (row.status == PoincareStatus::FailureWitness && witnesses.size() < 20)
            witnesses.push_back({{"function", row.function}, {"center", row.center}, {"r", row.r}, {"lhs", row.lhs}});
    }
    r.body = {{"command", "sobolev poincare"},
              {"seed", o.seed},
              {"p", p},
              {"lambda", o.lambda},
              {"walk_eps", eps},
              {"estimate", est.estimate},
              {"failure_witness", est.failure_witness},
              {"failure_witnesses", witnesses},
              {"test_functions", est.test_functions},
              {"radii", radii},
              {"rows_ok", counts[0]},
              {"rows_skipped", counts[1]},
              {"rows_failure_witness", counts[2]},
              {"rows_zero_mass", counts[3]}};
    r.table = csv;
    r.exit_code = est.failure_witness ? kExitViolation : kExitOk;
    return r;
}

Report cmd_chain(const Options& o) {
    auto s = require_space(o);
    const auto& f = require_field(s, o);
    auto spec = parse_schedule(o.schedule);
    SchedulePolicy policy(s.space, spec);
    double eps = o.eps ? *o.eps : 2.0 * max_nearest(s.space);
    auto rep = norm_chain_report(s.space, f, policy, eps);
    Report r;
    r.body = {{"command", "sobolev chain"},
              {"field", o.field},
              {"schedule", schedule_json(policy.spec())},
              {"walk_eps", eps},
              {"newtonian_inf_seminorm", rep.newtonian_inf_seminorm},
              {"d_inf_lip_sup", rep.d_inf_lip_sup},
              {"lip_constant", rep.lip_constant},
              {"m_inf_seminorm", rep.m_inf_seminorm},
              {"slack", rep.slack},
              {"newtonian_le_d", rep.newtonian_le_d},
              {"d_le_lip", rep.d_le_lip},
              {"lip_eq_twice_hajlasz", rep.lip_eq_twice_hajlasz},
              {"strict_gap", rep.strict_gap},
              {"lip_witness", {rep.lip_witness.x, rep.lip_witness.y}},
              {"lip_sup_point", rep.lip_sup_point.point},
              {"ok", rep.ok()}};
    r.exit_code = rep.ok() ? kExitOk : kExitViolation;
    return r;
}

Report cmd_upper_gradient(const Options& o) {
    auto s = require_space(o);
    const auto& f = require_field(s, o);
    double eps = 0.0;
    auto g = walk_graph(s.space, o, &eps);
    double tau = o.tol.value_or(0.0);
    // The candidate is a named vertex field, or the edge gradient of f.
    Density rho = o.gradient.empty() ? edge_gradient(g, f)
                                     : Density(DensityLocation::Vertex, s.field(o.gradient).values());
    std::mt19937_64 rng(o.seed);
    std::vector<Curve> curves;
    std::vector<PointId> starts;
    for (PointId v = 0; v < g.size(); ++v)
        if (!g.incident(v).empty()) starts.push_back(v);
    if (starts.empty()) input_error("upper-gradient: the walk graph has no edges");
    for (int k = 0; k < 100; ++k) {
        PointId v = starts[rng() % starts.size()];
        std::vector<PointId> pts{v};
        std::size_t steps = 1 + rng() % 20;
        for (std::size_t i = 0; i < steps; ++i) {
            auto inc = g.incident(v);
            v = g.other_end(inc[rng() % inc.size()], v);
            pts.push_back(v);
        }
        curves.emplace_back(std::move(pts));
    }
    // Curve steps are measured in the walk graph so edge densities line up.
    auto walk_space = MetricSpace::from_graph(g);
    auto bad = verify_upper_gradient(walk_space, f, rho, curves, tau);
    Report r;
    io::Csv csv({"curve", "increment", "bound"});
    json rows = json::array();
    for (const auto& v : bad) {
        csv.row({io::cell(v.curve_index), io::cell(v.increment), io::cell(v.bound)});
        rows.push_back({{"curve", v.curve_index}, {"increment", v.increment}, {"bound", v.bound},
                        {"points", curves[v.curve_index].points()}});
    }
    r.body = {{"command", "sobolev upper-gradient"},
              {"seed", o.seed},
              {"field", o.field},
              {"gradient", o.gradient.empty() ? "edge_gradient" : o.gradient},
              {"tau", tau},
              {"walk_eps", eps},
              {"curves", curves.size()},
              {"violations", rows},
              {"ok", bad.empty()}};
    r.table = csv;
    r.exit_code = bad.empty() ? kExitOk : kExitViolation;
    return r;
}

// ---------------------------------------------------------------------------

Report cmd_corpus(const Options& o) {
    Report r;
    std::string action = o.corpus_action;
    if (action.empty()) action = o.emit.empty() ? "facts" : "emit";
    if (action == "list") {
        io::Csv csv({"name"});
        for (const auto& n : corpus_names()) csv.row({n});
        r.body = {{"command", "corpus list"}, {"spaces", corpus_names()}};
        r.table = csv;
        return r;
    }
    if (o.name.empty()) input_error("corpus: --name is required");
    std::map<std::string, double> opts;
    if (o.n_max) {
        opts["n_max"] = *o.n_max;
        opts["n_arms"] = *o.n_max;
        opts["count"] = *o.n_max;
    }
    if (o.samples) {
        opts["samples"] = *o.samples;
        opts["rings"] = *o.samples;
    }
    auto c = build_corpus(o.name, opts);
    if (action == "emit") {
        if (o.emit.empty()) input_error("corpus emit: --emit <path> is required");
        io::write_text(o.emit, io::dump(io::to_json(c)));
        r.body = {{"command", "corpus emit"}, {"name", c.name}, {"points", c.samples.size()}, {"path", o.emit}};
        return r;
    }
    if (action != "facts") input_error("corpus: unknown action '" + action + "'");
    io::Csv csv({"description", "exact", "evaluated", "abs_diff"});
    for (const auto& f : c.facts)
        csv.row({"\"" + f.description + "\"", io::cell(f.exact), io::cell(f.evaluated),
                 io::cell(std::abs(f.exact - f.evaluated))});
    r.body = {{"command", "corpus facts"}, {"name", c.name}, {"points", c.samples.size()}, {"facts", io::facts_json(c)}};
    r.table = csv;
    return r;
}

std::string render(const Report& r, const std::string& format) {
    if (format == "json") return io::dump(r.body);
    if (r.table) return r.table->str();
    io::Csv kv({"key", "value"});
    for (auto it = r.body.begin(); it != r.body.end(); ++it) {
        const auto& v = it.value();
        if (v.is_string()) kv.row({it.key(), v.get<std::string>()});
        else if (v.is_number_float()) kv.row({it.key(), io::cell(v.get<double>())});
        else if (v.is_primitive()) kv.row({it.key(), v.dump()});
    }
    return kv.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metricgeo: metric-space analyses on sampled spaces, graphs and curve families"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool space, bool field) {
        if (space) sub->add_option("--space", o.space, "space JSON file");
        if (field) sub->add_option("--field", o.field, "name of a scalar field in the space file");
        sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", o.out, "write the report here instead of stdout");
    };
    auto schedule = [&](CLI::App* sub) {
        sub->add_option("--schedule", o.schedule, "r0:ratio:rmin (0 selects the default rule)");
    };

    std::function<Report()> run;
    auto bind = [&](CLI::App* sub, std::function<Report(const Options&)> fn) {
        sub->callback([&run, fn, &o] { run = [fn, &o] { return fn(o); }; });
    };

    auto* vm = app.add_subcommand("verify-metric", "check the metric axioms");
    common(vm, true, false);
    vm->add_option("--tol", o.tol, "triangle tolerance");
    bind(vm, cmd_verify_metric);

    auto* lip = app.add_subcommand("lip", "pointwise Lipschitz estimates");
    common(lip, true, true);
    schedule(lip);
    bind(lip, cmd_lip);

    auto* cls = app.add_subcommand("classify", "membership in D, LIP and LIP_loc");
    common(cls, true, true);
    schedule(cls);
    cls->add_option("--threshold", o.threshold, "Lipschitz threshold");
    bind(cls, cmd_classify);

    auto* ch = app.add_subcommand("chains", "eps-chains, quasi-length and quasi-convexity");
    common(ch, true, true);
    ch->add_option("--eps", o.eps, "base chain scale");
    bind(ch, cmd_chains);

    auto* mod = app.add_subcommand("modulus", "p-modulus of a curve family");
    common(mod, false, false);
    mod->add_option("--instance", o.instance, "modulus instance JSON file");
    mod->add_option("--p", o.p, "1, 2 or inf");
    mod->add_option("--tol", o.tol, "relative duality gap");
    bind(mod, cmd_modulus);

    auto* sob = app.add_subcommand("sobolev", "Sobolev-type seminorms and inequalities");
    sob->require_subcommand(1);
    auto* hj = sob->add_subcommand("hajlasz", "minimal Hajlasz gradient");
    common(hj, true, true);
    hj->add_option("--p", o.p, "1, 2 or inf");
    bind(hj, cmd_hajlasz);
    auto* nw = sob->add_subcommand("newtonian", "discrete Newtonian seminorm");
    common(nw, true, true);
    nw->add_option("--eps", o.eps, "eps-graph scale for non-graph spaces");
    bind(nw, cmd_newtonian);
    auto* db = sob->add_subcommand("doubling", "doubling constant estimate");
    common(db, true, false);
    bind(db, cmd_doubling);
    auto* pc = sob->add_subcommand("poincare", "sampled weak Poincare constant");
    common(pc, true, true);
    pc->add_option("--p", o.p, "exponent (default 1)");
    pc->add_option("--seed", o.seed, "seed of the random test functions");
    pc->add_option("--lambda", o.lambda, "ball dilation");
    pc->add_option("--eps", o.eps, "eps-graph scale for non-graph spaces");
    bind(pc, cmd_poincare);
    auto* nc = sob->add_subcommand("chain", "Newtonian <= D <= LIP = 2 Hajlasz");
    common(nc, true, true);
    schedule(nc);
    nc->add_option("--eps", o.eps, "eps-graph scale of the Newtonian entry");
    bind(nc, cmd_chain);
    auto* ug = sob->add_subcommand("upper-gradient", "check a candidate upper gradient on random walks");
    common(ug, true, true);
    ug->add_option("--gradient", o.gradient, "vertex field used as the candidate (default: edge gradient)");
    ug->add_option("--tol", o.tol, "tolerance tau");
    ug->add_option("--seed", o.seed, "seed of the random walks");
    ug->add_option("--eps", o.eps, "eps-graph scale for non-graph spaces");
    bind(ug, cmd_upper_gradient);

    auto* cp = app.add_subcommand("corpus", "built-in example spaces");
    common(cp, false, false);
    cp->add_option("action", o.corpus_action, "list, facts or emit")->check(CLI::IsMember({"list", "facts", "emit"}));
    cp->add_option("--name", o.name, "corpus space name");
    cp->add_option("--n-max", o.n_max, "size parameter (intervals, arms or balls)");
    cp->add_option("--samples", o.samples, "sampling density (per interval or rings)");
    cp->add_option("--emit", o.emit, "write the sampled space JSON here");
    bind(cp, cmd_corpus);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        Report r = run();
        std::string text = render(r, o.format);
        if (o.out.empty()) std::cout << text;
        else io::write_text(o.out, text);
        return r.exit_code;
    } catch (const Error& e) {
        std::cerr << "metricgeo: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "metricgeo: " << e.what() << "\n";
        return kExitInput;
    }
}
