#pragma once

// JSON space and modulus-instance files, report serialization and CSV output.
//
// Space file:
//   {"kind": "matrix",  "points": n | [labels], "distances": [[...], ...], "fields": {...}}
//   {"kind": "graph",   "points": n | [labels], "edges": [[u, v, length], ...], "fields": {...}}
//   {"kind": "formula", "points": [[param...], ...], "formula": {"name": s, "params": {...}}, "fields": {...}}
// Optional "measure": [w...] (vertex weights; defaults to counting measure).
//
// Modulus instance file:
//   {"graph": {"points": n, "edges": [[u, v, length], ...]}, "sigma": [...],
//    "family": {"kind": "connecting", "data": {"sources": [...], "targets": [...]}}
//            | {"kind": "explicit", "data": [[v0, v1, ...], ...]}
//            | {"kind": "through_edges", "data": [edge ids]},
//    "p": 1 | 2 | "inf", "tol": 1e-8}

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "metric_space.hpp"
#include "modulus.hpp"

namespace metricgeo::io {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void schema(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::Schema, where + ": " + what);
}

inline const json& require(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema(where, "missing field '" + key + "'");
    return j.at(key);
}

inline double number(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf" || s == "Infinity") return kInfinity;
    }
    schema(where, "expected a number");
}

inline std::size_t index(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) schema(where, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

inline std::vector<double> numbers(const json& j, const std::string& where) {
    if (!j.is_array()) schema(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<std::size_t> indices(const json& j, const std::string& where) {
    if (!j.is_array()) schema(where, "expected an array of indices");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(index(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::size_t point_count(const json& j, const std::string& where) {
    if (j.is_array()) return j.size();
    return index(j, where);
}

inline WeightedGraph graph_from(const json& j, const std::string& where) {
    std::size_t n = point_count(require(j, "points", where), where + ".points");
    const json& edges = require(j, "edges", where);
    if (!edges.is_array()) schema(where + ".edges", "expected an array");
    std::vector<Edge> out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        std::string at = where + ".edges[" + std::to_string(i) + "]";
        if (!edges[i].is_array() || edges[i].size() != 3) schema(at, "expected [u, v, length]");
        out.push_back({index(edges[i][0], at), index(edges[i][1], at), number(edges[i][2], at)});
    }
    return WeightedGraph(n, std::move(out));
}

}  // namespace detail

inline json parse_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Schema, where + ": " + e.what());
    }
}

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Schema, path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, path + ": cannot write file");
    out << text;
}

struct SpaceFile {
    MetricSpace space = MetricSpace::from_matrix(DistanceMatrix::from_rows({{0.0}}));
    std::map<std::string, ScalarField> fields;
    std::optional<Measure> measure;

    const ScalarField& field(const std::string& name) const {
        auto it = fields.find(name);
        if (it == fields.end()) throw Error(ErrorCode::Schema, "space file has no field '" + name + "'");
        return it->second;
    }
};

inline SpaceFile space_from_json(const json& j, const std::string& where = "space") {
    if (!j.is_object()) detail::schema(where, "expected an object");
    const json& kind = detail::require(j, "kind", where);
    if (!kind.is_string()) detail::schema(where + ".kind", "expected a string");
    SpaceFile out;
    const auto k = kind.get<std::string>();
    if (k == "matrix") {
        std::size_t n = detail::point_count(detail::require(j, "points", where), where + ".points");
        const json& rows = detail::require(j, "distances", where);
        if (!rows.is_array() || rows.size() != n) detail::schema(where + ".distances", "expected n rows");
        std::vector<std::vector<double>> m;
        for (std::size_t i = 0; i < n; ++i)
            m.push_back(detail::numbers(rows[i], where + ".distances[" + std::to_string(i) + "]"));
        out.space = MetricSpace::from_matrix(DistanceMatrix::from_rows(m));
    } else if (k == "graph") {
        out.space = MetricSpace::from_graph(detail::graph_from(j, where));
    } else if (k == "formula") {
        const json& f = detail::require(j, "formula", where);
        const json& name = detail::require(f, "name", where + ".formula");
        if (!name.is_string()) detail::schema(where + ".formula.name", "expected a string");
        std::map<std::string, double> params;
        if (f.contains("params")) {
            if (!f["params"].is_object()) detail::schema(where + ".formula.params", "expected an object");
            for (auto it = f["params"].begin(); it != f["params"].end(); ++it)
                params[it.key()] = detail::number(it.value(), where + ".formula.params." + it.key());
        }
        const json& pts = detail::require(j, "points", where);
        if (!pts.is_array()) detail::schema(where + ".points", "expected an array of parameter vectors");
        std::vector<Param> points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            std::string at = where + ".points[" + std::to_string(i) + "]";
            points.push_back(pts[i].is_number() ? Param{detail::number(pts[i], at)} : detail::numbers(pts[i], at));
        }
        out.space = MetricSpace::from_formula(corpus_formula(name.get<std::string>(), params), std::move(points));
    } else {
        detail::schema(where + ".kind", "unknown kind '" + k + "'");
    }
    if (j.contains("fields")) {
        if (!j["fields"].is_object()) detail::schema(where + ".fields", "expected an object");
        for (auto it = j["fields"].begin(); it != j["fields"].end(); ++it) {
            auto values = detail::numbers(it.value(), where + ".fields." + it.key());
            if (values.size() != out.space.size())
                detail::schema(where + ".fields." + it.key(), "expected one value per point");
            out.fields.emplace(it.key(), ScalarField(std::move(values)));
        }
    }
    if (j.contains("measure")) {
        auto w = detail::numbers(j["measure"], where + ".measure");
        if (w.size() != out.space.size()) detail::schema(where + ".measure", "expected one weight per point");
        out.measure = Measure(MeasureFlavor::Vertex, std::move(w));
    }
    return out;
}

inline SpaceFile load_space(const std::string& path) { return space_from_json(read_json(path), path); }

inline json facts_json(const CorpusSpace& c) {
    json out = json::array();
    for (const auto& f : c.facts)
        out.push_back({{"description", f.description}, {"exact", f.exact}, {"evaluated", f.evaluated}});
    return out;
}

inline json to_json(const CorpusSpace& c, bool with_facts = false) {
    json j;
    j["kind"] = "formula";
    j["formula"] = {{"name", c.formula->name()}, {"params", c.formula->params()}};
    j["points"] = c.samples;
    json fields = json::object();
    for (const auto& [name, f] : c.fields) fields[name] = f.values();
    j["fields"] = fields;
    if (with_facts) j["facts"] = facts_json(c);
    return j;
}


struct ModulusInstance {
    WeightedGraph graph;
    std::vector<double> sigma;
    CurveFamily family;
    std::optional<double> p;
    std::optional<double> tol;
};

inline ModulusInstance instance_from_json(const json& j, const std::string& where = "instance") {
    WeightedGraph g = detail::graph_from(detail::require(j, "graph", where), where + ".graph");
    std::vector<double> sigma(g.edge_count(), 1.0);
    if (j.contains("sigma")) {
        sigma = detail::numbers(j["sigma"], where + ".sigma");
        if (sigma.size() != g.edge_count()) detail::schema(where + ".sigma", "expected one weight per edge");
    }
    const json& fam = detail::require(j, "family", where);
    const std::string at = where + ".family";
    const json& kind = detail::require(fam, "kind", at);
    if (!kind.is_string()) detail::schema(at + ".kind", "expected a string");
    const auto t = kind.get<std::string>();
    const json& data = detail::require(fam, "data", at);
    std::optional<CurveFamily> family;
    if (t == "connecting") {
        family = CurveFamily::connecting(detail::indices(detail::require(data, "sources", at + ".data"), at + ".data.sources"),
                                         detail::indices(detail::require(data, "targets", at + ".data"), at + ".data.targets"));
    } else if (t == "explicit") {
        if (!data.is_array()) detail::schema(at + ".data", "expected an array of vertex sequences");
        std::vector<Path> paths;
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto vs = detail::indices(data[i], at + ".data[" + std::to_string(i) + "]");
            try {
                paths.push_back(walk_from_vertices(g, vs));
            } catch (const Error& e) {
                detail::schema(at + ".data[" + std::to_string(i) + "]", e.what());
            }
        }
        family = CurveFamily::explicit_curves(std::move(paths));
    } else if (t == "through_edges") {
        family = CurveFamily::through_edges(detail::indices(data, at + ".data"));
    } else {
        detail::schema(at + ".kind", "unknown family kind '" + t + "'");
    }
    std::optional<double> p, tol;
    if (j.contains("p")) p = detail::number(j["p"], where + ".p");
    if (j.contains("tol")) tol = detail::number(j["tol"], where + ".tol");
    return {std::move(g), std::move(sigma), std::move(*family), p, tol};
}

inline ModulusInstance load_instance(const std::string& path) { return instance_from_json(read_json(path), path); }

inline json graph_json(const WeightedGraph& g) {
    json edges = json::array();
    for (const auto& e : g.edges()) edges.push_back({e.u, e.v, e.length});
    return {{"points", g.size()}, {"edges", edges}};
}

inline json path_json(const Path& p) { return p.vertices; }

/// Non-finite doubles become the strings "inf" / "-inf" / "nan".
inline json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline json nums(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(num(x));
    return out;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// 17 significant digits, '.' decimal regardless of locale.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    for (auto& ch : s)
        if (ch == ',') ch = '.';
    return s;
}

/// CSV from a header and rows of cells (numbers formatted with format_double).
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(const std::vector<std::string>& cells) { rows_.push_back(cells); }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
            out += "\n";
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string cell(double v) { return format_double(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(bool v) { return v ? "true" : "false"; }
inline std::string cell(const std::string& v) { return v; }

}  // namespace metricgeo::io
