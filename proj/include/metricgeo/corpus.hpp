#pragma once

// Closed-form example spaces with their distinguished functions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "formula_space.hpp"
#include "graph.hpp"
#include "metric_space.hpp"

namespace metricgeo {

struct Fact {
    std::string description;
    double exact;      // closed-form value
    double evaluated;  // the same quantity recomputed from the distance/field rules
};

struct CorpusSpace {
    std::string name;
    std::shared_ptr<const FormulaSpace> formula;
    std::vector<Param> samples;
    std::map<std::string, ScalarField> fields;
    std::vector<Fact> facts;

    MetricSpace space() const { return MetricSpace::from_formula(formula, samples); }
    const ScalarField& field(const std::string& key) const {
        auto it = fields.find(key);
        if (it == fields.end()) throw Error(ErrorCode::InvalidArgument, name + " has no field '" + key + "'");
        return it->second;
    }
};

namespace detail {

inline double euclid(double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); }

inline FormulaSpace::Embedding planar_xy() {
    return [](std::span<const double> p) { return std::array<double, 2>{p[0], p[1]}; };
}

inline std::array<double, 2> cusp_point(double t) { return {t * t * t, t * t}; }

template <class Rule>
ScalarField field_from(const std::vector<Param>& samples, Rule&& rule) {
    return ScalarField::from_rule(std::span<const Param>(samples), std::forward<Rule>(rule));
}

inline double param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Half-line [0, inf) with the interval metrics d_n(x, y) = f_n(|x - y|)

namespace halfline {

inline double f(long n, double delta) {
    const double nn = static_cast<double>(n);
    return delta <= 1.0 / nn ? delta : (nn * delta + nn - 1.0) / (nn * nn);
}

// Integer points k belong to I_{k+1}; the cross-interval sum then gives
// d_m(m-1, m-1) = 0 on the shared endpoint.
inline long interval(double x) { return static_cast<long>(std::floor(x)) + 1; }

inline double distance(double a, double b) {
    double x = std::min(a, b), y = std::max(a, b);
    long n = interval(x), m = interval(y);
    if (n == m) return f(n, y - x);
    double d = f(n, static_cast<double>(n) - x);
    for (long i = n + 1; i < m; ++i) d += f(i, 1.0);
    return d + f(m, y - static_cast<double>(m - 1));
}

inline double g(double x) {
    long n = interval(x);
    double two_k = 2.0 * static_cast<double>(n / 2);
    return n % 2 == 0 ? two_k - x : x - two_k;
}

}  // namespace halfline

inline std::shared_ptr<const FormulaSpace> halfline_formula(int n_max) {
    return std::make_shared<FormulaSpace>(
        "halfline", std::map<std::string, double>{{"n_max", n_max}}, 1,
        [](std::span<const double> a, std::span<const double> b) { return halfline::distance(a[0], b[0]); });
}

inline CorpusSpace build_halfline(int n_max, int samples_per_interval) {
    if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be at least 1");
    if (samples_per_interval < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples per interval");
    CorpusSpace c{"halfline", halfline_formula(n_max), {}, {}, {}};
    const int s = samples_per_interval;
    for (int n = 1; n <= n_max; ++n)
        for (int k = 0; k < s; ++k) c.samples.push_back({static_cast<double>((n - 1) * s + k) / s});
    c.samples.push_back({static_cast<double>(n_max)});
    c.fields.emplace("g", detail::field_from(c.samples, [](std::span<const double> p) { return halfline::g(p[0]); }));
    const auto& F = *c.formula;
    for (int n = 1; n <= n_max; ++n) {
        double a = n - 1.0, b = n;
        c.facts.push_back({"d(" + std::to_string(n - 1) + "," + std::to_string(n) + ") = (2n-1)/n^2",
                           (2.0 * n - 1.0) / (static_cast<double>(n) * n), F.distance(Param{a}, Param{b})});
        c.facts.push_back({"|g(" + std::to_string(n - 1) + ")-g(" + std::to_string(n) + ")|/d = n^2/(2n-1)",
                           static_cast<double>(n) * n / (2.0 * n - 1.0),
                           std::abs(halfline::g(a) - halfline::g(b)) / F.distance(Param{a}, Param{b})});
    }
    if (n_max >= 2) c.facts.push_back({"d(0,2) = 1 + 3/4", 1.75, F.distance(Param{0.0}, Param{2.0})});
    return c;
}

// ---------------------------------------------------------------------------
// Cusp y^3 = x^2, parameterized by t -> (t^3, t^2)

inline std::shared_ptr<const FormulaSpace> cusp_formula() {
    return std::make_shared<FormulaSpace>(
        "cusp", std::map<std::string, double>{}, 1,
        [](std::span<const double> a, std::span<const double> b) {
            auto p = detail::cusp_point(a[0]), q = detail::cusp_point(b[0]);
            return detail::euclid(p[0], p[1], q[0], q[1]);
        },
        [](std::span<const double> p) { return detail::cusp_point(p[0]); });
}

inline double cusp_g(double t) { return t >= 0.0 ? t * t : -t * t; }

/// Curvature-adaptive parameters: step min(t^2/4, h_max) from t_min to 1,
/// mirrored, plus t = 0. Keeps B_t outside the finest ball around A_t.
inline std::vector<double> cusp_parameters(double t_min, double h_max = 0.02) {
    if (!(t_min > 0.0 && t_min < 1.0) || !(h_max > 0.0))
        throw Error(ErrorCode::InvalidArgument, "cusp sampling needs 0 < t_min < 1 and h_max > 0");
    std::vector<double> pos;
    for (double t = t_min; t < 1.0; t += std::min(t * t / 4.0, h_max)) pos.push_back(t);
    if (1.0 - pos.back() < 1e-3 * std::min(pos.back() * pos.back() / 4.0, h_max)) pos.pop_back();
    pos.push_back(1.0);
    std::vector<double> ts;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) ts.push_back(-*it);
    ts.push_back(0.0);
    ts.insert(ts.end(), pos.begin(), pos.end());
    return ts;
}

inline CorpusSpace build_cusp(const std::vector<double>& t_samples) {
    for (double t : t_samples)
        if (!(t >= -1.0 && t <= 1.0)) throw Error(ErrorCode::InvalidPoint, "cusp parameter must lie in [-1, 1]");
    CorpusSpace c{"cusp", cusp_formula(), {}, {}, {}};
    for (double t : t_samples) c.samples.push_back({t});
    c.fields.emplace("g", detail::field_from(c.samples, [](std::span<const double> p) { return cusp_g(p[0]); }));
    const auto& F = *c.formula;
    for (double t : {1e-1, 1e-2, 1e-3}) {
        double d = F.distance(Param{t}, Param{-t});
        c.facts.push_back({"d(A_t,B_t) = 2t^3, t=" + std::to_string(t), 2.0 * t * t * t, d});
        c.facts.push_back({"|g(A_t)-g(B_t)| = 2t^2, t=" + std::to_string(t), 2.0 * t * t,
                           std::abs(cusp_g(t) - cusp_g(-t))});
        c.facts.push_back({"|g(A_t)-g(B_t)|/d(A_t,B_t) = 1/t, t=" + std::to_string(t), 1.0 / t,
                           std::abs(cusp_g(t) - cusp_g(-t)) / d});
    }
    c.facts.push_back({"g(0,0) = 0", 0.0, cusp_g(0.0)});
    double t = 1e-3;
    c.facts.push_back({"|g(A_t)|/d(A_t,0) = 1/sqrt(1+t^2) -> Lip g(0,0) = 1, t=0.001", 1.0 / std::sqrt(1.0 + t * t),
                       std::abs(cusp_g(t)) / F.distance(Param{t}, Param{0.0})});
    return c;
}

/// Arc length of the cusp between B_t and A_t (parameters -t and t).
inline double cusp_arc_length(double t) {
    return (2.0 / 27.0) * (std::pow(9.0 * t * t + 4.0, 1.5) - 8.0);
}

// ---------------------------------------------------------------------------
// Comb X_0 u X_n u G. Parameters are (x, y, k): k = 0 on X_0, k >= 1 on X_k.

inline std::shared_ptr<const FormulaSpace> comb_formula(int n_arms) {
    return std::make_shared<FormulaSpace>(
        "comb", std::map<std::string, double>{{"n_arms", n_arms}}, 3,
        [](std::span<const double> a, std::span<const double> b) { return detail::euclid(a[0], a[1], b[0], b[1]); },
        detail::planar_xy());
}

/// f_n at a comb point: (k - y) / (k sqrt k) on X_k for 1 <= k <= n, else 0.
inline double comb_f(int n, std::span<const double> p) {
    const double k = p[2];
    if (k < 1.0 || k > n) return 0.0;
    return (k - p[1]) / (k * std::sqrt(k));
}

/// Arm k is sampled with spacing about 0.45 / (k (k + 1)), so twice the
/// spacing stays below the gap 1/(k (k + 1)) to the next arm. X_0 is cut at
/// height n_arms + 1. G meets the sample only at the arm tops (1/k, k).
inline CorpusSpace build_comb(int n_arms) {
    if (n_arms < 2) throw Error(ErrorCode::InvalidArgument, "comb needs at least two arms");
    CorpusSpace c{"comb", comb_formula(n_arms), {}, {}, {}};
    {
        double top = n_arms + 1.0;
        auto count = static_cast<long>(std::ceil(top / (0.4 / n_arms)));
        for (long j = 0; j <= count; ++j) c.samples.push_back({0.0, top * static_cast<double>(j) / count, 0.0});
    }
    for (int k = 1; k <= n_arms; ++k) {
        const double kd = k;
        auto count = static_cast<long>(std::ceil(kd / (0.45 / (kd * (kd + 1.0)))));
        for (long j = 0; j <= count; ++j) c.samples.push_back({1.0 / kd, kd * static_cast<double>(j) / count, kd});
    }
    for (int n = 1; n <= n_arms; ++n)
        c.fields.emplace("f_" + std::to_string(n),
                         detail::field_from(c.samples, [n](std::span<const double> p) { return comb_f(n, p); }));
    const auto& F = *c.formula;
    auto at = [](int k, double y) { return Param{1.0 / k, y, static_cast<double>(k)}; };
    for (int n = 2; n + 1 <= n_arms; ++n) {
        int m = n_arms;
        Param bottom = at(n + 1, 0.0), one_up = at(n + 1, 1.0);
        double diff_bottom = std::abs(comb_f(n, bottom) - comb_f(m, bottom));
        double diff_up = std::abs(comb_f(n, one_up) - comb_f(m, one_up));
        c.facts.push_back({"|f_n - f_m|_inf = 1/sqrt(n+1), n=" + std::to_string(n), 1.0 / std::sqrt(n + 1.0),
                           diff_bottom});
        c.facts.push_back({"|Lip(f_n - f_m)|_inf = 1/((n+1)sqrt(n+1)), n=" + std::to_string(n),
                           1.0 / ((n + 1.0) * std::sqrt(n + 1.0)),
                           std::abs(diff_bottom - diff_up) / F.distance(bottom, one_up)});
    }
    for (int n = 1; n <= n_arms; ++n)
        c.facts.push_back({"f_m(1/n,0) = 1/sqrt(n), m=" + std::to_string(n_arms) + ", n=" + std::to_string(n),
                           1.0 / std::sqrt(static_cast<double>(n)), comb_f(n_arms, at(n, 0.0))});
    return c;
}

/// |f(1/n, 0) - f(0, 0)| / d((1/n, 0), (0, 0)) for the pointwise limit f of f_m.
inline double comb_limit_quotient(int n) {
    auto F = comb_formula(n);
    Param p{1.0 / n, 0.0, static_cast<double>(n)}, origin{0.0, 0.0, 0.0};
    return std::abs(comb_f(n, p) - comb_f(n, origin)) / F->distance(p, origin);
}

// ---------------------------------------------------------------------------
// Sequence of disjoint open balls B_i with radii r_i = 2^{-(i-1)}/3.
// Parameters are (x, y, i).

inline std::shared_ptr<const FormulaSpace> ball_sequence_formula(int count) {
    return std::make_shared<FormulaSpace>(
        "ball_sequence", std::map<std::string, double>{{"count", count}}, 3,
        [](std::span<const double> a, std::span<const double> b) { return detail::euclid(a[0], a[1], b[0], b[1]); },
        detail::planar_xy());
}

inline double ball_sequence_radius(int i) { return std::ldexp(1.0 / 3.0, -(i - 1)); }

/// Centres on the x-axis; consecutive balls are separated by half the smaller radius.
inline double ball_sequence_center(int i) {
    double c = 0.0;
    for (int j = 1; j < i; ++j) c += ball_sequence_radius(j) + 1.5 * ball_sequence_radius(j + 1);
    return c;
}

/// Each ball holds its centre plus `rings` concentric rings of 6j points at
/// radius j r / (rings + 1).
inline CorpusSpace build_ball_sequence(int count, int rings) {
    if (count < 2 || rings < 1) throw Error(ErrorCode::InvalidArgument, "need at least two balls and one ring");
    CorpusSpace c{"ball_sequence", ball_sequence_formula(count), {}, {}, {}};
    for (int i = 1; i <= count; ++i) {
        double r = ball_sequence_radius(i), cx = ball_sequence_center(i);
        c.samples.push_back({cx, 0.0, static_cast<double>(i)});
        for (int j = 1; j <= rings; ++j) {
            double rho = r * j / (rings + 1.0);
            for (int l = 0; l < 6 * j; ++l) {
                double a = 2.0 * std::numbers::pi * l / (6.0 * j);
                c.samples.push_back({cx + rho * std::cos(a), rho * std::sin(a), static_cast<double>(i)});
            }
        }
    }
    c.fields.emplace("parity", detail::field_from(c.samples, [](std::span<const double> p) {
                         return static_cast<long>(p[2]) % 2 == 1 ? 1.0 : 0.0;
                     }));
    for (int i = 1; i < count; ++i) {
        double gap = ball_sequence_center(i + 1) - ball_sequence_radius(i + 1) -
                     (ball_sequence_center(i) + ball_sequence_radius(i));
        c.facts.push_back({"gap between B_" + std::to_string(i) + " and B_" + std::to_string(i + 1) + " = r_{i+1}/2",
                           ball_sequence_radius(i + 1) / 2.0, gap});
    }
    return c;
}

/// Each ball becomes a clique (edge length = Euclidean distance); balls stay disconnected.
inline WeightedGraph ball_sequence_graph(const CorpusSpace& c) {
    const auto n = c.samples.size();
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (c.samples[a][2] == c.samples[b][2])
                edges.push_back({a, b, c.formula->distance(c.samples[a], c.samples[b])});
    return WeightedGraph(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Slit plane C \ {Re z >= 0, |Im z| <= 1/2}. Parameters are (|z|, arg z),
// arg in (0, 2 pi) measured from the positive real axis.

inline bool in_slit_plane(double radius, double theta) {
    double x = radius * std::cos(theta), y = radius * std::sin(theta);
    return !(x >= 0.0 && std::abs(y) <= 0.5);
}

inline std::shared_ptr<const FormulaSpace> slit_plane_formula() {
    auto xy = [](std::span<const double> p) {
        return std::array<double, 2>{p[0] * std::cos(p[1]), p[0] * std::sin(p[1])};
    };
    return std::make_shared<FormulaSpace>(
        "slit_plane", std::map<std::string, double>{}, 2,
        [xy](std::span<const double> a, std::span<const double> b) {
            auto p = xy(a), q = xy(b);
            return detail::euclid(p[0], p[1], q[0], q[1]);
        },
        xy);
}

/// Polar samples theta_j = 2 pi (j + 1/2) / angular on each radius, keeping those in X.
inline CorpusSpace build_slit_plane(const std::vector<double>& radii, int angular) {
    if (radii.empty() || angular < 4) throw Error(ErrorCode::InvalidArgument, "need radii and >= 4 angular samples");
    CorpusSpace c{"slit_plane", slit_plane_formula(), {}, {}, {}};
    for (double R : radii) {
        if (!(R > 0.0)) throw Error(ErrorCode::InvalidPoint, "slit-plane radii must be positive");
        for (int j = 0; j < angular; ++j) {
            double theta = 2.0 * std::numbers::pi * (j + 0.5) / angular;
            if (in_slit_plane(R, theta)) c.samples.push_back({R, theta});
        }
    }
    c.fields.emplace("arg", detail::field_from(c.samples, [](std::span<const double> p) { return p[1]; }));
    const auto& F = *c.formula;
    c.facts.push_back({"arg(-1) = pi", std::numbers::pi, Param{1.0, std::numbers::pi}[1]});
    for (double R : {2.0, 8.0, 32.0}) {
        double lo = std::asin(0.5 / R), hi = 2.0 * std::numbers::pi - lo;
        c.facts.push_back({"arg jump across the slit faces at |z|=" + std::to_string(R) + " over distance 1",
                           2.0 * std::numbers::pi - 2.0 * lo, (hi - lo) / F.distance(Param{R, lo}, Param{R, hi})});
        double h = 1e-6;
        c.facts.push_back({"Lip arg at |z|=" + std::to_string(R) + " = 1/|z|", 1.0 / R,
                           h / F.distance(Param{R, std::numbers::pi}, Param{R, std::numbers::pi + h})});
    }
    return c;
}

// ---------------------------------------------------------------------------
// Y = [-1, 1] with the cusp metric broken at the origin, and the cusp with an
// attached half-open segment.

inline std::shared_ptr<const FormulaSpace> cusp_reparam_formula() {
    return std::make_shared<FormulaSpace>(
        "cusp_reparam", std::map<std::string, double>{}, 1, [](std::span<const double> a, std::span<const double> b) {
            auto p = detail::cusp_point(a[0]), q = detail::cusp_point(b[0]);
            if ((a[0] <= 0.0 && b[0] <= 0.0) || (a[0] >= 0.0 && b[0] >= 0.0))
                return detail::euclid(p[0], p[1], q[0], q[1]);
            return std::hypot(p[0], p[1]) + std::hypot(q[0], q[1]);
        });
}

inline CorpusSpace build_cusp_reparam(const std::vector<double>& t_samples) {
    CorpusSpace c{"cusp_reparam", cusp_reparam_formula(), {}, {}, {}};
    for (double t : t_samples) {
        if (!(t >= -1.0 && t <= 1.0)) throw Error(ErrorCode::InvalidPoint, "parameter must lie in [-1, 1]");
        c.samples.push_back({t});
    }
    c.fields.emplace("t", detail::field_from(c.samples, [](std::span<const double> p) { return p[0]; }));
    auto cusp = cusp_formula();
    double t = 0.1;
    c.facts.push_back({"d'(-t,t) = 2|A_t| while d(A_t,B_t) = 2t^3, t=0.1",
                       2.0 * t * t * std::sqrt(1.0 + t * t), c.formula->distance(Param{-t}, Param{t})});
    c.facts.push_back({"d(A_t,B_t) = 2t^3, t=0.1", 2.0 * t * t * t, cusp->distance(Param{-t}, Param{t})});
    return c;
}

/// Parameters (part, s): part 0 is the cusp point (s^3, s^2), part 1 is (s, 1).
inline std::shared_ptr<const FormulaSpace> cusp_union_segment_formula(bool complete) {
    auto xy = [](std::span<const double> p) {
        return p[0] == 0.0 ? detail::cusp_point(p[1]) : std::array<double, 2>{p[1], 1.0};
    };
    return std::make_shared<FormulaSpace>(
        "cusp_union_segment", std::map<std::string, double>{{"complete", complete ? 1.0 : 0.0}}, 2,
        [xy](std::span<const double> a, std::span<const double> b) {
            auto p = xy(a), q = xy(b);
            return detail::euclid(p[0], p[1], q[0], q[1]);
        },
        xy);
}

/// A u B with B = [1, 2) x {1}; the completion adds (2, 1). B starts at the
/// shared point (1, 1) = A_1, so its samples begin one step past x = 1.
inline CorpusSpace build_cusp_union_segment(int cusp_samples, int segment_samples, bool complete) {
    if (cusp_samples < 2 || segment_samples < 2)
        throw Error(ErrorCode::InvalidArgument, "need at least two samples per part");
    CorpusSpace c{"cusp_union_segment", cusp_union_segment_formula(complete), {}, {}, {}};
    for (int j = 0; j < cusp_samples; ++j) c.samples.push_back({0.0, -1.0 + 2.0 * j / (cusp_samples - 1.0)});
    for (int j = 1; j < segment_samples; ++j) c.samples.push_back({1.0, 1.0 + static_cast<double>(j) / segment_samples});
    if (complete) c.samples.push_back({1.0, 2.0});
    c.fields.emplace("x", detail::field_from(c.samples, [](std::span<const double> p) {
                         return p[0] == 0.0 ? p[1] * p[1] * p[1] : p[1];
                     }));
    c.facts.push_back({"d(A_1, (2,1)) = 1", 1.0, c.formula->distance(Param{0.0, 1.0}, Param{1.0, 2.0})});
    return c;
}

// ---------------------------------------------------------------------------
// Registry

inline std::vector<std::string> corpus_names() {
    return {"ball_sequence", "comb", "cusp", "cusp_reparam", "cusp_union_segment", "halfline", "slit_plane"};
}

/// The exact formula of a named corpus space, as recorded in a space file.
inline std::shared_ptr<const FormulaSpace> corpus_formula(const std::string& name,
                                                          const std::map<std::string, double>& params) {
    using detail::param;
    if (name == "halfline") return halfline_formula(static_cast<int>(param(params, "n_max", 1)));
    if (name == "cusp") return cusp_formula();
    if (name == "comb") return comb_formula(static_cast<int>(param(params, "n_arms", 2)));
    if (name == "ball_sequence") return ball_sequence_formula(static_cast<int>(param(params, "count", 2)));
    if (name == "slit_plane") return slit_plane_formula();
    if (name == "cusp_reparam") return cusp_reparam_formula();
    if (name == "cusp_union_segment") return cusp_union_segment_formula(param(params, "complete", 0.0) != 0.0);
    throw Error(ErrorCode::Schema, "unknown corpus space '" + name + "'");
}

/// Build a corpus space from loose numeric options; missing options take
/// desk-scale defaults.
inline CorpusSpace build_corpus(const std::string& name, const std::map<std::string, double>& opt) {
    using detail::param;
    auto as_int = [&](const char* key, double fallback) { return static_cast<int>(param(opt, key, fallback)); };
    if (name == "halfline") return build_halfline(as_int("n_max", 20), as_int("samples", 50));
    if (name == "cusp") return build_cusp(cusp_parameters(param(opt, "t_min", 1e-3), param(opt, "h_max", 0.02)));
    if (name == "comb") return build_comb(as_int("n_arms", 6));
    if (name == "ball_sequence") return build_ball_sequence(as_int("count", 6), as_int("rings", 2));
    if (name == "slit_plane") {
        std::vector<double> radii;
        int rings = as_int("rings", 8);
        double r_max = param(opt, "r_max", 4.0);
        for (int j = 1; j <= rings; ++j) radii.push_back(r_max * j / rings);
        return build_slit_plane(radii, as_int("angular", 64));
    }
    if (name == "cusp_reparam") return build_cusp_reparam(cusp_parameters(param(opt, "t_min", 1e-2)));
    if (name == "cusp_union_segment")
        return build_cusp_union_segment(as_int("samples", 41), as_int("samples", 41), param(opt, "complete", 0.0) != 0.0);
    throw Error(ErrorCode::InvalidArgument, "unknown corpus space '" + name + "'");
}

}  // namespace metricgeo
