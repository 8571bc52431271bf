#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "convex.hpp"
#include "curves.hpp"
#include "detail/parallel.hpp"
#include "error.hpp"
#include "lipschitz.hpp"
#include "metric_space.hpp"

namespace metricgeo {

// ---------------------------------------------------------------------------
// Hajlasz gradients: |f(x) - f(y)| <= d(x,y) (g(x) + g(y)) for all pairs.

struct HajlaszResult {
    ScalarField g;
    double value = 0.0;             // ||g||_inf, ||g||_1 or ||g||_2
    double max_violation = 0.0;     // max over pairs of s(x,y) - g(x) - g(y), clipped at 0
    double complementarity = 0.0;   // max |multiplier * slack| (p = 2 only)
};

namespace detail {

struct PairSlope {
    PointId x, y;
    double s;  // |f(x) - f(y)| / d(x, y)
};

inline std::vector<PairSlope> pair_slopes(const MetricSpace& space, const ScalarField& f) {
    check_field(space, f);
    const std::size_t n = space.size();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "Hajlasz gradients need at least two points");
    std::vector<std::vector<PairSlope>> rows(n);
    detail::parallel_for(n, [&](std::size_t x) {
        auto dist = space.distances_from(x);
        for (std::size_t y = x + 1; y < n; ++y) {
            if (!(dist[y] > 0.0))
                throw Error(ErrorCode::DegenerateMetric, "points " + std::to_string(x) + " and " + std::to_string(y) +
                                                             " are at zero distance");
            if (!std::isfinite(dist[y])) throw Error(ErrorCode::Unreachable, "space is disconnected");
            rows[x].push_back({x, y, std::abs(f[x] - f[y]) / dist[y]});
        }
    });
    std::vector<PairSlope> out;
    for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

inline double hajlasz_violation(const std::vector<PairSlope>& pairs, const ScalarField& g) {
    double worst = 0.0;
    for (const auto& p : pairs) worst = std::max(worst, p.s - g[p.x] - g[p.y]);
    return worst;
}

}  // namespace detail

/// Minimal sup-norm Hajlasz gradient. The constant t is feasible iff every
/// pair slope is at most 2t, so the optimum is LIP(f)/2, attained by g = LIP(f)/2.
inline HajlaszResult minimal_hajlasz_gradient_inf(const MetricSpace& space, const ScalarField& f) {
    auto pairs = detail::pair_slopes(space, f);
    double lip = 0.0;
    for (const auto& p : pairs) lip = std::max(lip, p.s);
    HajlaszResult r;
    r.value = lip / 2.0;
    r.g = ScalarField::constant(space.size(), r.value);
    r.max_violation = std::max(0.0, detail::hajlasz_violation(pairs, r.g));
    return r;
}

/// Minimal L^p(mu) Hajlasz gradient for p in {1, 2}: a covering LP for p = 1,
/// least-distance programming for p = 2.
inline HajlaszResult minimal_hajlasz_gradient_p(const MetricSpace& space, const ScalarField& f, const Measure& mu,
                                                int p) {
    if (p != 1 && p != 2)
        throw Error(ErrorCode::UnsupportedExponent, "Hajlasz p-gradients support p = 1 or 2");
    if (mu.size() != space.size()) throw Error(ErrorCode::InvalidArgument, "measure size does not match the space");
    for (double w : mu.weights())
        if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "Hajlasz p-gradients need a strictly positive measure");
    auto all = detail::pair_slopes(space, f);
    std::vector<detail::PairSlope> pairs;
    for (const auto& ps : all)
        if (ps.s > 0.0) pairs.push_back(ps);
    const auto n = static_cast<Eigen::Index>(space.size());
    const auto m = static_cast<Eigen::Index>(pairs.size());
    std::vector<double> g(space.size(), 0.0);
    HajlaszResult r;
    if (m > 0) {
        convex::Matrix A = convex::Matrix::Zero(m, n);
        convex::Vector b(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& ps = pairs[static_cast<std::size_t>(i)];
            A(i, static_cast<Eigen::Index>(ps.x)) = 1.0;
            A(i, static_cast<Eigen::Index>(ps.y)) = 1.0;
            b[i] = ps.s;
        }
        if (p == 1) {
            convex::Vector c(n);
            for (Eigen::Index k = 0; k < n; ++k) c[k] = mu[static_cast<std::size_t>(k)];
            auto lp = convex::solve_covering_lp(A, b, c);
            for (Eigen::Index k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = lp.x[k];
        } else {
            convex::Vector inv_sqrt(n);
            for (Eigen::Index k = 0; k < n; ++k) {
                inv_sqrt[k] = 1.0 / std::sqrt(mu[static_cast<std::size_t>(k)]);
                A.col(k) *= inv_sqrt[k];
            }
            auto ld = convex::least_distance(A, b);
            for (Eigen::Index k = 0; k < n; ++k)
                g[static_cast<std::size_t>(k)] = std::max(0.0, ld.x[k] * inv_sqrt[k]);
            convex::Vector slack = A * ld.x - b;
            for (Eigen::Index i = 0; i < m; ++i)
                r.complementarity = std::max(r.complementarity, std::abs(ld.multipliers[i] * slack[i]));
        }
    }
    r.g = ScalarField(std::move(g));
    double total = 0.0;
    for (std::size_t k = 0; k < space.size(); ++k) total += mu[k] * std::pow(r.g[k], p);
    r.value = p == 1 ? total : std::sqrt(total);
    r.max_violation = std::max(0.0, detail::hajlasz_violation(all, r.g));
    return r;
}

// ---------------------------------------------------------------------------
// Upper gradients

/// Curves with |f(end) - f(start)| > integral of g along the curve + tau.
inline std::vector<CurveViolation> verify_upper_gradient(const MetricSpace& space, const ScalarField& f,
                                                         const Density& g, const std::vector<Curve>& curves,
                                                         double tau) {
    check_field(space, f);
    std::vector<CurveViolation> out;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        double inc = std::abs(f[curves[i].back()] - f[curves[i].front()]);
        double integral = line_integral(space, curves[i], g);
        if (inc > integral + tau) out.push_back({i, inc, integral});
    }
    return out;
}

/// Minimal edge upper gradient |f(u) - f(v)| / l(e), rounded upward so that
/// g(e) * l(e) never falls below |f(u) - f(v)| in floating point.
inline Density edge_gradient(const WeightedGraph& graph, const ScalarField& f) {
    if (f.size() != graph.size()) throw Error(ErrorCode::InvalidArgument, "field size does not match the graph");
    std::vector<double> g(graph.edge_count());
    for (std::size_t id = 0; id < g.size(); ++id) {
        const Edge& e = graph.edge(id);
        double diff = std::abs(f[e.u] - f[e.v]);
        double q = diff / e.length;
        while (q * e.length < diff) q = std::nextafter(q, kInfinity);
        g[id] = q;
    }
    return Density(DensityLocation::Edge, std::move(g));
}

/// Vertex gradient: max over incident edges of the edge gradient.
inline std::vector<double> vertex_gradient(const WeightedGraph& graph, const ScalarField& f) {
    auto eg = edge_gradient(graph, f);
    std::vector<double> out(graph.size(), 0.0);
    for (std::size_t id = 0; id < graph.edge_count(); ++id) {
        const Edge& e = graph.edge(id);
        out[e.u] = std::max(out[e.u], eg[id]);
        out[e.v] = std::max(out[e.v], eg[id]);
    }
    return out;
}

struct NewtonianReport {
    double value = 0.0;                  // max edge slope
    std::optional<std::size_t> argmax_edge;
    std::vector<double> per_component;   // max edge slope within each component
    bool connected = true;
};

/// Discrete N^{1,inf} seminorm: single edges force g(e) >= |df|/l(e) and that
/// edge gradient is an upper gradient of every walk by telescoping.
inline NewtonianReport newtonian_seminorm_inf(const WeightedGraph& graph, const ScalarField& f) {
    if (f.size() != graph.size()) throw Error(ErrorCode::InvalidArgument, "field size does not match the graph");
    NewtonianReport rep;
    auto label = graph.components();
    std::size_t comps = graph.size() == 0 ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    rep.per_component.assign(comps, 0.0);
    rep.connected = comps <= 1;
    for (std::size_t id = 0; id < graph.edge_count(); ++id) {
        const Edge& e = graph.edge(id);
        double s = std::abs(f[e.u] - f[e.v]) / e.length;
        rep.per_component[label[e.u]] = std::max(rep.per_component[label[e.u]], s);
        if (!rep.argmax_edge || s > rep.value) {
            rep.value = s;
            rep.argmax_edge = id;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Doubling and Poincare estimates

namespace detail {

inline double mass(const Measure& mu, const std::vector<PointId>& pts) {
    double total = 0.0;
    for (auto p : pts) total += mu[p];
    return total;
}

}  // namespace detail

struct DoublingRow {
    PointId center;
    double r;
    double mass_r;
    double mass_2r;
    double ratio;
};

struct DoublingReport {
    double estimate = 0.0;
    std::vector<DoublingRow> rows;
    std::vector<std::pair<PointId, double>> zero_mass_balls;  // excluded (center, r)
};

/// max over tested balls of mu(B(x, 2r)) / mu(B(x, r)).
inline DoublingReport doubling_constant(const MetricSpace& space, const Measure& mu,
                                        const std::vector<PointId>& centers, const std::vector<double>& radii) {
    if (mu.size() != space.size()) throw Error(ErrorCode::InvalidArgument, "measure size does not match the space");
    DoublingReport rep;
    std::vector<DoublingRow> rows(centers.size() * radii.size());
    detail::parallel_for(rows.size(), [&](std::size_t cell) {
        PointId x = centers[cell / radii.size()];
        double r = radii[cell % radii.size()];
        double small = detail::mass(mu, ball(space, x, r));
        double big = detail::mass(mu, ball(space, x, 2.0 * r));
        rows[cell] = {x, r, small, big, small > 0.0 ? big / small : kInfinity};
    });
    for (const auto& row : rows) {
        if (!(row.mass_r > 0.0)) {
            rep.zero_mass_balls.emplace_back(row.center, row.r);
            continue;
        }
        rep.estimate = std::max(rep.estimate, row.ratio);
        rep.rows.push_back(row);
    }
    if (rep.rows.empty() && rep.zero_mass_balls.empty()) rep.estimate = 0.0;
    return rep;
}

struct TestFunction {
    std::string name;
    ScalarField values;
};

enum class PoincareStatus { Ok, Skipped, FailureWitness, ZeroMass };

inline std::string_view to_string(PoincareStatus s) {
    switch (s) {
        case PoincareStatus::Ok: return "ok";
        case PoincareStatus::Skipped: return "skipped";
        case PoincareStatus::FailureWitness: return "failure_witness";
        case PoincareStatus::ZeroMass: return "zero_mass";
    }
    return "?";
}

struct PoincareRow {
    std::string function;
    PointId center;
    double r;
    double lhs;       // mu-average of |u - u_B| over B(x, r)
    double rhs_core;  // (mu-average of g^p over B(x, lambda r))^(1/p)
    double ratio;     // lhs / (r * rhs_core)
    PoincareStatus status;
};

/// Sampled weak p-Poincare constant. Falsification/estimation only: the
/// inequality is tested on the supplied functions and balls.
struct PoincareEstimate {
    double estimate = 0.0;
    double p = 1.0;
    double lambda = 1.0;
    std::vector<PoincareRow> rows;
    bool failure_witness = false;
    std::string test_functions;
};

/// Balls are taken in `space`; gradients come from the walks of `graph`
/// (same point set), mapped to vertices by the max over incident edges.
inline PoincareEstimate poincare_constant(const MetricSpace& space, const WeightedGraph& graph, const Measure& mu,
                                          double p, double lambda, const std::vector<TestFunction>& functions,
                                          const std::vector<PointId>& centers, const std::vector<double>& radii) {
    if (!(lambda >= 1.0)) throw Error(ErrorCode::InvalidDilation, "lambda must be at least 1");
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::UnsupportedExponent, "p must be finite and >= 1");
    if (graph.size() != space.size() || mu.size() != space.size())
        throw Error(ErrorCode::InvalidArgument, "space, graph and measure must share the point set");
    PoincareEstimate est;
    est.p = p;
    est.lambda = lambda;
    for (const auto& tf : functions) est.test_functions += (est.test_functions.empty() ? "" : ",") + tf.name;

    // Ball membership does not depend on the test function.
    const std::size_t cells = centers.size() * radii.size();
    std::vector<std::vector<PointId>> inner(cells), outer(cells);
    detail::parallel_for(cells, [&](std::size_t c) {
        PointId x = centers[c / radii.size()];
        double r = radii[c % radii.size()];
        inner[c] = ball(space, x, r);
        outer[c] = ball(space, x, lambda * r);
    });
    for (const auto& tf : functions) {
        check_field(space, tf.values);
        auto g = vertex_gradient(graph, tf.values);
        const auto& u = tf.values;
        for (std::size_t c = 0; c < cells; ++c) {
            PoincareRow row{tf.name, centers[c / radii.size()], radii[c % radii.size()], 0.0, 0.0, 0.0,
                            PoincareStatus::Ok};
            double m_in = detail::mass(mu, inner[c]);
            double m_out = detail::mass(mu, outer[c]);
            if (!(m_in > 0.0) || !(m_out > 0.0)) {
                row.status = PoincareStatus::ZeroMass;
                est.rows.push_back(row);
                continue;
            }
            double avg = 0.0;
            for (auto y : inner[c]) avg += mu[y] * u[y];
            avg /= m_in;
            for (auto y : inner[c]) row.lhs += mu[y] * std::abs(u[y] - avg);
            row.lhs /= m_in;
            for (auto y : outer[c]) row.rhs_core += mu[y] * std::pow(g[y], p);
            row.rhs_core = std::pow(row.rhs_core / m_out, 1.0 / p);
            if (row.rhs_core == 0.0) {
                // Round-off in the average can leave a tiny lhs on constant data.
                bool constant = std::all_of(inner[c].begin(), inner[c].end(), [&](PointId y) { return u[y] == u[inner[c].front()]; });
                if (row.lhs == 0.0 || constant) {
                    row.status = PoincareStatus::Skipped;
                } else {
                    row.status = PoincareStatus::FailureWitness;
                    row.ratio = kInfinity;
                    est.failure_witness = true;
                }
            } else {
                row.ratio = row.lhs / (row.r * row.rhs_core);
                est.estimate = std::max(est.estimate, row.ratio);
            }
            est.rows.push_back(row);
        }
    }
    return est;
}

/// Graph-only form: balls use the graph's own shortest-path metric.
inline PoincareEstimate poincare_constant(const WeightedGraph& graph, const Measure& mu, double p, double lambda,
                                          const std::vector<TestFunction>& functions,
                                          const std::vector<PointId>& centers, const std::vector<double>& radii) {
    return poincare_constant(MetricSpace::from_graph(graph), graph, mu, p, lambda, functions, centers, radii);
}

namespace detail {

// Deterministic uniform [0,1) from a 64-bit Mersenne twister.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Default test family: distance-to-point functions, planar coordinates when
/// the space has them, and `random_count` seeded random smooth fields
/// u = sum_k a_k cos(w_k d(z_k, .) + phi_k).
inline std::vector<TestFunction> default_test_functions(const MetricSpace& space, std::uint64_t seed,
                                                        std::size_t random_count = 20) {
    std::vector<TestFunction> out;
    const std::size_t n = space.size();
    const std::size_t anchors = std::min<std::size_t>(n, 3);
    for (std::size_t k = 0; k < anchors; ++k) {
        PointId z = anchors == 1 ? 0 : k * (n - 1) / (anchors - 1);
        out.push_back({"dist_" + std::to_string(z), ScalarField(space.distances_from(z))});
    }
    if (const auto* f = space.formula(); f && f->embedding()) {
        std::vector<double> xs, ys;
        for (const auto& prm : space.parameters()) {
            auto c = (*f->embedding())(prm);
            xs.push_back(c[0]);
            ys.push_back(c[1]);
        }
        out.push_back({"coord_x", ScalarField(std::move(xs))});
        out.push_back({"coord_y", ScalarField(std::move(ys))});
    }
    std::mt19937_64 rng(seed);
    double scale = 0.0;
    for (const auto& tf : out)
        if (tf.name.rfind("dist_", 0) == 0)
            for (double v : tf.values.values()) scale = std::max(scale, v);
    if (!(scale > 0.0)) scale = 1.0;
    for (std::size_t k = 0; k < random_count; ++k) {
        std::vector<double> u(n, 0.0);
        for (int term = 0; term < 3; ++term) {
            PointId z = std::min<PointId>(n - 1, static_cast<PointId>(detail::unit(rng) * static_cast<double>(n)));
            double a = 2.0 * detail::unit(rng) - 1.0;
            double w = (0.5 + 2.5 * detail::unit(rng)) * std::numbers::pi / scale;
            double phi = 2.0 * std::numbers::pi * detail::unit(rng);
            auto dz = space.distances_from(z);
            for (std::size_t i = 0; i < n; ++i) u[i] += a * std::cos(w * dz[i] + phi);
        }
        out.push_back({"random_" + std::to_string(k), ScalarField(std::move(u))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Norm chain N^{1,inf} <= D^inf <= LIP^inf <= 2 M^{1,inf} (seminorm parts)

struct NormChainReport {
    double newtonian_inf_seminorm = 0.0;
    double d_inf_lip_sup = 0.0;
    double lip_constant = 0.0;
    double m_inf_seminorm = 0.0;
    double slack = 0.0;  // absolute slack allowed in the two sampled inequalities
    bool newtonian_le_d = false;
    bool d_le_lip = false;
    bool lip_eq_twice_hajlasz = false;
    bool strict_gap = false;  // LIP exceeds sup Lip beyond the slack
    LipConstant lip_witness;
    SupLip lip_sup_point;

    bool ok() const { return newtonian_le_d && d_le_lip && lip_eq_twice_hajlasz; }
};

/// The Newtonian entry uses the eps-graph of the space at `walk_resolution`.
/// `relative_slack` absorbs sampling error in the two sampled inequalities.
inline NormChainReport norm_chain_report(const MetricSpace& space, const ScalarField& f,
                                         const SchedulePolicy& policy, double walk_resolution,
                                         double relative_slack = 0.02) {
    check_field(space, f);
    NormChainReport rep;
    rep.newtonian_inf_seminorm = newtonian_seminorm_inf(epsilon_graph(space, walk_resolution), f).value;
    rep.lip_sup_point = sup_lip(lip_field(space, f, policy));
    rep.d_inf_lip_sup = rep.lip_sup_point.value;
    rep.lip_witness = global_lip_constant(space, f);
    rep.lip_constant = rep.lip_witness.value;
    rep.m_inf_seminorm = minimal_hajlasz_gradient_inf(space, f).value;
    rep.slack = relative_slack * std::max({rep.newtonian_inf_seminorm, rep.d_inf_lip_sup, rep.lip_constant});
    rep.newtonian_le_d = rep.newtonian_inf_seminorm <= rep.d_inf_lip_sup + rep.slack;
    rep.d_le_lip = rep.d_inf_lip_sup <= rep.lip_constant + rep.slack;
    rep.lip_eq_twice_hajlasz = std::abs(rep.lip_constant - 2.0 * rep.m_inf_seminorm) <= 1e-12 * std::max(1.0, rep.lip_constant);
    rep.strict_gap = rep.lip_constant > rep.d_inf_lip_sup + rep.slack;
    return rep;
}

}  // namespace metricgeo
