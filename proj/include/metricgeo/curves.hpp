#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "detail/parallel.hpp"
#include "error.hpp"
#include "lipschitz.hpp"
#include "metric_space.hpp"

namespace metricgeo {

/// Finite polyline through points of a space. On a WeightedGraph consecutive
/// points must be adjacent; elsewhere they are joined virtually.
class Curve {
public:
    Curve() = default;
    explicit Curve(std::vector<PointId> points) : points_(std::move(points)) {
        if (points_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a curve needs at least two points");
        for (std::size_t i = 0; i + 1 < points_.size(); ++i)
            if (points_[i] == points_[i + 1])
                throw Error(ErrorCode::InvalidArgument, "curve repeats point " + std::to_string(points_[i]) +
                                                            " consecutively");
    }

    const std::vector<PointId>& points() const { return points_; }
    PointId front() const { return points_.front(); }
    PointId back() const { return points_.back(); }
    std::size_t size() const { return points_.size(); }

private:
    std::vector<PointId> points_;
};

enum class DensityLocation { Edge, Vertex };

/// Nonnegative density on edges or vertices; +inf is an allowed value.
class Density {
public:
    Density(DensityLocation where, std::vector<double> values) : where_(where), values_(std::move(values)) {
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (std::isnan(values_[i]) || values_[i] < 0.0)
                throw Error(ErrorCode::InvalidDensity, "density value " + std::to_string(i) + " is negative or NaN");
    }

    DensityLocation location() const { return where_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

private:
    DensityLocation where_;
    std::vector<double> values_;
};

namespace detail {

inline void check_curve(const MetricSpace& space, const Curve& curve) {
    for (PointId p : curve.points()) space.check_point(p);
}

// Length of step i of the curve: the traversed edge on graphs, d elsewhere.
inline double step_length(const MetricSpace& space, PointId a, PointId b, std::size_t* edge_out = nullptr) {
    if (const auto* g = space.graph()) {
        auto id = g->find_edge(a, b);
        if (!id)
            throw Error(ErrorCode::InvalidArgument,
                        "curve step " + std::to_string(a) + "->" + std::to_string(b) + " is not a graph edge");
        if (edge_out) *edge_out = *id;
        return g->edge(*id).length;
    }
    return space.distance(a, b);
}

// inf * 0 would be NaN; an infinite density on a positive-length step is infinite.
inline double weighted(double rho, double len) { return std::isinf(rho) ? kInfinity : rho * len; }

}  // namespace detail

/// Sum of consecutive step lengths (the vertex partition attains the sup for a polyline).
inline double curve_length(const MetricSpace& space, const Curve& curve) {
    detail::check_curve(space, curve);
    double total = 0.0;
    const auto& p = curve.points();
    for (std::size_t i = 0; i + 1 < p.size(); ++i) total += detail::step_length(space, p[i], p[i + 1]);
    return total;
}

/// Integral of rho along the curve; +inf when rho is infinite on the curve's support.
/// Edge densities sum rho(e) * l(e); vertex densities use the trapezoidal rule.
inline double line_integral(const MetricSpace& space, const Curve& curve, const Density& rho) {
    detail::check_curve(space, curve);
    const auto& p = curve.points();
    double total = 0.0;
    if (rho.location() == DensityLocation::Edge) {
        const auto* g = space.graph();
        if (!g) throw Error(ErrorCode::InvalidDensity, "edge densities need a weighted graph");
        if (rho.size() != g->edge_count()) throw Error(ErrorCode::InvalidDensity, "edge density size mismatch");
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            std::size_t id = 0;
            double len = detail::step_length(space, p[i], p[i + 1], &id);
            total += detail::weighted(rho[id], len);
        }
        return total;
    }
    if (rho.size() != space.size()) throw Error(ErrorCode::InvalidDensity, "vertex density size mismatch");
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        double len = detail::step_length(space, p[i], p[i + 1]);
        total += detail::weighted(0.5 * (rho[p[i]] + rho[p[i + 1]]), len);
    }
    return total;
}

/// Edge-density integral along a graph walk.
inline double line_integral(const WeightedGraph& graph, const Path& walk, std::span<const double> edge_rho) {
    double total = 0.0;
    for (std::size_t id : walk.edges) total += detail::weighted(edge_rho[id], graph.edge(id).length);
    return total;
}

// ---------------------------------------------------------------------------
// Chains

/// z_1 = x, ..., z_l = y with d(z_i, z_{i+1}) < eps.
struct Chain {
    std::vector<PointId> nodes;
    double eps = 0.0;

    std::size_t node_count() const { return nodes.size(); }
};

namespace detail {

inline std::vector<PointId> eps_neighbors(const MetricSpace& space, PointId x, double eps) {
    std::vector<PointId> out;
    for (const auto& nb : space.within(x, eps))
        if (nb.distance > 0.0 && nb.distance < eps) out.push_back(nb.id);
    return out;
}

}  // namespace detail

/// Minimal-node eps-chain from x to y (lexicographically smallest among the
/// minimal ones), or nullopt when x and y lie in different eps-components.
inline std::optional<Chain> epsilon_chain(const MetricSpace& space, PointId x, PointId y, double eps) {
    space.check_point(x);
    space.check_point(y);
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (x == y) return Chain{{x}, eps};
    constexpr std::size_t unseen = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> hops(space.size(), unseen);
    std::vector<std::vector<PointId>> adjacency(space.size());
    std::vector<bool> expanded(space.size(), false);
    auto neighbors = [&](PointId v) -> const std::vector<PointId>& {
        if (!expanded[v]) {
            adjacency[v] = detail::eps_neighbors(space, v, eps);
            expanded[v] = true;
        }
        return adjacency[v];
    };
    // Hop counts from y, stopping once x is reached.
    std::deque<PointId> queue{y};
    hops[y] = 0;
    while (!queue.empty() && hops[x] == unseen) {
        PointId u = queue.front();
        queue.pop_front();
        for (PointId w : neighbors(u))
            if (hops[w] == unseen) {
                hops[w] = hops[u] + 1;
                queue.push_back(w);
            }
    }
    if (hops[x] == unseen) return std::nullopt;
    Chain chain{{x}, eps};
    PointId cur = x;
    while (cur != y) {
        PointId next = unseen;
        for (PointId w : neighbors(cur))
            if (hops[w] + 1 == hops[cur]) {
                next = w;  // neighbours are sorted by id
                break;
            }
        chain.nodes.push_back(next);
        cur = next;
    }
    return chain;
}

struct QuasiLengthRow {
    PointId x, y;
    double eps;
    std::size_t ell;  // minimal node count
    double d;
    double ratio;  // (ell - 1) eps / (d + eps)
};

/// Lower bound on the quasi-length constant over the tested pairs and eps values.
struct QuasiLengthReport {
    std::vector<QuasiLengthRow> rows;
    double k_lower_bound = 0.0;
    double eps_min = kInfinity;
    double eps_max = 0.0;
};

inline QuasiLengthReport quasi_length_constant(const MetricSpace& space,
                                               const std::vector<std::pair<PointId, PointId>>& pairs,
                                               const std::vector<double>& eps_list) {
    QuasiLengthReport rep;
    std::vector<QuasiLengthRow> rows(pairs.size() * eps_list.size());
    detail::parallel_for(rows.size(), [&](std::size_t cell) {
        auto [x, y] = pairs[cell / eps_list.size()];
        double eps = eps_list[cell % eps_list.size()];
        auto chain = epsilon_chain(space, x, y, eps);
        if (!chain)
            throw Error(ErrorCode::NoChain, "no eps-chain between " + std::to_string(x) + " and " +
                                                std::to_string(y) + " at eps=" + std::to_string(eps));
        double d = space.distance(x, y);
        double ell = static_cast<double>(chain->node_count());
        rows[cell] = {x, y, eps, chain->node_count(), d, (ell - 1.0) * eps / (d + eps)};
    });
    for (const auto& r : rows) {
        rep.k_lower_bound = std::max(rep.k_lower_bound, r.ratio);
        rep.eps_min = std::min(rep.eps_min, r.eps);
        rep.eps_max = std::max(rep.eps_max, r.eps);
    }
    rep.rows = std::move(rows);
    return rep;
}

struct QuasiConvexRow {
    PointId x, y;
    double walk;
    double d;
    double ratio;
};

struct QuasiConvexReport {
    std::vector<QuasiConvexRow> rows;
    double c_estimate = 0.0;
};

/// max over pairs of (shortest walk in `walks`) / d(x, y). `walks` lists the
/// admissible steps (same point set as the space).
inline QuasiConvexReport quasi_convexity_constant(const MetricSpace& space, const WeightedGraph& walks,
                                                  const std::vector<std::pair<PointId, PointId>>& pairs) {
    if (walks.size() != space.size()) throw Error(ErrorCode::InvalidArgument, "walk graph must share the point set");
    QuasiConvexReport rep;
    for (auto [x, y] : pairs) {
        double walk = walks.distances_from(x)[y];
        if (!std::isfinite(walk))
            throw Error(ErrorCode::NoChain, "no admissible walk between " + std::to_string(x) + " and " +
                                                std::to_string(y));
        double d = space.distance(x, y);
        if (!(d > 0.0)) throw Error(ErrorCode::DegenerateMetric, "pair at zero distance");
        rep.rows.push_back({x, y, walk, d, walk / d});
        rep.c_estimate = std::max(rep.c_estimate, walk / d);
    }
    return rep;
}

/// Walks restricted to the eps-graph at the given resolution.
inline QuasiConvexReport quasi_convexity_constant(const MetricSpace& space,
                                                  const std::vector<std::pair<PointId, PointId>>& pairs,
                                                  double resolution) {
    if (const auto* g = space.graph()) return quasi_convexity_constant(space, *g, pairs);
    return quasi_convexity_constant(space, epsilon_graph(space, resolution), pairs);
}

struct SemmesRow {
    PointId x, y;
    double eps;
    double sup_d_eps;                     // sup_z D_eps f(z)
    std::optional<double> required_k;     // nullopt: not applicable (f constant at scale eps)
};

struct SemmesReport {
    std::vector<SemmesRow> rows;
    double max_required_k = 0.0;
};

/// Smallest K with |f(x) - f(y)| <= K (d(x,y) + eps) sup_z D_eps f(z) on each tested cell.
inline SemmesReport semmes_required_K(const MetricSpace& space, const ScalarField& f,
                                      const std::vector<std::pair<PointId, PointId>>& pairs,
                                      const std::vector<double>& eps_list) {
    check_field(space, f);
    SemmesReport rep;
    for (double eps : eps_list) {
        std::vector<double> osc(space.size());
        detail::parallel_for(space.size(), [&](std::size_t z) { osc[z] = d_r_oscillation(space, f, z, eps); });
        double sup = *std::max_element(osc.begin(), osc.end());
        for (auto [x, y] : pairs) {
            SemmesRow row{x, y, eps, sup, std::nullopt};
            if (sup > 0.0) {
                row.required_k = std::abs(f[x] - f[y]) / ((space.distance(x, y) + eps) * sup);
                rep.max_required_k = std::max(rep.max_required_k, *row.required_k);
            }
            rep.rows.push_back(row);
        }
    }
    return rep;
}

struct CurveViolation {
    std::size_t curve_index;
    double increment;  // |f(end) - f(start)|
    double bound;      // right-hand side the increment exceeded
};

/// Curves with |f(start) - f(end)| > lip_sup * length + tau.
inline std::vector<CurveViolation> oscillation_along_curves_check(const MetricSpace& space, const ScalarField& f,
                                                                  const std::vector<Curve>& curves, double lip_sup,
                                                                  double tau = 1e-12) {
    check_field(space, f);
    if (!(lip_sup >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lip_sup must be nonnegative");
    std::vector<CurveViolation> out;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        double inc = std::abs(f[curves[i].back()] - f[curves[i].front()]);
        double bound = lip_sup * curve_length(space, curves[i]);
        if (inc > bound + tau) out.push_back({i, inc, bound});
    }
    return out;
}

}  // namespace metricgeo
