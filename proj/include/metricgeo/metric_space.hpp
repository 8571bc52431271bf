#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "detail/parallel.hpp"
#include "error.hpp"
#include "formula_space.hpp"
#include "graph.hpp"

namespace metricgeo {

using PointId = std::size_t;

/// Dense symmetric distance table.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        DistanceMatrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size())
                throw Error(ErrorCode::MalformedSpace, "distance row " + std::to_string(i) + " has " +
                                                           std::to_string(rows[i].size()) + " entries, expected " +
                                                           std::to_string(rows.size()));
            std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * m.n_));
        }
        return m;
    }

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

enum class SpaceKind { ExplicitMatrix, WeightedGraph, FormulaSpace };

struct Neighbor {
    PointId id;
    double distance;
};

/// A finite metric space in one of three representations. Immutable once built.
class MetricSpace {
public:
    static MetricSpace from_matrix(DistanceMatrix m) {
        if (m.size() == 0) throw Error(ErrorCode::MalformedSpace, "space has no points");
        MetricSpace s;
        s.rep_ = std::move(m);
        return s;
    }

    static MetricSpace from_graph(WeightedGraph g) {
        if (g.size() == 0) throw Error(ErrorCode::MalformedSpace, "graph has no vertices");
        MetricSpace s;
        s.rep_ = std::move(g);
        return s;
    }

    /// Finite sample of a formula space; distances stay on the exact rule.
    static MetricSpace from_formula(std::shared_ptr<const FormulaSpace> formula, std::vector<Param> points) {
        if (points.empty()) throw Error(ErrorCode::MalformedSpace, "formula sample has no points");
        for (const auto& p : points)
            if (p.size() != formula->param_dim())
                throw Error(ErrorCode::InvalidPoint, formula->name() + ": parameter dimension mismatch");
        {
            std::vector<std::size_t> order(points.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return points[a] < points[b]; });
            for (std::size_t k = 1; k < order.size(); ++k)
                if (points[order[k]] == points[order[k - 1]])
                    throw Error(ErrorCode::DuplicatePoint, formula->name() + ": duplicate sample parameter at indices " +
                                                               std::to_string(order[k - 1]) + " and " +
                                                               std::to_string(order[k]));
        }
        Sampled sampled{std::move(formula), std::move(points), nullptr};
        if (const auto& embed = sampled.formula->embedding()) {
            std::vector<std::array<double, 2>> coords;
            coords.reserve(sampled.points.size());
            for (const auto& p : sampled.points) coords.push_back((*embed)(p));
            sampled.grid = std::make_shared<const detail::PlanarGrid>(detail::PlanarGrid::build(std::move(coords)));
        }
        MetricSpace s;
        s.rep_ = std::move(sampled);
        return s;
    }

    SpaceKind kind() const { return static_cast<SpaceKind>(rep_.index()); }

    std::size_t size() const {
        return std::visit(
            [](const auto& r) -> std::size_t {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, Sampled>)
                    return r.points.size();
                else
                    return r.size();
            },
            rep_);
    }

    void check_point(PointId x) const {
        if (x >= size())
            throw Error(ErrorCode::InvalidPoint,
                        "point " + std::to_string(x) + " out of range (size " + std::to_string(size()) + ")");
    }

    /// d(x, y). Disconnected graph pairs raise Unreachable.
    double distance(PointId x, PointId y) const {
        check_point(x);
        check_point(y);
        if (x == y) return 0.0;
        switch (kind()) {
            case SpaceKind::ExplicitMatrix: return std::get<DistanceMatrix>(rep_)(x, y);
            case SpaceKind::WeightedGraph: {
                const auto& g = std::get<WeightedGraph>(rep_);
                double d = g.distances_from(x)[y];
                if (!std::isfinite(d))
                    throw Error(ErrorCode::Unreachable,
                                "no path between " + std::to_string(x) + " and " + std::to_string(y));
                return d;
            }
            case SpaceKind::FormulaSpace: {
                const auto& s = std::get<Sampled>(rep_);
                return s.formula->distance(s.points[x], s.points[y]);
            }
        }
        return 0.0;
    }

    /// Distances from x to every point; +inf marks unreachable graph vertices.
    std::vector<double> distances_from(PointId x) const {
        check_point(x);
        switch (kind()) {
            case SpaceKind::ExplicitMatrix: {
                auto row = std::get<DistanceMatrix>(rep_).row(x);
                return {row.begin(), row.end()};
            }
            case SpaceKind::WeightedGraph: return std::get<WeightedGraph>(rep_).distances_from(x);
            case SpaceKind::FormulaSpace: {
                const auto& s = std::get<Sampled>(rep_);
                std::vector<double> out(s.points.size());
                for (std::size_t j = 0; j < out.size(); ++j)
                    out[j] = j == x ? 0.0 : s.formula->distance(s.points[x], s.points[j]);
                return out;
            }
        }
        return {};
    }

    /// Every point y (x included) with d(x, y) <= r, ordered by id.
    std::vector<Neighbor> within(PointId x, double r) const {
        check_point(x);
        std::vector<Neighbor> out;
        if (kind() == SpaceKind::WeightedGraph) {
            auto dist = std::get<WeightedGraph>(rep_).distances_from(x, r);
            for (std::size_t j = 0; j < dist.size(); ++j)
                if (dist[j] <= r) out.push_back({j, dist[j]});
            return out;
        }
        if (kind() == SpaceKind::FormulaSpace) {
            const auto& s = std::get<Sampled>(rep_);
            if (s.grid) {
                if (auto cand = s.grid->candidates(x, r)) {
                    for (std::size_t j : *cand) {
                        double d = j == x ? 0.0 : s.formula->distance(s.points[x], s.points[j]);
                        if (d <= r) out.push_back({j, d});
                    }
                    return out;
                }
            }
        }
        auto dist = distances_from(x);
        for (std::size_t j = 0; j < dist.size(); ++j)
            if (dist[j] <= r) out.push_back({j, dist[j]});
        return out;
    }

    /// Smallest positive distance from x to another point (+inf if none).
    double nearest_distance(PointId x) const {
        check_point(x);
        if (kind() == SpaceKind::FormulaSpace) {
            const auto& s = std::get<Sampled>(rep_);
            if (s.grid) {
                for (double r = s.grid->cell(); r < 1e300; r *= 2.0) {
                    auto cand = s.grid->candidates(x, r);
                    if (!cand) break;
                    double best = kInfinity;
                    for (std::size_t j : *cand) {
                        if (j == x) continue;
                        double d = s.formula->distance(s.points[x], s.points[j]);
                        if (d > 0.0) best = std::min(best, d);
                    }
                    if (best <= r) return best;
                }
            }
        }
        if (kind() == SpaceKind::WeightedGraph) {
            const auto& g = std::get<WeightedGraph>(rep_);
            double best = kInfinity;
            for (std::size_t id : g.incident(x)) best = std::min(best, g.edge(id).length);
            return best;
        }
        auto dist = distances_from(x);
        double best = kInfinity;
        for (std::size_t j = 0; j < dist.size(); ++j)
            if (j != x && dist[j] > 0.0) best = std::min(best, dist[j]);
        return best;
    }

    const DistanceMatrix* matrix() const { return std::get_if<DistanceMatrix>(&rep_); }
    const WeightedGraph* graph() const { return std::get_if<WeightedGraph>(&rep_); }
    const FormulaSpace* formula() const {
        auto* s = std::get_if<Sampled>(&rep_);
        return s ? s->formula.get() : nullptr;
    }
    std::shared_ptr<const FormulaSpace> formula_ptr() const {
        auto* s = std::get_if<Sampled>(&rep_);
        return s ? s->formula : nullptr;
    }
    /// Parameters of the sampled formula points (empty for the other kinds).
    std::span<const Param> parameters() const {
        auto* s = std::get_if<Sampled>(&rep_);
        return s ? std::span<const Param>(s->points) : std::span<const Param>();
    }

private:
    struct Sampled {
        std::shared_ptr<const FormulaSpace> formula;
        std::vector<Param> points;
        std::shared_ptr<const detail::PlanarGrid> grid;
    };

    MetricSpace() = default;

    std::variant<DistanceMatrix, WeightedGraph, Sampled> rep_;
};

/// Real-valued function on the points of a space.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(std::vector<double> values) : values_(std::move(values)) {
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!std::isfinite(values_[i]))
                throw Error(ErrorCode::InvalidArgument, "field value at point " + std::to_string(i) + " is not finite");
    }

    template <class Rule>
    static ScalarField from_rule(std::span<const Param> points, Rule&& rule) {
        std::vector<double> v;
        v.reserve(points.size());
        for (const auto& p : points) v.push_back(rule(std::span<const double>(p)));
        return ScalarField(std::move(v));
    }

    static ScalarField constant(std::size_t n, double c) { return ScalarField(std::vector<double>(n, c)); }

    std::size_t size() const { return values_.size(); }
    double operator[](PointId x) const { return values_[x]; }
    const std::vector<double>& values() const { return values_; }

    ScalarField scaled(double c) const {
        auto v = values_;
        for (auto& x : v) x *= c;
        return ScalarField(std::move(v));
    }

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
        if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "field sizes differ");
        auto v = a.values_;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values_[i];
        return ScalarField(std::move(v));
    }
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b) { return a + b.scaled(-1.0); }

private:
    std::vector<double> values_;
};

inline void check_field(const MetricSpace& space, const ScalarField& f) {
    if (f.size() != space.size())
        throw Error(ErrorCode::InvalidArgument, "field has " + std::to_string(f.size()) + " values but the space has " +
                                                    std::to_string(space.size()) + " points");
}

enum class MeasureFlavor { Vertex, Edge, Counting };

/// Nonnegative weights on points (Vertex, Counting) or edges (Edge).
class Measure {
public:
    Measure(MeasureFlavor flavor, std::vector<double> weights) : flavor_(flavor), weights_(std::move(weights)) {
        double total = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
                throw Error(ErrorCode::InvalidArgument, "measure weight " + std::to_string(i) + " is negative or not finite");
            total += weights_[i];
        }
        if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "measure has zero total mass");
        total_ = total;
    }

    static Measure counting(std::size_t n) { return Measure(MeasureFlavor::Counting, std::vector<double>(n, 1.0)); }

    MeasureFlavor flavor() const { return flavor_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }
    double total() const { return total_; }

private:
    MeasureFlavor flavor_;
    std::vector<double> weights_;
    double total_ = 0.0;
};

// ---------------------------------------------------------------------------
// Axiom checks

struct TriangleViolation {
    PointId x, z, y;  // d(x, y) > d(x, z) + d(z, y) + tau
    double defect;
};

struct AxiomReport {
    std::vector<TriangleViolation> triangle_violations;
    std::vector<std::pair<PointId, PointId>> asymmetric_pairs;
    std::vector<PointId> nonzero_diagonal;
    double max_triangle_defect = 0.0;

    bool ok() const { return triangle_violations.empty() && asymmetric_pairs.empty() && nonzero_diagonal.empty(); }
};

/// All-pairs distances. Parallel over rows; row contents do not depend on scheduling.
inline DistanceMatrix all_distances(const MetricSpace& space) {
    const std::size_t n = space.size();
    if (const auto* m = space.matrix()) return *m;
    DistanceMatrix out(n);
    detail::parallel_for(n, [&](std::size_t i) {
        auto row = space.distances_from(i);
        for (std::size_t j = 0; j < n; ++j) out(i, j) = row[j];
    });
    return out;
}

inline AxiomReport verify_metric_axioms(const MetricSpace& space, double tau = 1e-9) {
    if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be nonnegative");
    const std::size_t n = space.size();
    DistanceMatrix d = all_distances(space);
    AxiomReport report;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double v = d(i, j);
            if (std::isnan(v) || v < 0.0)
                throw Error(ErrorCode::MalformedSpace, "distance (" + std::to_string(i) + "," + std::to_string(j) +
                                                           ") is negative or NaN");
            if (std::isinf(v))
                throw Error(ErrorCode::Unreachable, "points " + std::to_string(i) + " and " + std::to_string(j) +
                                                        " are not connected");
        }
    for (std::size_t i = 0; i < n; ++i) {
        if (d(i, i) > tau) report.nonzero_diagonal.push_back(i);
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(d(i, j) - d(j, i)) > tau) report.asymmetric_pairs.emplace_back(i, j);
    }
    std::vector<std::vector<TriangleViolation>> per_row(n);
    std::vector<double> row_max(n, 0.0);
    detail::parallel_for(n, [&](std::size_t x) {
        for (std::size_t y = x + 1; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z) {
                if (z == x || z == y) continue;
                double defect = d(x, y) - d(x, z) - d(z, y);
                row_max[x] = std::max(row_max[x], defect);
                if (defect > tau) per_row[x].push_back({x, z, y, defect});
            }
    });
    for (std::size_t x = 0; x < n; ++x) {
        report.max_triangle_defect = std::max(report.max_triangle_defect, row_max[x]);
        report.triangle_violations.insert(report.triangle_violations.end(), per_row[x].begin(), per_row[x].end());
    }
    return report;
}

// ---------------------------------------------------------------------------
// Balls, diameters and epsilon-graphs

/// Open ball {y : d(center, y) < r}, ordered by id.
inline std::vector<PointId> ball(const MetricSpace& space, PointId center, double r) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
    std::vector<PointId> out;
    for (const auto& nb : space.within(center, r))
        if (nb.distance < r) out.push_back(nb.id);
    return out;
}

inline double diameter(const MetricSpace& space) {
    const std::size_t n = space.size();
    std::vector<double> row_max(n, 0.0);
    detail::parallel_for(n, [&](std::size_t i) {
        auto row = space.distances_from(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!std::isfinite(row[j]))
                throw Error(ErrorCode::Unreachable, "space is disconnected; diameter undefined");
            row_max[i] = std::max(row_max[i], row[j]);
        }
    });
    return n == 0 ? 0.0 : *std::max_element(row_max.begin(), row_max.end());
}

/// Minimum positive pairwise distance.
inline double resolution(const MetricSpace& space) {
    double best = kInfinity;
    for (std::size_t i = 0; i < space.size(); ++i) best = std::min(best, space.nearest_distance(i));
    return best;
}

/// Graph on the same points with an edge (x, y) iff 0 < d(x, y) < eps; edge length d(x, y).
inline WeightedGraph epsilon_graph(const MetricSpace& space, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    const std::size_t n = space.size();
    std::vector<std::vector<Edge>> per_row(n);
    detail::parallel_for(n, [&](std::size_t i) {
        for (const auto& nb : space.within(i, eps))
            if (nb.id > i && nb.distance > 0.0 && nb.distance < eps) per_row[i].push_back({i, nb.id, nb.distance});
    });
    std::vector<Edge> edges;
    for (auto& row : per_row) edges.insert(edges.end(), row.begin(), row.end());
    return WeightedGraph(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Sampling formula spaces

struct SampledSpace {
    MetricSpace space;
    std::vector<Param> provenance;  // formula parameter of each sampled point
};

/// Explicit distance matrix of a formula space evaluated at the given parameters.
inline SampledSpace sample_formula_space(std::shared_ptr<const FormulaSpace> formula, std::vector<Param> params) {
    if (params.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "sampling strategy must yield at least two points");
    // Reuse the duplicate and dimension checks of the formula-backed space.
    MetricSpace backed = MetricSpace::from_formula(formula, params);
    return {MetricSpace::from_matrix(all_distances(backed)), std::move(params)};
}

}  // namespace metricgeo
