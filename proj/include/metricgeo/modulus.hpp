#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "convex.hpp"
#include "curves.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "metric_space.hpp"

namespace metricgeo {

enum class Exponent { One, Two, Infinity };

inline Exponent exponent_from(double p) {
    if (p == 1.0) return Exponent::One;
    if (p == 2.0) return Exponent::Two;
    if (std::isinf(p) && p > 0.0) return Exponent::Infinity;
    throw Error(ErrorCode::UnsupportedExponent, "p must be 1, 2 or infinity, got " + std::to_string(p));
}

inline std::string to_string(Exponent p) {
    switch (p) {
        case Exponent::One: return "1";
        case Exponent::Two: return "2";
        case Exponent::Infinity: return "inf";
    }
    return "?";
}

/// A family of curves on a graph: an explicit list, every curve joining a
/// source set to a disjoint target set, or every curve through one of a set of
/// edges (whose minimal members are the single edges).
class CurveFamily {
public:
    enum class Kind { Explicit, Connecting, ThroughEdge };

    static CurveFamily explicit_curves(std::vector<Path> curves) {
        for (const auto& c : curves)
            if (c.edges.empty()) throw Error(ErrorCode::InvalidArgument, "family curves must be nonconstant");
        CurveFamily f(Kind::Explicit);
        f.curves_ = std::move(curves);
        return f;
    }

    static CurveFamily connecting(std::vector<std::size_t> sources, std::vector<std::size_t> targets) {
        std::sort(sources.begin(), sources.end());
        sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        for (auto s : sources)
            if (std::binary_search(targets.begin(), targets.end(), s))
                throw Error(ErrorCode::InvalidArgument, "source and target sets must be disjoint");
        CurveFamily f(Kind::Connecting);
        f.sources_ = std::move(sources);
        f.targets_ = std::move(targets);
        return f;
    }

    static CurveFamily through_edges(std::vector<std::size_t> edges) {
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        CurveFamily f(Kind::ThroughEdge);
        f.edges_ = std::move(edges);
        return f;
    }

    Kind kind() const { return kind_; }
    const std::vector<Path>& curves() const { return curves_; }
    const std::vector<std::size_t>& sources() const { return sources_; }
    const std::vector<std::size_t>& targets() const { return targets_; }
    const std::vector<std::size_t>& edges() const { return edges_; }

private:
    explicit CurveFamily(Kind k) : kind_(k) {}

    Kind kind_;
    std::vector<Path> curves_;
    std::vector<std::size_t> sources_, targets_, edges_;
};

struct ModulusOptions {
    double tol = 1e-8;
    std::size_t max_iterations = 200;
};

struct ModulusResult {
    double value = 0.0;
    std::vector<double> rho;        // optimal edge density
    std::vector<Path> active_paths;  // curves in the final restricted problem
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
};

/// Raised when constraint generation does not close; carries the best bounds.
class ModulusIterationLimit : public Error {
public:
    ModulusIterationLimit(double lower, double upper)
        : Error(ErrorCode::IterationLimit, "constraint generation did not converge (bounds [" +
                                               std::to_string(lower) + ", " + std::to_string(upper) + "])"),
          lower_(lower),
          upper_(upper) {}
    double lower() const { return lower_; }
    double upper() const { return upper_; }

private:
    double lower_, upper_;
};

namespace detail {

inline void check_family(const WeightedGraph& g, const CurveFamily& family) {
    for (const auto& c : family.curves()) {
        if (c.vertices.size() != c.edges.size() + 1) throw Error(ErrorCode::InvalidArgument, "malformed family curve");
        for (std::size_t i = 0; i < c.edges.size(); ++i) {
            const Edge& e = g.edge(c.edges[i]);
            bool joins = (e.u == c.vertices[i] && e.v == c.vertices[i + 1]) ||
                         (e.v == c.vertices[i] && e.u == c.vertices[i + 1]);
            if (!joins) throw Error(ErrorCode::InvalidArgument, "family curve uses an edge that does not join its vertices");
        }
    }
    for (auto v : family.sources()) g.check_vertex(v);
    for (auto v : family.targets()) g.check_vertex(v);
    for (auto e : family.edges())
        if (e >= g.edge_count()) throw Error(ErrorCode::InvalidArgument, "family edge out of range");
}

inline Path single_edge_path(const WeightedGraph& g, std::size_t id) {
    const Edge& e = g.edge(id);
    return Path{{e.u, e.v}, {id}};
}

inline bool is_simple(const Path& p) {
    std::vector<std::size_t> v = p.vertices;
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
}

// Candidate curves of the family ordered deterministically, together with the
// smallest rho-integral over the whole family.
struct Separation {
    std::vector<Path> candidates;
    double min_integral = kInfinity;
};

inline Separation separate(const WeightedGraph& g, const CurveFamily& family, std::span<const double> rho) {
    Separation sep;
    std::vector<double> w(g.edge_count());
    for (std::size_t id = 0; id < w.size(); ++id) w[id] = weighted(rho[id], g.edge(id).length);
    switch (family.kind()) {
        case CurveFamily::Kind::Explicit:
            for (const auto& c : family.curves()) {
                sep.min_integral = std::min(sep.min_integral, line_integral(g, c, rho));
                sep.candidates.push_back(c);
            }
            break;
        case CurveFamily::Kind::ThroughEdge:
            for (auto id : family.edges()) {
                sep.min_integral = std::min(sep.min_integral, w[id]);
                sep.candidates.push_back(single_edge_path(g, id));
            }
            break;
        case CurveFamily::Kind::Connecting: {
            auto from_s = lex_shortest_paths(g, family.sources(), w);
            auto from_t = lex_shortest_paths(g, family.targets(), w);
            for (auto t : family.targets())
                if (from_s.path[t]) {
                    sep.min_integral = std::min(sep.min_integral, from_s.dist[t]);
                    sep.candidates.push_back(*from_s.path[t]);
                }
            // Shortest curve forced through each intermediate vertex.
            for (std::size_t v = 0; v < g.size(); ++v) {
                if (!from_s.path[v] || !from_t.path[v]) continue;
                const Path& head = *from_s.path[v];
                const Path& tail = *from_t.path[v];
                if (head.edges.empty() || tail.edges.empty()) continue;
                Path joined = head;
                for (std::size_t k = tail.edges.size(); k-- > 0;) {
                    joined.edges.push_back(tail.edges[k]);
                    joined.vertices.push_back(tail.vertices[k]);
                }
                if (is_simple(joined)) sep.candidates.push_back(std::move(joined));
            }
            break;
        }
    }
    return sep;
}

inline double energy(Exponent p, std::span<const double> sigma, std::span<const double> rho) {
    double total = 0.0;
    for (std::size_t e = 0; e < rho.size(); ++e) {
        switch (p) {
            case Exponent::One: total += sigma[e] * rho[e]; break;
            case Exponent::Two: total += sigma[e] * rho[e] * rho[e]; break;
            case Exponent::Infinity:
                if (sigma[e] > 0.0) total = std::max(total, rho[e]);
                break;
        }
    }
    return total;
}

// Exact minimiser of the p-energy subject to every listed curve having rho-integral >= 1.
inline std::vector<double> solve_restricted(const WeightedGraph& g, std::span<const double> sigma,
                                            const std::vector<Path>& curves, Exponent p, bool use_hildreth = false) {
    std::vector<double> rho(g.edge_count(), 0.0);
    if (curves.empty()) return rho;
    std::vector<std::size_t> used;
    for (const auto& c : curves) used.insert(used.end(), c.edges.begin(), c.edges.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::map<std::size_t, Eigen::Index> column;
    for (std::size_t k = 0; k < used.size(); ++k) column[used[k]] = static_cast<Eigen::Index>(k);
    const auto m = static_cast<Eigen::Index>(curves.size());
    const auto n = static_cast<Eigen::Index>(used.size());
    convex::Matrix A = convex::Matrix::Zero(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (auto id : curves[static_cast<std::size_t>(i)].edges) A(i, column[id]) += g.edge(id).length;

    switch (p) {
        case Exponent::One: {
            convex::Vector c(n);
            for (Eigen::Index k = 0; k < n; ++k) c[k] = sigma[used[static_cast<std::size_t>(k)]];
            auto lp = convex::solve_covering_lp(A, convex::Vector::Ones(m), c);
            for (Eigen::Index k = 0; k < n; ++k) rho[used[static_cast<std::size_t>(k)]] = lp.x[k];
            break;
        }
        case Exponent::Infinity: {
            // Variables (rho_used, t); rows: curves, then t - rho_e >= 0 for sigma_e > 0.
            std::vector<Eigen::Index> bounded;
            for (Eigen::Index k = 0; k < n; ++k)
                if (sigma[used[static_cast<std::size_t>(k)]] > 0.0) bounded.push_back(k);
            const auto rows = m + static_cast<Eigen::Index>(bounded.size());
            convex::Matrix B = convex::Matrix::Zero(rows, n + 1);
            B.topLeftCorner(m, n) = A;
            for (std::size_t r = 0; r < bounded.size(); ++r) {
                B(m + static_cast<Eigen::Index>(r), bounded[r]) = -1.0;
                B(m + static_cast<Eigen::Index>(r), n) = 1.0;
            }
            convex::Vector b = convex::Vector::Zero(rows);
            b.head(m).setOnes();
            convex::Vector c = convex::Vector::Zero(n + 1);
            c[n] = 1.0;
            auto lp = convex::solve_covering_lp(B, b, c);
            for (Eigen::Index k = 0; k < n; ++k) rho[used[static_cast<std::size_t>(k)]] = lp.x[k];
            break;
        }
        case Exponent::Two: {
            // x = sqrt(sigma) rho turns the energy into |x|^2.
            convex::Matrix G = A;
            convex::Vector inv_sqrt(n);
            for (Eigen::Index k = 0; k < n; ++k) {
                double s = sigma[used[static_cast<std::size_t>(k)]];
                if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "p = 2 needs a strictly positive edge measure");
                inv_sqrt[k] = 1.0 / std::sqrt(s);
                G.col(k) *= inv_sqrt[k];
            }
            convex::Vector h = convex::Vector::Ones(m);
            convex::Vector x = use_hildreth ? convex::hildreth(G, h).x : convex::least_distance(G, h).x;
            for (Eigen::Index k = 0; k < n; ++k) rho[used[static_cast<std::size_t>(k)]] = std::max(0.0, x[k] * inv_sqrt[k]);
            break;
        }
    }
    return rho;
}

inline std::vector<double> checked_sigma(const WeightedGraph& g, std::span<const double> sigma) {
    if (sigma.size() != g.edge_count())
        throw Error(ErrorCode::InvalidArgument, "edge measure has " + std::to_string(sigma.size()) +
                                                    " weights for " + std::to_string(g.edge_count()) + " edges");
    for (double s : sigma)
        if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "edge measure must be nonnegative");
    return {sigma.begin(), sigma.end()};
}

inline double scale_bound(Exponent p, double value, double min_integral) {
    double s = std::min(1.0, min_integral);
    if (!(s > 0.0)) return kInfinity;
    return p == Exponent::One ? value / s : p == Exponent::Two ? value / (s * s) : value / s;
}

}  // namespace detail

/// p-modulus of a curve family on a graph by constraint generation: solve the
/// problem restricted to an active set of curves, look for family curves whose
/// rho-integral falls below 1 - tol via weighted shortest paths, add them and
/// repeat. The final density scaled by the smallest family integral is
/// feasible, giving the reported upper bound.
inline ModulusResult modulus_p(const WeightedGraph& graph, std::span<const double> sigma_in,
                               const CurveFamily& family, Exponent p, const ModulusOptions& opt = {}) {
    detail::check_family(graph, family);
    const auto sigma = detail::checked_sigma(graph, sigma_in);
    if (!(opt.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    ModulusResult res;
    res.rho.assign(graph.edge_count(), 0.0);

    if (family.kind() == CurveFamily::Kind::Explicit && family.curves().empty()) return res;
    if (family.kind() == CurveFamily::Kind::ThroughEdge && family.edges().empty()) return res;
    if (family.kind() == CurveFamily::Kind::Connecting && (family.sources().empty() || family.targets().empty()))
        throw Error(ErrorCode::EmptyFamily, "connecting family needs sources and targets");

    std::set<Path> active;
    {
        std::vector<double> uniform(graph.edge_count(), 1.0);
        auto sep = detail::separate(graph, family, uniform);
        if (sep.candidates.empty()) throw Error(ErrorCode::EmptyFamily, "no curve of the family exists in the graph");
        active.insert(sep.candidates.begin(), sep.candidates.end());
    }
    std::vector<double> rho;
    double lower = 0.0, upper = kInfinity;
    for (res.iterations = 1; res.iterations <= opt.max_iterations; ++res.iterations) {
        rho = detail::solve_restricted(graph, sigma, {active.begin(), active.end()}, p);
        lower = detail::energy(p, sigma, rho);
        auto sep = detail::separate(graph, family, rho);
        upper = std::min(upper, detail::scale_bound(p, lower, sep.min_integral));
        std::size_t added = 0;
        for (auto& c : sep.candidates)
            if (line_integral(graph, c, rho) < 1.0 - opt.tol && active.insert(c).second) ++added;
        if (sep.min_integral >= 1.0 - opt.tol) {
            res.rho = std::move(rho);
            res.value = lower;
            res.lower_bound = lower;
            res.upper_bound = upper;
            res.gap = upper - lower;
            res.active_paths.assign(active.begin(), active.end());
            return res;
        }
        if (added == 0) break;  // violated curves already active: numerical stall
    }
    throw ModulusIterationLimit(lower, upper);
}

/// Every simple curve of the family, or PathLimit once more than `path_limit` exist.
inline std::vector<Path> enumerate_family(const WeightedGraph& graph, const CurveFamily& family,
                                          std::size_t path_limit) {
    detail::check_family(graph, family);
    std::vector<Path> out;
    auto push = [&](Path p) {
        if (out.size() >= path_limit)
            throw Error(ErrorCode::PathLimit, "family has more than " + std::to_string(path_limit) + " simple curves");
        out.push_back(std::move(p));
    };
    switch (family.kind()) {
        case CurveFamily::Kind::Explicit:
            for (const auto& c : family.curves()) push(c);
            break;
        case CurveFamily::Kind::ThroughEdge:
            for (auto id : family.edges()) push(detail::single_edge_path(graph, id));
            break;
        case CurveFamily::Kind::Connecting: {
            std::vector<bool> is_target(graph.size(), false);
            for (auto t : family.targets()) is_target[t] = true;
            std::vector<bool> on_path(graph.size(), false);
            Path cur;
            auto dfs = [&](auto&& self, std::size_t u) -> void {
                if (is_target[u] && !cur.edges.empty()) push(cur);
                for (auto id : graph.incident(u)) {
                    std::size_t w = graph.other_end(id, u);
                    if (on_path[w]) continue;
                    on_path[w] = true;
                    cur.vertices.push_back(w);
                    cur.edges.push_back(id);
                    self(self, w);
                    cur.vertices.pop_back();
                    cur.edges.pop_back();
                    on_path[w] = false;
                }
            };
            for (auto s : family.sources()) {
                cur = Path{{s}, {}};
                on_path[s] = true;
                dfs(dfs, s);
                on_path[s] = false;
            }
            break;
        }
    }
    return out;
}

/// Reference optimum with every simple family curve present as a constraint.
/// p = 2 uses Hildreth's method, independent of the active-set solver that
/// modulus_p relies on.
inline double brute_force_modulus(const WeightedGraph& graph, std::span<const double> sigma_in,
                                  const CurveFamily& family, Exponent p, std::size_t path_limit = 5000) {
    const auto sigma = detail::checked_sigma(graph, sigma_in);
    auto curves = enumerate_family(graph, family, path_limit);
    if (curves.empty()) {
        if (family.kind() == CurveFamily::Kind::Connecting)
            throw Error(ErrorCode::EmptyFamily, "no curve of the family exists in the graph");
        return 0.0;
    }
    auto rho = detail::solve_restricted(graph, sigma, curves, p, /*use_hildreth=*/true);
    return detail::energy(p, sigma, rho);
}

struct NullFamilyVerdict {
    bool condition_b = false;   // every family curve has infinite rho-integral
    bool condition_c = false;   // additionally the essential sup of rho is 0
    double essential_sup = 0.0;  // max of rho over cells of positive measure
    bool claim_matches = false;
    std::vector<std::size_t> finite_curves;  // indices of curves with finite integral
};

/// Checks a candidate witness for a null family: rho may take +inf, and the
/// measure marks which cells are null (zero weight).
inline NullFamilyVerdict null_family_witness_check(const MetricSpace& space, const std::vector<Curve>& family,
                                                   const Density& rho, const Measure& mu,
                                                   double essential_sup_claim) {
    if (mu.size() != rho.size()) throw Error(ErrorCode::InvalidArgument, "measure and density cover different cells");
    NullFamilyVerdict v;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (mu[i] > 0.0) v.essential_sup = std::max(v.essential_sup, rho[i]);
    for (std::size_t k = 0; k < family.size(); ++k)
        if (std::isfinite(line_integral(space, family[k], rho))) v.finite_curves.push_back(k);
    v.condition_b = !family.empty() && v.finite_curves.empty();
    v.condition_c = v.condition_b && v.essential_sup == 0.0;
    v.claim_matches = v.essential_sup == essential_sup_claim ||
                      std::abs(v.essential_sup - essential_sup_claim) <= 1e-12 * std::max(1.0, essential_sup_claim);
    return v;
}

}  // namespace metricgeo
