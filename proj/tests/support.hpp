#pragma once

// Seeded random instances shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "metricgeo/graph.hpp"
#include "metricgeo/metric_space.hpp"
#include "metricgeo/modulus.hpp"

namespace testing_support {

using namespace metricgeo;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

/// Connected graph: a random tree plus `extra` random edges (parallel edges allowed).
inline WeightedGraph random_connected_graph(std::mt19937_64& rng, std::size_t n, std::size_t extra,
                                            double min_len = 0.5, double max_len = 2.0) {
    std::vector<Edge> edges;
    for (std::size_t v = 1; v < n; ++v) edges.push_back({pick(rng, v), v, uniform(rng, min_len, max_len)});
    for (std::size_t k = 0; k < extra; ++k) {
        std::size_t a = pick(rng, n), b = pick(rng, n);
        if (a == b) continue;
        edges.push_back({a, b, uniform(rng, min_len, max_len)});
    }
    return WeightedGraph(n, std::move(edges));
}

/// Graphs with at most `max_paths` simple s-t paths for s = 0, t = n - 1.
inline WeightedGraph random_modulus_graph(std::mt19937_64& rng, std::size_t max_vertices, std::size_t max_paths) {
    while (true) {
        std::size_t n = 4 + pick(rng, max_vertices - 3);
        auto g = random_connected_graph(rng, n, 2 + pick(rng, n));
        try {
            auto paths = enumerate_family(g, CurveFamily::connecting({0}, {n - 1}), max_paths);
            if (paths.size() >= 2) return g;
        } catch (const Error&) {
        }
    }
}

inline std::vector<double> random_sigma(std::mt19937_64& rng, std::size_t m) {
    std::vector<double> s(m);
    for (auto& x : s) x = uniform(rng, 0.5, 2.0);
    return s;
}

/// Random finite metric: shortest-path closure of a random complete weighted graph.
inline MetricSpace random_finite_space(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = uniform(rng, 0.2, 3.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return MetricSpace::from_matrix(DistanceMatrix::from_rows(d));
}

inline ScalarField random_field(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(rng, -scale, scale);
    return ScalarField(std::move(v));
}

/// Random walk of `steps` edges starting anywhere; returns the vertex sequence.
inline std::vector<std::size_t> random_walk(std::mt19937_64& rng, const WeightedGraph& g, std::size_t steps) {
    std::size_t v = pick(rng, g.size());
    while (g.incident(v).empty()) v = pick(rng, g.size());
    std::vector<std::size_t> out{v};
    for (std::size_t k = 0; k < steps; ++k) {
        const auto& inc = g.incident(v);
        std::size_t id = inc[pick(rng, inc.size())];
        v = g.other_end(id, v);
        out.push_back(v);
    }
    return out;
}

}  // namespace testing_support
