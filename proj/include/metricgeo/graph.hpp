#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace metricgeo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double length = 1.0;
};

/// A walk through a multigraph: consecutive vertices joined by the listed edges.
struct Path {
    std::vector<std::size_t> vertices;
    std::vector<std::size_t> edges;

    bool empty() const { return edges.empty(); }

    friend bool operator==(const Path&, const Path&) = default;
    friend auto operator<=>(const Path& a, const Path& b) {
        if (auto c = a.vertices <=> b.vertices; c != 0) return c;
        return a.edges <=> b.edges;
    }
};

/// Undirected multigraph with strictly positive edge lengths. Its metric is
/// the shortest-path distance.
class WeightedGraph {
public:
    WeightedGraph() = default;

    WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges)
        : vertex_count_(vertex_count), edges_(std::move(edges)), incident_(vertex_count) {
        for (std::size_t id = 0; id < edges_.size(); ++id) {
            const Edge& e = edges_[id];
            if (e.u >= vertex_count_ || e.v >= vertex_count_)
                throw Error(ErrorCode::InvalidPoint, "edge " + std::to_string(id) + " has an endpoint out of range");
            if (e.u == e.v)
                throw Error(ErrorCode::MalformedSpace, "edge " + std::to_string(id) + " is a self-loop");
            if (!(e.length > 0.0) || !std::isfinite(e.length))
                throw Error(ErrorCode::MalformedSpace,
                            "edge " + std::to_string(id) + " has non-positive or non-finite length");
            incident_[e.u].push_back(id);
            incident_[e.v].push_back(id);
        }
    }

    std::size_t size() const { return vertex_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t id) const { return edges_.at(id); }
    std::span<const std::size_t> incident(std::size_t v) const { return incident_.at(v); }

    std::size_t other_end(std::size_t edge_id, std::size_t v) const {
        const Edge& e = edges_[edge_id];
        return e.u == v ? e.v : e.u;
    }

    /// Shortest edge joining u and v (lowest id among equal lengths).
    std::optional<std::size_t> find_edge(std::size_t u, std::size_t v) const {
        std::optional<std::size_t> best;
        for (std::size_t id : incident_.at(u)) {
            if (other_end(id, u) != v) continue;
            if (!best || edges_[id].length < edges_[*best].length) best = id;
        }
        return best;
    }

    /// Dijkstra from `source`; vertices farther than `cutoff` (or unreachable) get +inf.
    std::vector<double> distances_from(std::size_t source, double cutoff = kInfinity) const {
        check_vertex(source);
        std::vector<double> dist(vertex_count_, kInfinity);
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[source] = 0.0;
        heap.emplace(0.0, source);
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            for (std::size_t id : incident_[u]) {
                std::size_t w = other_end(id, u);
                double nd = d + edges_[id].length;
                if (nd < dist[w] && nd <= cutoff) {
                    dist[w] = nd;
                    heap.emplace(nd, w);
                }
            }
        }
        return dist;
    }

    /// Component label of each vertex, labels assigned in order of lowest vertex.
    std::vector<std::size_t> components() const {
        constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> label(vertex_count_, unset);
        std::size_t next = 0;
        std::vector<std::size_t> stack;
        for (std::size_t s = 0; s < vertex_count_; ++s) {
            if (label[s] != unset) continue;
            label[s] = next;
            stack.push_back(s);
            while (!stack.empty()) {
                std::size_t u = stack.back();
                stack.pop_back();
                for (std::size_t id : incident_[u]) {
                    std::size_t w = other_end(id, u);
                    if (label[w] == unset) {
                        label[w] = next;
                        stack.push_back(w);
                    }
                }
            }
            ++next;
        }
        return label;
    }

    bool connected() const {
        auto label = components();
        return std::all_of(label.begin(), label.end(), [](std::size_t l) { return l == 0; });
    }

    void check_vertex(std::size_t v) const {
        if (v >= vertex_count_)
            throw Error(ErrorCode::InvalidPoint,
                        "vertex " + std::to_string(v) + " out of range (size " + std::to_string(vertex_count_) + ")");
    }

private:
    std::size_t vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> incident_;
};

/// Shortest paths from a source set under per-edge weights. Among paths of
/// equal weight the lexicographically smallest (vertex sequence, then edge
/// ids) wins, so the result does not depend on container iteration order.
struct ShortestPathForest {
    std::vector<double> dist;
    std::vector<std::optional<Path>> path;
};

inline ShortestPathForest lex_shortest_paths(const WeightedGraph& graph, std::span<const std::size_t> sources,
                                             std::span<const double> edge_weight) {
    const std::size_t n = graph.size();
    ShortestPathForest out{std::vector<double>(n, kInfinity), std::vector<std::optional<Path>>(n)};
    std::vector<bool> settled(n, false);
    for (std::size_t s : sources) {
        graph.check_vertex(s);
        out.dist[s] = 0.0;
        Path p;
        p.vertices = {s};
        if (!out.path[s] || p < *out.path[s]) out.path[s] = std::move(p);
    }
    // O(V^2) selection keeps the (dist, path) order exact.
    for (std::size_t round = 0; round < n; ++round) {
        std::optional<std::size_t> pick;
        for (std::size_t v = 0; v < n; ++v) {
            if (settled[v] || !out.path[v]) continue;
            if (!pick || out.dist[v] < out.dist[*pick] ||
                (out.dist[v] == out.dist[*pick] && *out.path[v] < *out.path[*pick]))
                pick = v;
        }
        if (!pick) break;
        const std::size_t u = *pick;
        settled[u] = true;
        for (std::size_t id : graph.incident(u)) {
            std::size_t w = graph.other_end(id, u);
            if (settled[w]) continue;
            double nd = out.dist[u] + edge_weight[id];
            Path candidate = *out.path[u];
            candidate.vertices.push_back(w);
            candidate.edges.push_back(id);
            if (nd < out.dist[w] || (nd == out.dist[w] && (!out.path[w] || candidate < *out.path[w]))) {
                out.dist[w] = nd;
                out.path[w] = std::move(candidate);
            }
        }
    }
    return out;
}

/// Resolves a vertex sequence to a walk, taking the shortest parallel edge at each step.
inline Path walk_from_vertices(const WeightedGraph& graph, std::span<const std::size_t> vertices) {
    Path p;
    p.vertices.assign(vertices.begin(), vertices.end());
    for (std::size_t v : vertices) graph.check_vertex(v);
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        auto id = graph.find_edge(vertices[i], vertices[i + 1]);
        if (!id)
            throw Error(ErrorCode::InvalidArgument, "vertices " + std::to_string(vertices[i]) + " and " +
                                                        std::to_string(vertices[i + 1]) + " are not adjacent");
        p.edges.push_back(*id);
    }
    return p;
}

inline double path_length(const WeightedGraph& graph, const Path& p) {
    double total = 0.0;
    for (std::size_t id : p.edges) total += graph.edge(id).length;
    return total;
}

}  // namespace metricgeo
