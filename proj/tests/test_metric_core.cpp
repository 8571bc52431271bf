#include <gtest/gtest.h>

#include <cmath>

#include "metricgeo/corpus.hpp"
#include "metricgeo/metric_space.hpp"

using namespace metricgeo;

namespace {

MetricSpace matrix(std::vector<std::vector<double>> rows) {
    return MetricSpace::from_matrix(DistanceMatrix::from_rows(rows));
}

MetricSpace path_graph(std::size_t n, double len = 1.0) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, len});
    return MetricSpace::from_graph(WeightedGraph(n, e));
}

MetricSpace line_points(std::vector<double> xs) {
    std::vector<std::vector<double>> rows(xs.size(), std::vector<double>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) rows[i][j] = std::abs(xs[i] - xs[j]);
    return matrix(rows);
}

}  // namespace

TEST(Axioms, DegenerateTriangleIsFine) {
    auto rep = verify_metric_axioms(matrix({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}));
    EXPECT_TRUE(rep.ok());
    EXPECT_EQ(rep.max_triangle_defect, 0.0);
}

TEST(Axioms, OneViolatingTriple) {
    auto rep = verify_metric_axioms(matrix({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}));
    ASSERT_EQ(rep.triangle_violations.size(), 1u);
    EXPECT_EQ(rep.triangle_violations[0].x, 0u);
    EXPECT_EQ(rep.triangle_violations[0].z, 1u);
    EXPECT_EQ(rep.triangle_violations[0].y, 2u);
    EXPECT_DOUBLE_EQ(rep.max_triangle_defect, 1.0);
}

TEST(Axioms, NegativeOrNanIsMalformed) {
    EXPECT_THROW(
        {
            try {
                verify_metric_axioms(matrix({{0, -1}, {-1, 0}}));
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), ErrorCode::MalformedSpace);
                throw;
            }
        },
        Error);
    EXPECT_THROW(verify_metric_axioms(matrix({{0, NAN}, {NAN, 0}})), Error);
}

TEST(Axioms, AsymmetryAndDiagonalReported) {
    auto rep = verify_metric_axioms(matrix({{0.5, 1}, {2, 0}}));
    EXPECT_FALSE(rep.ok());
    EXPECT_EQ(rep.asymmetric_pairs.size(), 1u);
    EXPECT_EQ(rep.nonzero_diagonal.size(), 1u);
}

TEST(Axioms, HalflineSampleHasNoViolations) {
    auto c = build_halfline(5, 10);
    auto rep = verify_metric_axioms(c.space(), 1e-12);
    EXPECT_TRUE(rep.triangle_violations.empty());
}

TEST(Axioms, EveryCorpusSpacePasses) {
    std::vector<CorpusSpace> spaces = {
        build_halfline(6, 8),
        build_cusp(cusp_parameters(0.05, 0.1)),
        build_ball_sequence(4, 1),
        build_slit_plane({0.4, 1.0, 2.0}, 16),
        build_cusp_reparam(cusp_parameters(0.1, 0.1)),
        build_cusp_union_segment(11, 6, true),
    };
    for (const auto& c : spaces) {
        auto rep = verify_metric_axioms(c.space(), 1e-9);
        EXPECT_TRUE(rep.ok()) << c.name;
    }
}

TEST(Distance, HalflineEndpoints) {
    auto F = halfline_formula(5);
    EXPECT_DOUBLE_EQ(F->distance(Param{2.0}, Param{3.0}), 5.0 / 9.0);
    EXPECT_DOUBLE_EQ(F->distance(Param{0.0}, Param{2.0}), 1.75);
}

TEST(Distance, CuspPair) {
    auto F = cusp_formula();
    EXPECT_NEAR(F->distance(Param{0.1}, Param{-0.1}), 0.002, 1e-15);
}

TEST(Distance, SelfDistanceZero) {
    auto s = path_graph(4);
    for (PointId x = 0; x < 4; ++x) EXPECT_EQ(s.distance(x, x), 0.0);
}

TEST(Distance, GraphShortestPath) {
    WeightedGraph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 5.0}, {2, 3, 0.5}});
    auto s = MetricSpace::from_graph(g);
    EXPECT_DOUBLE_EQ(s.distance(0, 2), 2.0);
    EXPECT_DOUBLE_EQ(s.distance(3, 0), 2.5);
}

TEST(Distance, DisconnectedGraphIsUnreachable) {
    auto s = MetricSpace::from_graph(WeightedGraph(3, {{0, 1, 1.0}}));
    try {
        s.distance(0, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Unreachable);
    }
}

TEST(Distance, InvalidPoint) {
    auto s = path_graph(3);
    EXPECT_THROW(s.distance(0, 7), Error);
}

TEST(Graph, RejectsNonPositiveLengths) {
    EXPECT_THROW(WeightedGraph(2, {{0, 1, 0.0}}), Error);
    EXPECT_THROW(WeightedGraph(2, {{0, 1, -1.0}}), Error);
}

TEST(Ball, FullAndSingleton) {
    auto s = path_graph(5);
    EXPECT_EQ(ball(s, 2, 100.0).size(), 5u);
    EXPECT_EQ(ball(s, 2, 0.5), std::vector<PointId>{2});
}

TEST(Ball, PathMiddle) {
    auto s = path_graph(5);
    EXPECT_EQ(ball(s, 2, 1.5), (std::vector<PointId>{1, 2, 3}));
}

TEST(Ball, OpenBoundary) {
    auto s = path_graph(5);
    EXPECT_EQ(ball(s, 2, 1.0), std::vector<PointId>{2});
    EXPECT_THROW(ball(s, 2, 0.0), Error);
}

TEST(Ball, FormulaGridMatchesBruteForce) {
    auto c = build_slit_plane({0.3, 0.9, 1.7, 2.5}, 24);
    auto s = c.space();
    for (PointId x = 0; x < s.size(); x += 7)
        for (double r : {0.2, 0.7, 1.9}) {
            std::vector<PointId> brute;
            for (PointId y = 0; y < s.size(); ++y)
                if (s.distance(x, y) < r) brute.push_back(y);
            EXPECT_EQ(ball(s, x, r), brute);
        }
}

TEST(Sampling, CuspThreePoints) {
    auto sampled = sample_formula_space(cusp_formula(), {{-1.0}, {0.0}, {1.0}});
    EXPECT_EQ(sampled.space.kind(), SpaceKind::ExplicitMatrix);
    EXPECT_DOUBLE_EQ(sampled.space.distance(0, 2), 2.0);
    EXPECT_EQ(sampled.provenance[1], Param{0.0});
}

TEST(Sampling, SingleIntervalHalfline) {
    auto sampled = sample_formula_space(halfline_formula(1), {{0.0}, {1.0}});
    EXPECT_DOUBLE_EQ(sampled.space.distance(0, 1), 1.0);
}

TEST(Sampling, Errors) {
    EXPECT_THROW(sample_formula_space(cusp_formula(), {{0.5}}), Error);
    try {
        sample_formula_space(cusp_formula(), {{0.5}, {0.5}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicatePoint);
    }
}

TEST(Sampling, MatrixAgreesWithRule) {
    auto c = build_halfline(4, 5);
    auto sampled = sample_formula_space(c.formula, c.samples);
    auto live = c.space();
    for (PointId x = 0; x < live.size(); ++x)
        for (PointId y = 0; y < live.size(); ++y) EXPECT_EQ(sampled.space.distance(x, y), live.distance(x, y));
}

TEST(EpsilonGraph, CompleteEdgelessAndPath) {
    auto s = line_points({0, 1, 2, 3});
    EXPECT_EQ(epsilon_graph(s, 10.0).edge_count(), 6u);
    EXPECT_EQ(epsilon_graph(s, 1.0).edge_count(), 0u);
    auto g = epsilon_graph(s, 1.5);
    ASSERT_EQ(g.edge_count(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(g.find_edge(i, i + 1).has_value());
}

TEST(EpsilonGraph, Monotone) {
    auto c = build_cusp(cusp_parameters(0.1, 0.1));
    auto s = c.space();
    auto small = epsilon_graph(s, 0.05), big = epsilon_graph(s, 0.2);
    for (const auto& e : small.edges()) EXPECT_TRUE(big.find_edge(e.u, e.v).has_value());
}

TEST(Measure, Validation) {
    EXPECT_THROW(Measure(MeasureFlavor::Vertex, {0.0, 0.0}), Error);
    EXPECT_THROW(Measure(MeasureFlavor::Vertex, {1.0, -1.0}), Error);
    EXPECT_DOUBLE_EQ(Measure::counting(3).total(), 3.0);
}

TEST(ScalarField, RejectsNan) { EXPECT_THROW(ScalarField({1.0, NAN}), Error); }

TEST(Diameter, Path) {
    EXPECT_DOUBLE_EQ(diameter(path_graph(5, 0.5)), 2.0);
    EXPECT_DOUBLE_EQ(resolution(path_graph(5, 0.5)), 0.5);
}
