#include <gtest/gtest.h>

#include <cmath>

#include "metricgeo/corpus.hpp"
#include "metricgeo/lipschitz.hpp"

using namespace metricgeo;

namespace {

MetricSpace line_points(const std::vector<double>& xs) {
    std::vector<std::vector<double>> rows(xs.size(), std::vector<double>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) rows[i][j] = std::abs(xs[i] - xs[j]);
    return MetricSpace::from_matrix(DistanceMatrix::from_rows(rows));
}

std::vector<double> grid01(int n) {
    std::vector<double> xs;
    for (int i = 0; i <= n; ++i) xs.push_back(static_cast<double>(i) / n);
    return xs;
}

PointId find_param(const CorpusSpace& c, double t) {
    for (PointId i = 0; i < c.samples.size(); ++i)
        if (c.samples[i][0] == t) return i;
    throw std::runtime_error("parameter not sampled");
}

}  // namespace

TEST(Oscillation, IdentitySlope) {
    auto s = line_points({0.0, 0.5, 1.0});
    ScalarField f({0.0, 0.5, 1.0});
    EXPECT_DOUBLE_EQ(d_r_oscillation(s, f, 0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(d_r_oscillation(s, f, 0, 0.25), 0.0);
    EXPECT_THROW(d_r_oscillation(s, f, 0, 0.0), Error);
}

TEST(Oscillation, ConstantIsZero) {
    auto s = line_points(grid01(10));
    auto f = ScalarField::constant(11, 3.0);
    for (PointId x = 0; x < 11; ++x)
        for (double r : {0.05, 0.3, 2.0}) EXPECT_EQ(d_r_oscillation(s, f, x, r), 0.0);
}

TEST(Oscillation, CuspOriginCoveringOnePoint) {
    const double t = 0.1;
    auto c = build_cusp({-0.5, -t, 0.0, t, 0.5});
    auto s = c.space();
    double r = t * t * std::sqrt(1.0 + t * t);
    PointId origin = find_param(c, 0.0);
    // A_t and B_t sit exactly at distance r.
    EXPECT_NEAR(d_r_oscillation(s, c.field("g"), origin, r * (1 + 1e-12)), 1.0 / std::sqrt(1.0 + t * t), 1e-9);
    EXPECT_NEAR(1.0 / std::sqrt(1.0 + t * t), 0.99504, 1e-5);
}

TEST(SlopeSup, IdentityIsOne) {
    auto s = line_points({0.0, 0.1, 0.35, 0.7, 1.3});
    ScalarField f({0.0, 0.1, 0.35, 0.7, 1.3});
    for (PointId x = 0; x < 5; ++x)
        for (double r : {0.2, 0.6, 5.0}) {
            double v = slope_sup(s, f, x, r);
            if (v > 0.0) {
                EXPECT_NEAR(v, 1.0, 1e-15);
            }
        }
}

TEST(SlopeSup, IndicatorTwoPoints) {
    auto s = line_points({0.0, 0.25});
    ScalarField f({1.0, 0.0});
    EXPECT_DOUBLE_EQ(slope_sup(s, f, 0, 0.25), 4.0);
    EXPECT_DOUBLE_EQ(slope_sup(s, f, 0, 0.2), 0.0);
}

TEST(SlopeSup, HalflineLocallyEuclidean) {
    auto c = build_halfline(6, 40);
    auto s = c.space();
    const auto& g = c.field("g");
    for (int n = 1; n <= 6; ++n) {
        PointId x = find_param(c, (n - 1) + 0.5);
        EXPECT_NEAR(slope_sup(s, g, x, 0.9 / (n + 1)), 1.0, 1e-12) << n;
    }
}

TEST(SlopeSup, NondecreasingInR) {
    auto c = build_halfline(4, 10);
    auto s = c.space();
    const auto& g = c.field("g");
    for (PointId x = 0; x < s.size(); x += 3) {
        double prev = 0.0;
        for (double r = 0.05; r < 5.0; r *= 1.5) {
            double v = slope_sup(s, g, x, r);
            EXPECT_GE(v, prev);
            EXPECT_LE(d_r_oscillation(s, g, x, r), v + 1e-15);
            prev = v;
        }
    }
}

TEST(Schedule, Validation) {
    EXPECT_THROW(ScaleSchedule({1.0}), Error);
    EXPECT_THROW(ScaleSchedule({1.0, 1.0}), Error);
    EXPECT_THROW(ScaleSchedule({1.0, -0.5}), Error);
    EXPECT_THROW((ScheduleSpec{0.0, 1.0, 0.0}.validate()), Error);
}

TEST(Schedule, DefaultStopsAtTwiceNearestNeighbour) {
    auto s = line_points(grid01(64));
    SchedulePolicy policy(s, {});
    auto sched = policy.for_point(s, 10);
    EXPECT_DOUBLE_EQ(sched.coarsest(), 0.25);
    EXPECT_DOUBLE_EQ(sched.finest(), 2.0 / 64.0);
    for (std::size_t k = 1; k < sched.radii().size(); ++k) EXPECT_LT(sched.radii()[k], sched.radii()[k - 1]);
}

TEST(LipEstimate, HalflineAllPointsNearOne) {
    auto c = build_halfline(8, 50);
    auto s = c.space();
    auto field = lip_field(s, c.field("g"), SchedulePolicy(s, {}));
    for (const auto& e : field) {
        EXPECT_NEAR(e.value, 1.0, 0.02) << e.point;
        EXPECT_FALSE(e.isolated_at_finest);
    }
}

TEST(LipEstimate, CuspOrigin) {
    auto c = build_cusp(cusp_parameters(1e-3));
    auto s = c.space();
    auto e = lip_estimate(s, c.field("g"), find_param(c, 0.0), SchedulePolicy(s, {}));
    EXPECT_LE(e.value, 1.0);
    EXPECT_GE(e.value, 0.98);
}

TEST(LipEstimate, ConstantConverged) {
    auto s = line_points(grid01(20));
    auto e = lip_estimate(s, ScalarField::constant(21, -2.0), 5, SchedulePolicy(s, {}));
    EXPECT_EQ(e.value, 0.0);
    EXPECT_TRUE(e.converged);
}

TEST(LipEstimate, IsolatedAtFinest) {
    auto s = line_points({0.0, 0.01, 5.0});
    auto e = lip_estimate(s, ScalarField({0, 0, 1}), 2, ScaleSchedule({1.0, 0.5}));
    EXPECT_TRUE(e.isolated_at_finest);
    EXPECT_EQ(e.value, 0.0);
}

TEST(LipEstimate, Homogeneous) {
    auto c = build_halfline(3, 10);
    auto s = c.space();
    SchedulePolicy policy(s, {});
    const auto& g = c.field("g");
    for (PointId x = 0; x < s.size(); x += 4) {
        double base = lip_estimate(s, g, x, policy).value;
        EXPECT_EQ(lip_estimate(s, g.scaled(-4.0), x, policy).value, 4.0 * base);
    }
}

TEST(GlobalLip, HalflinePairs) {
    for (int n : {3, 10}) {
        auto c = build_halfline(n, 10);
        auto s = c.space();
        auto L = global_lip_constant(s, c.field("g"));
        double pair = static_cast<double>(n) * n / (2.0 * n - 1.0);
        EXPECT_NEAR(L.value, pair, 1e-12);
        EXPECT_EQ(c.samples[L.x][0], n - 1.0);
        EXPECT_EQ(c.samples[L.y][0], static_cast<double>(n));
    }
    EXPECT_NEAR(100.0 / 19.0, 5.263, 1e-3);
}

TEST(GlobalLip, CuspPair) {
    auto c = build_cusp({-0.5, -0.01, 0.0, 0.01, 0.5});
    auto L = global_lip_constant(c.space(), c.field("g"));
    EXPECT_NEAR(L.value, 100.0, 1e-9);
}

TEST(GlobalLip, IdentityAndDegenerate) {
    auto s = line_points({0.0, 0.3, 0.4, 2.0});
    EXPECT_NEAR(global_lip_constant(s, ScalarField({0.0, 0.3, 0.4, 2.0})).value, 1.0, 1e-15);
    auto dup = MetricSpace::from_matrix(DistanceMatrix::from_rows({{0, 0}, {0, 0}}));
    try {
        global_lip_constant(dup, ScalarField({0.0, 1.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateMetric);
    }
}

TEST(GlobalLip, DominatesPointwise) {
    auto c = build_halfline(5, 12);
    auto s = c.space();
    auto f = c.field("g");
    auto sup = sup_lip(lip_field(s, f, SchedulePolicy(s, {}))).value;
    EXPECT_GE(global_lip_constant(s, f).value, sup);
}

TEST(GlobalLip, LexicographicWitness) {
    auto s = line_points({0.0, 1.0, 2.0, 3.0});
    auto L = global_lip_constant(s, ScalarField({0.0, 1.0, 2.0, 3.0}));
    EXPECT_EQ(L.x, 0u);
    EXPECT_EQ(L.y, 1u);
}

TEST(Norms, ConstantField) {
    auto s = line_points(grid01(8));
    SchedulePolicy policy(s, {});
    auto f = ScalarField::constant(9, -1.5);
    EXPECT_DOUBLE_EQ(d_infty_norm(s, f, policy), 1.5);
    EXPECT_DOUBLE_EQ(d_norm(s, f, 3, policy), 1.5);
}

TEST(Norms, VanishingAtBasepoint) {
    auto s = line_points(grid01(16));
    ScalarField f(grid01(16));
    EXPECT_NEAR(d_norm(s, f, 0, SchedulePolicy(s, {})), 1.0, 1e-12);
}

TEST(Norms, HalflineDInfty) {
    auto c = build_halfline(4, 50);
    auto s = c.space();
    EXPECT_NEAR(d_infty_norm(s, c.field("g"), SchedulePolicy(s, {})), 1.0, 0.02);
}

TEST(Norms, CombDifference) {
    auto c = build_comb(6);
    auto s = c.space();
    SchedulePolicy policy(s, ScheduleSpec{0.01, 0.5, 0.0});
    auto diff = c.field("f_3") - c.field("f_5");
    EXPECT_NEAR(d_infty_norm(s, diff, policy), 0.5, 1e-9);
    PointId origin = 0;  // X_0 starts at (0, 0)
    EXPECT_EQ(c.samples[origin][0], 0.0);
    EXPECT_EQ(c.samples[origin][1], 0.0);
    EXPECT_NEAR(d_norm(s, diff, origin, policy), 0.125, 1e-9);
}

TEST(Norms, Subadditive) {
    auto c = build_halfline(3, 10);
    auto s = c.space();
    SchedulePolicy policy(s, {});
    auto f = c.field("g");
    auto h = ScalarField::from_rule(std::span<const Param>(c.samples), [](std::span<const double> p) {
        return std::sin(3.0 * p[0]);
    });
    EXPECT_LE(d_infty_norm(s, f + h, policy), d_infty_norm(s, f, policy) + d_infty_norm(s, h, policy) + 1e-12);
}

TEST(Membership, HalflineN20) {
    auto c = build_halfline(20, 50);
    auto s = c.space();
    auto rep = classify_membership(s, c.field("g"), SchedulePolicy(s, {}), 2.0);
    EXPECT_TRUE(rep.in_D);
    EXPECT_FALSE(rep.in_LIP);
    EXPECT_TRUE(rep.in_LIP_loc);
    EXPECT_EQ(c.samples[rep.global.x][0], 19.0);
    EXPECT_EQ(c.samples[rep.global.y][0], 20.0);
    EXPECT_NEAR(rep.global.value, 400.0 / 39.0, 1e-12);
}

TEST(Membership, Cusp) {
    auto c = build_cusp(cusp_parameters(0.01));
    auto s = c.space();
    auto rep = classify_membership(s, c.field("g"), SchedulePolicy(s, {}), 2.0);
    EXPECT_TRUE(rep.in_D);
    EXPECT_FALSE(rep.in_LIP);
    EXPECT_FALSE(rep.in_LIP_loc);
    ASSERT_TRUE(rep.local_failure.has_value());
    EXPECT_GT(rep.local_failure->pair.value, 2.0);
}

TEST(Membership, IdentityAllTrue) {
    auto s = line_points(grid01(50));
    auto rep = classify_membership(s, ScalarField(grid01(50)), SchedulePolicy(s, {}), 2.0);
    EXPECT_TRUE(rep.in_D);
    EXPECT_TRUE(rep.in_LIP);
    EXPECT_TRUE(rep.in_LIP_loc);
}
