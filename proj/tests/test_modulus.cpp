#include <gtest/gtest.h>

#include <random>

#include "metricgeo/modulus.hpp"
#include "support.hpp"

using namespace metricgeo;
using testing_support::pick;

namespace {

WeightedGraph parallel_edges(std::size_t k) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < k; ++i) e.push_back({0, 1, 1.0});
    return WeightedGraph(2, e);
}

WeightedGraph path_graph(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
    return WeightedGraph(n, e);
}

std::vector<double> ones(std::size_t m) { return std::vector<double>(m, 1.0); }

}  // namespace

TEST(Exponent, Parsing) {
    EXPECT_EQ(exponent_from(1), Exponent::One);
    EXPECT_EQ(exponent_from(2), Exponent::Two);
    EXPECT_EQ(exponent_from(kInfinity), Exponent::Infinity);
    try {
        exponent_from(3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedExponent);
    }
}

TEST(Modulus, ParallelEdgesP2) {
    for (std::size_t k : {1, 2, 3, 5}) {
        auto g = parallel_edges(k);
        auto fam = CurveFamily::connecting({0}, {1});
        auto r = modulus_p(g, ones(k), fam, Exponent::Two);
        EXPECT_NEAR(r.value, static_cast<double>(k), 1e-9);
        for (double rho : r.rho) EXPECT_NEAR(rho, 1.0, 1e-9);
        EXPECT_NEAR(brute_force_modulus(g, ones(k), fam, Exponent::Two), static_cast<double>(k), 1e-6);
    }
}

TEST(Modulus, SingleCurveInfinity) {
    WeightedGraph g(3, {{0, 1, 0.75}, {1, 2, 1.5}});
    auto fam = CurveFamily::explicit_curves({walk_from_vertices(g, std::vector<std::size_t>{0, 1, 2})});
    auto r = modulus_p(g, ones(2), fam, Exponent::Infinity);
    EXPECT_NEAR(r.value, 1.0 / 2.25, 1e-12);
}

TEST(Modulus, PathGraphP1) {
    auto g = path_graph(3);
    auto r = modulus_p(g, ones(2), CurveFamily::connecting({0}, {2}), Exponent::One);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(Modulus, SingleCurveP2) {
    for (std::size_t m : {1, 3, 6}) {
        auto g = path_graph(m + 1);
        std::vector<std::size_t> vs;
        for (std::size_t i = 0; i <= m; ++i) vs.push_back(i);
        auto fam = CurveFamily::explicit_curves({walk_from_vertices(g, vs)});
        EXPECT_NEAR(brute_force_modulus(g, ones(m), fam, Exponent::Two), 1.0 / m, 1e-9);
        EXPECT_NEAR(modulus_p(g, ones(m), fam, Exponent::Two).value, 1.0 / m, 1e-12);
    }
}

TEST(Modulus, EmptyFamilies) {
    auto g = path_graph(3);
    EXPECT_EQ(modulus_p(g, ones(2), CurveFamily::explicit_curves({}), Exponent::Two).value, 0.0);
    EXPECT_EQ(brute_force_modulus(g, ones(2), CurveFamily::explicit_curves({}), Exponent::One), 0.0);
    EXPECT_EQ(modulus_p(g, ones(2), CurveFamily::through_edges({}), Exponent::One).value, 0.0);
}

TEST(Modulus, UnrealizableFamily) {
    WeightedGraph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    try {
        modulus_p(g, ones(2), CurveFamily::connecting({0}, {3}), Exponent::Two);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyFamily);
    }
    EXPECT_THROW(CurveFamily::connecting({0, 1}, {1}), Error);
}

TEST(Modulus, PathLimit) {
    // Complete graph on 9 vertices has far more than 50 simple 0-8 paths.
    std::vector<Edge> e;
    for (std::size_t a = 0; a < 9; ++a)
        for (std::size_t b = a + 1; b < 9; ++b) e.push_back({a, b, 1.0});
    WeightedGraph g(9, e);
    try {
        brute_force_modulus(g, ones(e.size()), CurveFamily::connecting({0}, {8}), Exponent::Two, 50);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::PathLimit);
    }
}

TEST(Modulus, ThroughEdgesIsEdgeSum) {
    // Minimal curves are the single edges: rho(e) = 1/l(e), Mod_p = sum sigma l^{-p}.
    WeightedGraph g(3, {{0, 1, 2.0}, {1, 2, 0.5}, {0, 2, 1.0}});
    std::vector<double> sigma{1.0, 3.0, 2.0};
    auto fam = CurveFamily::through_edges({0, 1});
    EXPECT_NEAR(modulus_p(g, sigma, fam, Exponent::Two).value, 1.0 / 4.0 + 3.0 * 4.0, 1e-12);
    EXPECT_NEAR(modulus_p(g, sigma, fam, Exponent::One).value, 0.5 + 6.0, 1e-12);
    EXPECT_NEAR(modulus_p(g, sigma, fam, Exponent::Infinity).value, 2.0, 1e-12);
}

TEST(Modulus, FeasibleAndCertified) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = testing_support::random_modulus_graph(rng, 10, 150);
        auto sigma = testing_support::random_sigma(rng, g.edge_count());
        auto fam = CurveFamily::connecting({0}, {g.size() - 1});
        for (auto p : {Exponent::One, Exponent::Two, Exponent::Infinity}) {
            auto r = modulus_p(g, sigma, fam, p);
            for (const auto& c : enumerate_family(g, fam, 1000))
                EXPECT_GE(line_integral(g, c, r.rho), 1.0 - 1e-8);
            EXPECT_LE(r.lower_bound, r.upper_bound + 1e-12);
            EXPECT_LE(r.gap, 1e-6 * std::max(1.0, r.value));
            EXPECT_LE(r.iterations, 50u);
        }
    }
}

TEST(Modulus, AgreesWithBruteForce) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 8; ++trial) {
        auto g = testing_support::random_modulus_graph(rng, 9, 60);
        auto sigma = testing_support::random_sigma(rng, g.edge_count());
        auto fam = CurveFamily::connecting({0}, {g.size() - 1});
        for (auto p : {Exponent::One, Exponent::Two, Exponent::Infinity})
            EXPECT_NEAR(modulus_p(g, sigma, fam, p).value, brute_force_modulus(g, sigma, fam, p), 1e-6)
                << "trial " << trial << " p " << to_string(p);
    }
}

TEST(Modulus, MultiSourceConnecting) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 6; ++trial) {
        auto g = testing_support::random_modulus_graph(rng, 9, 60);
        const std::size_t n = g.size();
        auto fam = CurveFamily::connecting({0, 1}, {n - 1, n - 2});
        auto sigma = ones(g.edge_count());
        try {
            double bf = brute_force_modulus(g, sigma, fam, Exponent::Two, 2000);
            EXPECT_NEAR(modulus_p(g, sigma, fam, Exponent::Two).value, bf, 1e-6);
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::PathLimit);
        }
    }
}

TEST(Modulus, InfinityIsInverseMinLength) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = testing_support::random_modulus_graph(rng, 10, 150);
        auto all = enumerate_family(g, CurveFamily::connecting({0}, {g.size() - 1}), 1000);
        std::vector<Path> chosen;
        double min_len = kInfinity;
        for (const auto& p : all)
            if (rng() % 2 == 0 || chosen.empty()) {
                chosen.push_back(p);
                min_len = std::min(min_len, path_length(g, p));
            }
        auto r = modulus_p(g, ones(g.edge_count()), CurveFamily::explicit_curves(chosen), Exponent::Infinity);
        EXPECT_NEAR(r.value, 1.0 / min_len, 1e-9);
    }
}

TEST(Modulus, MonotoneAndSubadditive) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = testing_support::random_modulus_graph(rng, 10, 150);
        auto all = enumerate_family(g, CurveFamily::connecting({0}, {g.size() - 1}), 1000);
        std::vector<Path> a, b, ab;
        for (const auto& p : all) {
            bool in_a = rng() % 2 == 0, in_b = rng() % 2 == 0;
            if (in_a) a.push_back(p);
            if (in_b) b.push_back(p);
            if (in_a || in_b) ab.push_back(p);
        }
        auto sigma = testing_support::random_sigma(rng, g.edge_count());
        auto mod = [&](const std::vector<Path>& f, Exponent p) {
            return modulus_p(g, sigma, CurveFamily::explicit_curves(f), p).value;
        };
        for (auto p : {Exponent::One, Exponent::Two}) {
            double ma = mod(a, p), mb = mod(b, p), mab = mod(ab, p);
            EXPECT_LE(ma, mab + 1e-6);
            EXPECT_LE(mb, mab + 1e-6);
            EXPECT_LE(mab, ma + mb + 1e-6);
        }
    }
}

TEST(Modulus, ShorterSubcurveBound) {
    // Every s-t path contains one of the edges of a cut, so Mod(paths) <= Mod(cut edges).
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 6; ++trial) {
        auto g = testing_support::random_modulus_graph(rng, 10, 150);
        std::vector<std::size_t> cut(g.incident(0).begin(), g.incident(0).end());
        auto sigma = ones(g.edge_count());
        double paths = modulus_p(g, sigma, CurveFamily::connecting({0}, {g.size() - 1}), Exponent::Two).value;
        double edges = modulus_p(g, sigma, CurveFamily::through_edges(cut), Exponent::Two).value;
        EXPECT_LE(paths, edges + 1e-9);
    }
}

TEST(Modulus, SigmaValidation) {
    auto g = path_graph(3);
    EXPECT_THROW(modulus_p(g, std::vector<double>{1.0}, CurveFamily::connecting({0}, {2}), Exponent::Two), Error);
    EXPECT_THROW(modulus_p(g, std::vector<double>{1.0, -1.0}, CurveFamily::connecting({0}, {2}), Exponent::Two),
                 Error);
}

TEST(Modulus, Deterministic) {
    std::mt19937_64 rng(8);
    auto g = testing_support::random_modulus_graph(rng, 10, 150);
    auto fam = CurveFamily::connecting({0}, {g.size() - 1});
    auto a = modulus_p(g, ones(g.edge_count()), fam, Exponent::Two);
    auto b = modulus_p(g, ones(g.edge_count()), fam, Exponent::Two);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.rho, b.rho);
    EXPECT_EQ(a.active_paths, b.active_paths);
}

TEST(NullFamily, InfiniteAtNullVertex) {
    auto s = MetricSpace::from_graph(WeightedGraph(4, {{0, 1, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}}));
    std::vector<Curve> through_v = {Curve({0, 1, 2}), Curve({0, 1, 3}), Curve({2, 1, 3})};
    Density rho(DensityLocation::Vertex, {0.0, kInfinity, 0.0, 0.0});
    Measure mu(MeasureFlavor::Vertex, {1.0, 0.0, 1.0, 1.0});
    auto v = null_family_witness_check(s, through_v, rho, mu, 0.0);
    EXPECT_TRUE(v.condition_b);
    EXPECT_TRUE(v.condition_c);
    EXPECT_TRUE(v.claim_matches);
}

TEST(NullFamily, FiniteDensityFailsB) {
    auto s = MetricSpace::from_graph(WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}}));
    Density rho(DensityLocation::Vertex, {5.0, 5.0, 5.0});
    auto v = null_family_witness_check(s, {Curve({0, 1, 2})}, rho, Measure::counting(3), 0.0);
    EXPECT_FALSE(v.condition_b);
    EXPECT_FALSE(v.condition_c);
    EXPECT_EQ(v.finite_curves, std::vector<std::size_t>{0});
    EXPECT_FALSE(v.claim_matches);
}

TEST(NullFamily, PositiveMeasureInfinityFailsC) {
    auto s = MetricSpace::from_graph(WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}}));
    Density rho(DensityLocation::Vertex, {0.0, kInfinity, 0.0});
    auto v = null_family_witness_check(s, {Curve({0, 1, 2}), Curve({2, 1})}, rho, Measure::counting(3), 0.0);
    EXPECT_TRUE(v.condition_b);
    EXPECT_FALSE(v.condition_c);
    EXPECT_TRUE(std::isinf(v.essential_sup));
}
