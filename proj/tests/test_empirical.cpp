#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <gbase/empirical.hpp>

#include "oracles.hpp"

using namespace gbase;
using F = GAdditiveFunction;

TEST(Enumerate, MatchesOracleAndIsThreadIndependent)
{
    for (const char* c : {"1,1", "1,1,1", "2,1"}) {
        const auto b = build_base(c, 60);
        const auto f = F::geom_damped(b.max_digit(), 0.5, {1.0});
        const auto g = oracle::G(b.coeffs().a, 40);
        const auto one = enumerate_values(b, f, 300000, 1);
        const auto many = enumerate_values(b, f, 300000, 4);
        EXPECT_EQ(one, many);
        for (std::uint64_t n = 0; n < 300000; n += 997)
            EXPECT_NEAR(one[n], oracle::f_of(g, [&](int j, int k) { return f.weight(j, k); }, n), 1e-14);
    }
}

TEST(Cdf, DigitCountExample)
{
    const auto z = build_base("1,1", 40);
    const auto f = F::digit_count(1, 40);
    const std::vector<double> grid{-1, 0, 0.5, 1, 2, 100};
    const auto rows = empirical_cdf(z, f, 21, grid);
    EXPECT_EQ(rows[0].second, 0.0);
    EXPECT_DOUBLE_EQ(rows[1].second, 1.0 / 21);
    EXPECT_DOUBLE_EQ(rows[2].second, 1.0 / 21);
    EXPECT_DOUBLE_EQ(rows[3].second, 7.0 / 21);
    EXPECT_DOUBLE_EQ(rows[5].second, 1.0);
}

TEST(Cdf, ZeroFunctionIsStep)
{
    const auto z = build_base("1,1", 40);
    const auto d = empirical_distribution(z, F::zero(1), 1000);
    EXPECT_EQ(d.cdf(-1e-300), 0.0);
    EXPECT_EQ(d.cdf(0), 1.0);
    EXPECT_EQ(ks_distance(d, empirical_distribution(z, F::zero(1), 55)), 0.0);
}

TEST(Cdf, MonotoneAndRightContinuous)
{
    const auto b = build_base("2,1", 60);
    const auto f = F::geom_damped(2, -0.6, {1.0, -0.3});
    const auto d = empirical_distribution(b, f, 100000);
    EXPECT_TRUE(std::is_sorted(d.values.begin(), d.values.end()));
    EXPECT_EQ(d.values.size(), 100000u);
    double prev = 0;
    for (double z = -3; z <= 3; z += 0.01) {
        const double F = d.cdf(z);
        EXPECT_GE(F, prev);
        prev = F;
    }
    for (std::size_t i = 0; i < d.values.size(); i += 1013) {
        const double v = d.values[i];
        EXPECT_EQ(d.cdf(v), d.cdf(std::nextafter(v, std::numeric_limits<double>::infinity())));
        EXPECT_GT(d.cdf(v), d.cdf(std::nextafter(v, -std::numeric_limits<double>::infinity())));
    }
    EXPECT_EQ(d.cdf(1e300), 1.0);
}

TEST(Cdf, CapacityAndDomainErrors)
{
    const auto z = build_base("1,1", 10);
    EXPECT_THROW(empirical_distribution(z, F::zero(1), 0), domain_error);
    try {
        empirical_distribution(z, F::zero(1), 145);
        FAIL();
    } catch (const capacity_error& e) {
        EXPECT_EQ(e.required_level(), 11);
    }
    EXPECT_NO_THROW(empirical_distribution(z, F::zero(1), 144));
}

TEST(Sketch, RankErrorBelowOnePermille)
{
    const auto z = build_base("1,1", 60);
    const auto f = F::geom_damped(1, 0.5, {1.0});
    const std::uint64_t N = 12'000'000;
    const auto sk = empirical_distribution(z, f, N, thread_count());
    EXPECT_FALSE(sk.exact);
    EXPECT_EQ(sk.cumulative.back(), double(N));
    auto values = enumerate_values(z, f, N, thread_count());
    std::sort(values.begin(), values.end());
    for (double q = -0.01; q <= 2.01; q += 0.01) {
        const double exact = double(std::upper_bound(values.begin(), values.end(), q) - values.begin()) / double(N);
        EXPECT_LE(std::fabs(sk.cdf(q) - exact), 1e-3) << q;
    }
}

TEST(Charfn, BasicProperties)
{
    const auto b = build_base("1,1,1", 60);
    const auto f = F::poly_damped(1, 2.0, {1.0});
    const auto values = enumerate_values(b, f, 50000);
    EXPECT_EQ(empirical_charfn(values, 0.0), cplx(1.0));
    for (double t : {0.3, 1.0, 4.0}) {
        const cplx p = empirical_charfn(values, t), m = empirical_charfn(values, -t);
        EXPECT_LE(std::abs(p), 1.0 + 1e-15);
        EXPECT_LT(std::abs(p - std::conj(m)), 1e-15);
    }
    EXPECT_THROW(empirical_charfn(std::span<const double>{}, 1.0), domain_error);
}

TEST(Charfn, PrefixConsistencyWithBlockRecurrence)
{
    for (const char* c : {"1,1", "1,1,1", "2,1"}) {
        const auto b = build_base(c, 60);
        const auto f = F::geom_damped(b.max_digit(), 0.5, {1.0});
        int K = 0;
        while (b.G_small()[K + 1] <= 500000) ++K;
        const auto values = enumerate_values(b, f, b.G_small()[K]);
        for (double t : {0.3, 1.0, 2.5}) {
            const auto tr = h_sequence(b, f, t, K);
            for (int k = 0; k <= K; ++k) {
                const auto n = b.G_small()[k];
                EXPECT_LT(std::abs(empirical_charfn(std::span<const double>(values.data(), n), t) - tr.H[k] / double(n)),
                          1e-10);
            }
        }
    }
}

TEST(Ks, DistancesAndMismatch)
{
    const auto z = build_base("1,1", 60);
    const auto f = F::geom_damped(1, 0.5, {1.0});
    const auto d10 = empirical_distribution(z, f, z.G_small()[10]);
    const auto d14 = empirical_distribution(z, f, z.G_small()[14]);
    const auto d18 = empirical_distribution(z, f, z.G_small()[18]);
    EXPECT_EQ(ks_distance(d14, d14), 0.0);
    const double a = ks_distance(d10, d14), b = ks_distance(d14, d18);
    EXPECT_GT(a, b);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_EQ(ks_distance(d10, d14), ks_distance(d14, d10));
    const auto other = empirical_distribution(z, F::geom_damped(1, 0.4, {1.0}), 100);
    EXPECT_THROW(ks_distance(d10, other), domain_error);
}

TEST(Ks, MatchesDirectSupOverGrid)
{
    const auto b = build_base("2,1", 60);
    const auto f = F::geom_damped(2, 0.5, {1.0, 0.5});
    const auto d1 = empirical_distribution(b, f, 5000), d2 = empirical_distribution(b, f, 12345);
    double best = 0;
    for (double v : d1.values) best = std::max(best, std::fabs(d1.cdf(v) - d2.cdf(v)));
    for (double v : d2.values) best = std::max(best, std::fabs(d1.cdf(v) - d2.cdf(v)));
    EXPECT_DOUBLE_EQ(ks_distance(d1, d2), best);
}

TEST(Chang, ExamplesAndRandomRanges)
{
    const auto z = build_base("1,1", 60);
    const auto tri = build_base("1,1,1", 60);
    EXPECT_LT(chang_decomposition_residual(z, F::geom_damped(1, 0.5, {1.0}), 1.0, 100), 1e-9);
    EXPECT_LT(chang_decomposition_residual(tri, F::poly_damped(1, 2.0, {1.0}), 0.5, 777), 1e-9);

    const auto f = F::geom_damped(1, 0.5, {1.0});
    const auto values = enumerate_values(z, f, 1000);
    const auto at_gk = chang_decomposition(z, f, 0.8, 987, values);
    EXPECT_LT(at_gk.residual, 1e-12);
    for (std::size_t q = 0; q + 1 < at_gk.weights.size(); ++q) EXPECT_EQ(at_gk.weights[q], cplx(0.0));
    EXPECT_LT(std::abs(at_gk.weights.back() - 1.0), 1e-15);

    std::mt19937_64 rng(31);
    for (const char* c : {"1,1", "1,1,1", "2,1"}) {
        const auto b = build_base(c, 60);
        for (const auto& g : {F::geom_damped(b.max_digit(), 0.5, {1.0}), F::poly_damped(b.max_digit(), 2.0, {1.0})}) {
            const auto vals = enumerate_values(b, g, 1000000);
            for (int i = 0; i < 20; ++i) {
                const std::uint64_t N = 1 + rng() % 999999;
                const auto ch = chang_decomposition(b, g, 0.7, N, vals);
                EXPECT_LT(ch.residual, 1e-9) << c << " N=" << N;
            }
        }
    }
}
