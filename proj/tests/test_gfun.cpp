#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <gbase/gfun.hpp>

#include "oracles.hpp"

using namespace gbase;
using F = GAdditiveFunction;

TEST(Function, WeightsByKind)
{
    const auto g = F::geom_damped(2, 0.5, {1.0, 3.0});
    EXPECT_EQ(g.kind(), F::Kind::geom_damped);
    EXPECT_DOUBLE_EQ(g.weight(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(g.weight(2, 3), 3.0 / 8);
    EXPECT_EQ(g.weight(0, 5), 0.0);

    const auto p = F::poly_damped(1, 2.0, {1.0});
    EXPECT_EQ(p.kind(), F::Kind::poly_damped);
    EXPECT_DOUBLE_EQ(p.weight(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(p.weight(1, 3), 1.0 / 16);

    const auto t = F::table(2, {{{1, 0}, 0.25}, {{2, 4}, -1.5}});
    EXPECT_EQ(t.kind(), F::Kind::table);
    EXPECT_EQ(t.weight(1, 0), 0.25);
    EXPECT_EQ(t.weight(2, 4), -1.5);
    EXPECT_EQ(t.weight(2, 5), 0.0);
    EXPECT_EQ(t.weight(1, 1000), 0.0);

    const auto s = F::sum(g, F::geom_damped(2, -0.25, {2.0}));
    EXPECT_EQ(s.kind(), F::Kind::sum);
    EXPECT_DOUBLE_EQ(s.weight(1, 2), 0.25 + 2.0 / 16);
    EXPECT_DOUBLE_EQ(s.weight(2, 2), 0.75);
}

TEST(Function, ConstructionErrors)
{
    EXPECT_THROW(F::geom_damped(1, 1.0, {1.0}), domain_error);
    EXPECT_THROW(F::geom_damped(1, -1.0, {1.0}), domain_error);
    EXPECT_THROW(F::poly_damped(1, 0.0, {1.0}), domain_error);
    EXPECT_THROW(F::geom_damped(1, 0.5, {1.0, 2.0}), domain_error);
    EXPECT_THROW(F::table(1, {{{2, 0}, 1.0}}), domain_error);
    EXPECT_THROW(F::table(1, {{{1, -1}, 1.0}}), domain_error);
    EXPECT_THROW(F::sum(F::zero(1), F::zero(2)), domain_error);
    EXPECT_THROW(F::zero(1).weight(2, 0), domain_error);
}

TEST(Function, EventuallyZero)
{
    EXPECT_EQ(F::zero(1).eventually_zero_from(), 0);
    EXPECT_EQ(F::digit_count(1, 7).eventually_zero_from(), 7);
    EXPECT_EQ(F::geom_damped(1, 0.0, {1.0}).eventually_zero_from(), 1);
    EXPECT_FALSE(F::geom_damped(1, 0.5, {1.0}).eventually_zero_from());
    EXPECT_FALSE(F::poly_damped(1, 1.0, {1.0}).eventually_zero_from());
    EXPECT_EQ(F::sum(F::digit_count(1, 3), F::table(1, {{{1, 9}, 2.0}})).eventually_zero_from(), 10);
}

TEST(Function, Description)
{
    EXPECT_EQ(F::geom_damped(1, 0.5, {1.0}).description(), "geom:0.5:1");
    EXPECT_EQ(F::sum(F::poly_damped(2, 2, {1, 0}), F::table(2, {{{2, 1}, 3.0}})).description(),
              "sum:(poly:2:1,0)+(table[2,1,3])");
}

TEST(Eval, MatchesOracle)
{
    for (const char* c : {"1,1", "2,1", "1,1,1"}) {
        const auto b = build_base(c, 60);
        const auto f = F::geom_damped(b.max_digit(), 0.6, b.max_digit() == 2 ? std::vector<double>{1.0, -0.5} : std::vector<double>{1.0});
        const auto g = oracle::G(b.coeffs().a, 40);
        std::mt19937_64 rng(5);
        for (int i = 0; i < 2000; ++i) {
            const std::uint64_t n = rng() % g[35];
            EXPECT_NEAR(eval(f, b, n), oracle::f_of(g, [&](int j, int k) { return f.weight(j, k); }, n), 1e-14);
        }
    }
    const auto z = build_base("1,1", 30);
    // 12 = G_4 + G_2 + G_0
    EXPECT_DOUBLE_EQ(eval(F::geom_damped(1, 0.5, {1.0}), z, 12), 1 + 0.25 + 0.0625);
    EXPECT_THROW(eval(F::zero(2), z, 3), domain_error);
}

TEST(Eval, AdditiveOverTopDigit)
{
    for (const char* c : {"1,1", "2,1", "1,1,1"}) {
        const auto b = build_base(c, 40);
        const auto f = F::poly_damped(b.max_digit(), 1.5, {1.0});
        for (std::uint64_t n = 1; n < b.G_small()[11]; ++n) {
            const auto e = greedy_expand(b, n);
            const int k = e.top_level();
            const std::uint64_t m = n - e.digits[k] * b.G_small()[k];
            ASSERT_NEAR(eval(f, b, n), eval(f, b, m) + f.weight(e.digits[k], k), 1e-14);
        }
    }
}

TEST(Phase, UnitModulus)
{
    const auto b = build_base("2,1", 60);
    const auto f = F::geom_damped(2, 0.7, {1.0, 2.5});
    std::mt19937_64 rng(17);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t n = rng() % b.G_small()[40];
        const double t = std::uniform_real_distribution<double>(-50, 50)(rng);
        EXPECT_NEAR(std::abs(phase(f, b, n, t)), 1.0, 1e-15);
    }
}

TEST(Sum, Linearity)
{
    const auto b = build_base("1,1,1", 60);
    const auto f = F::geom_damped(1, 0.5, {1.0});
    const auto g = F::poly_damped(1, 2.0, {-3.0});
    const auto fg = F::sum(f, g);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t n = rng() % b.G_small()[45];
        EXPECT_NEAR(eval(fg, b, n), eval(f, b, n) + eval(g, b, n), 1e-13);
    }
}

TEST(WeightCache, MatchesFunction)
{
    const auto f = F::sum(F::geom_damped(2, 0.3, {1.0, 2.0}), F::poly_damped(2, 1.0, {0.0, 1.0}));
    const WeightTable w(f, 40);
    for (int k = 0; k < 40; ++k)
        for (int j = 0; j <= 2; ++j) EXPECT_EQ(w(j, k), f.weight(j, k));
    EXPECT_DOUBLE_EQ(w.sum_digits({1, 0, 2}), f.weight(1, 0) + f.weight(2, 2));
}
