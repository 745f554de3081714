#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <gbase/transform.hpp>
#include <gbase/series.hpp>

#include "oracles.hpp"

using namespace gbase;
using F = GAdditiveFunction;

namespace {

F geom_f(const LinearRecurrenceBase& b) { return F::geom_damped(b.max_digit(), 0.5, {1.0}); }
F poly_f(const LinearRecurrenceBase& b) { return F::poly_damped(b.max_digit(), 2.0, {1.0}); }

const char* const test_bases[] = {"1,1", "1,1,1", "2,1"};

// u_k from integer theta and sigma values, evaluating f on whole integers.
cplx u_reference(const LinearRecurrenceBase& b, const F& f, double t, int k)
{
    const int d = b.order();
    cplx s{0};
    for (int ell = 0; ell < d; ++ell) {
        cplx sig{0};
        for (int h = 0; h < b.a(ell); ++h) sig += phase(f, b, h * b.G(k - 1 - ell), t);
        s += (phase(f, b, theta(b, k - 1, ell), t) * sig - double(b.a(ell))) / std::pow(b.alpha(), ell + 1);
    }
    return std::pow(b.alpha(), d) * s;
}

}  // namespace

TEST(Sigma, Examples)
{
    const auto p = build_base("2,1", 40);
    const auto f = geom_f(p);
    const double t = 1.3;
    EXPECT_NEAR(std::abs(sigma(p, f, t, 5, 0) - (1.0 + std::polar(1.0, t * f.weight(1, 5)))), 0, 1e-15);
    EXPECT_EQ(sigma(p, f, 0.0, 5, 0), cplx(2.0));
    EXPECT_EQ(sigma(p, f, t, 5, 1), cplx(1.0));
    EXPECT_THROW(sigma(p, f, t, 5, 2), index_error);
    EXPECT_THROW(sigma(p, f, t, 0, 1), capacity_error);
}

TEST(Theta, PhaseWeightMatchesEvaluation)
{
    for (const char* c : test_bases) {
        const auto b = build_base(c, 60);
        const auto f = F::geom_damped(b.max_digit(), 0.8, b.max_digit() == 2 ? std::vector<double>{1.0, 0.3} : std::vector<double>{1.0});
        const BlockPhases ph(b, f, 1.0);
        for (int q = b.order(); q < 50; ++q)
            for (int ell = 0; ell < b.order(); ++ell)
                EXPECT_NEAR(ph.theta_value(q, ell), eval(f, b, theta(b, q, ell)), 1e-14);
    }
}

TEST(HSequence, MatchesBruteForce)
{
    for (const char* c : test_bases) {
        const auto b = build_base(c, 60);
        const auto g = oracle::G(b.coeffs().a, 30);
        for (const auto& f : {geom_f(b), poly_f(b)}) {
            const oracle::Weight w = [&](int j, int k) { return f.weight(j, k); };
            for (double t : {0.3, 1.0, 2.5}) {
                const auto tr = h_sequence(b, f, t, 13);
                EXPECT_EQ(tr.H[0], cplx(1.0));
                for (int k = 0; k <= 13; ++k) {
                    const cplx ref = oracle::H(g, w, t, k);
                    EXPECT_LT(std::abs(tr.H[k] - ref) / std::abs(ref), 1e-10) << c << " t=" << t << " k=" << k;
                }
            }
        }
    }
}

TEST(HSequence, ZeckendorfExampleAtLevelTen)
{
    const auto z = build_base("1,1", 40);
    const auto f = geom_f(z);
    cplx brute{0};
    for (int m = 0; m < 144; ++m) brute += phase(f, z, m, 1.0);
    EXPECT_LT(std::abs(h_sequence(z, f, 1.0, 10).H[10] - brute) / std::abs(brute), 1e-10);
}

TEST(HSequence, ZeroFrequencyCountsIntegers)
{
    for (const char* c : {"1,1", "1,1,1", "2,1", "1,0,1", "2,2"}) {
        const auto b = build_base(c, 80);
        const auto tr = h_sequence(b, geom_f(b), 0.0, 60);
        for (int k = 0; k <= 60; ++k) {
            EXPECT_LT(std::fabs(tr.H[k].real() / b.G_double(k) - 1), 1e-9);
            EXPECT_EQ(tr.H[k].imag(), 0.0);
        }
        for (int k = 1; k <= 60; ++k) EXPECT_NEAR(tr.r[k]->real(), b.G_double(k) / b.G_double(k - 1), 1e-12);
        for (int k = b.order(); k <= 60; ++k) EXPECT_EQ(*tr.u[k], cplx(0.0));
    }
}

TEST(HSequence, TraceInvariants)
{
    const auto b = build_base("1,1,1", 80);
    const auto f = geom_f(b);
    const auto tr = h_sequence(b, f, 0.9, 40);
    EXPECT_EQ(tr.K, 40);
    EXPECT_FALSE(tr.u[b.order() - 1]);
    EXPECT_NEAR(std::abs(*tr.phi_partial[0] - 1.0 / b.kappa()), 0, 1e-15);
    cplx prod = 1.0 / b.kappa();
    for (int k = 1; k <= 40; ++k) {
        EXPECT_LT(std::abs(*tr.r[k] - tr.H[k] / tr.H[k - 1]), 1e-12);
        EXPECT_LT(std::abs(*tr.eps[k] - (*tr.r[k] - b.alpha())), 1e-12);
        prod *= *tr.r[k] / b.alpha();
        EXPECT_LT(std::abs(*tr.phi_partial[k] - prod), 1e-12);
    }
    EXPECT_THROW(h_sequence(b, f, 1.0, 80), capacity_error);
    EXPECT_THROW(h_sequence(b, f, 1.0, -1), domain_error);
}

TEST(HSequence, HermitianSymmetry)
{
    std::mt19937_64 rng(8);
    for (const char* c : test_bases) {
        const auto b = build_base(c, 80);
        const auto f = poly_f(b);
        for (int i = 0; i < 20; ++i) {
            const double t = std::uniform_real_distribution<double>(0, 5)(rng);
            const int k = static_cast<int>(rng() % 60);
            const auto p = h_sequence(b, f, t, k), m = h_sequence(b, f, -t, k);
            EXPECT_LT(std::abs(p.H[k] - std::conj(m.H[k])) / std::abs(p.H[k]), 1e-12);
        }
    }
}

TEST(HSequence, NormalisedTransformStabilises)
{
    for (const char* c : test_bases) {
        const auto b = build_base(c, 80);
        const auto f = geom_f(b);
        for (double t : {-2.0, -0.5, 0.7, 1.5, 3.0}) {
            const auto tr = h_sequence(b, f, t, 30);
            std::vector<double> diff;
            for (int k = 1; k <= 30; ++k)
                diff.push_back(std::fabs(std::abs(tr.H[k]) / b.G_double(k) - std::abs(tr.H[k - 1]) / b.G_double(k - 1)));
            for (int k = 25; k <= 30; ++k) EXPECT_LT(diff[k - 1], 1e-4) << c << " t=" << t;
        }
    }
}

TEST(Uk, DefinitionMatchesIndependentEvaluation)
{
    for (const char* c : test_bases) {
        const auto b = build_base(c, 60);
        for (const auto& f : {geom_f(b), poly_f(b)})
            for (double t : {0.4, 1.0})
                for (int k = b.order(); k <= 20; ++k)
                    EXPECT_LT(std::abs(u_k(b, f, t, k) - u_reference(b, f, t, k)), 1e-12);
    }
    const auto z = build_base("1,1", 40);
    EXPECT_EQ(u_k(z, F::zero(1), 2.0, 6), cplx(0.0));
    EXPECT_EQ(u_k(z, geom_f(z), 0.0, 6), cplx(0.0));
    EXPECT_THROW(u_k(z, geom_f(z), 1.0, 1), index_error);
}

TEST(Uk, ExactIdentity)
{
    for (const char* c : {"1,1", "1,1,1", "2,1", "1,0,1", "2,1,1"}) {
        const auto b = build_base(c, 60);
        for (const auto& f : {geom_f(b), poly_f(b)})
            for (double t : {0.5, 1.0, 2.0})
                for (int k = 2 * b.order(); k <= 30; ++k) EXPECT_LT(verify_uk_identity(b, f, t, k), 1e-8) << c;
    }
    const auto z = build_base("1,1", 40);
    EXPECT_LT(verify_uk_identity(z, geom_f(z), 1.0, 10), 1e-9);
    EXPECT_EQ(u_k(z, F::zero(1), 1.0, 10), cplx(0.0));
    EXPECT_LT(verify_uk_identity(z, F::zero(1), 1.0, 10), 1e-12);
    const auto tri = build_base("1,1,1", 40);
    EXPECT_LT(verify_uk_identity(tri, poly_f(tri), 0.5, 12), 1e-9);
    EXPECT_THROW(verify_uk_identity(z, geom_f(z), 1.0, 3), index_error);
}

TEST(Uk, UndefinedRatioMakesIdentityUnavailable)
{
    // Digit 1 at level 0 weighs pi, so H_1(1) = 1 + e^{i pi} vanishes up to rounding.
    const auto z = build_base("1,1", 40);
    const auto f = F::table(1, {{{1, 0}, std::numbers::pi}});
    auto tr = h_sequence(z, f, 1.0, 10);
    EXPECT_LT(std::abs(tr.H[1]), 1e-15);
    tr.eps[3].reset();
    try {
        uk_identity(z, f, tr, 4);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.kind(), "identity-unavailable");
    }
}

TEST(Uk, LinearisedByFirstSeriesLayer)
{
    for (const char* c : test_bases) {
        const auto b = build_base(c, 80);
        const int d = b.order();
        for (const auto& f : {geom_f(b), poly_f(b)}) {
            auto ratio = [&](double t, int n) {
                const cplx lin(0, t * std::pow(b.alpha(), d - 1) * s1_layer(b, f, n));
                return std::abs(u_k(b, f, t, n + d + 1) - lin) / (t * t * block_energy(b, f, n + d));
            };
            double C = 0;
            for (int n = 0; n <= 20; ++n) C = std::max(C, ratio(0.1, n));
            // The bound holds up to an implied constant; allow twice the fitted sup.
            for (int n = 0; n <= 20; ++n) {
                EXPECT_LE(ratio(0.1, n), 2 * C);
                EXPECT_LE(ratio(0.01, n), 2 * C) << c << " n=" << n;
            }
        }
    }
}

TEST(Contraction, ReferenceValues)
{
    EXPECT_NEAR(contraction_constant(build_base("1,1")), 0.3819660112501, 1e-12);
    EXPECT_NEAR(contraction_constant(build_base("1,1,1")), 0.1879771824575, 1e-12);
    EXPECT_NEAR(contraction_constant(build_base("2,1")), 0.1715728752538, 1e-12);
    EXPECT_NEAR(contraction_constant(build_base("1,0,1")), 0.079418049043, 1e-11);
    EXPECT_NEAR(contraction_constant(build_base("2,2")), 0.2679491924311, 1e-12);
    EXPECT_NEAR(contraction_constant(build_base("3,1")), 0.09167308680402, 1e-12);
    EXPECT_NEAR(contraction_constant(build_base("2,1,1")), 0.09221948294404, 1e-12);
    for (const char* c : {"1,1", "1,1,1", "2,1", "1,0,1", "2,1,1", "1,1,1,1"}) {
        const auto b = build_base(c);
        const double L = contraction_constant(b);
        EXPECT_GT(L, 0);
        EXPECT_LT(L, 1.0 / (b.order() - 1));
    }
}

TEST(Kernel, PositiveAndSummable)
{
    const auto z = build_base("1,1");
    const auto kz = kernel_coefficients(z, 60);
    EXPECT_EQ(kz.b[0], 1.0);
    EXPECT_NEAR(kz.total, std::numbers::phi, 1e-12);
    EXPECT_NEAR(kz.partial_sum, std::numbers::phi, 1e-10);
    for (const char* c : {"1,1", "1,1,1", "2,1", "1,0,1", "2,1,1"}) {
        const auto kc = kernel_coefficients(build_base(c), 200);
        double s = 0, prev = 0;
        for (double x : kc.b) {
            EXPECT_GE(x, 0);
            s += x;
            EXPECT_GE(s, prev);
            EXPECT_LE(s, kc.total * (1 + 1e-14));
            prev = s;
        }
        EXPECT_NEAR(kc.partial_sum, kc.total, 1e-10) << c;
    }
}

TEST(Companion, UnperturbedAndZeroFunction)
{
    for (const char* c : test_bases) {
        const auto b = build_base(c, 60);
        const auto pc = companion_at(b, geom_f(b), 0.0, 10);
        EXPECT_NEAR(std::abs(pc.lambda - b.alpha()), 0, 1e-12);
        for (int ell = 0; ell < b.order(); ++ell) EXPECT_EQ(pc.first_row()[ell], cplx(b.a(ell)));
        for (int i = 1; i < b.order(); ++i)
            for (int j = 0; j < b.order(); ++j) EXPECT_EQ(pc.entries[i][j], cplx(i - 1 == j ? 1.0 : 0.0));

        const auto z = companion_at(b, F::zero(b.max_digit()), 1.7, 10);
        EXPECT_EQ(z.Q, 0.0);
        EXPECT_NEAR(std::abs(z.lambda - b.alpha()), 0, 1e-12);
    }
}

TEST(Companion, DissipationAndCharacteristicRoot)
{
    for (const char* c : test_bases) {
        const auto b = build_base(c, 60);
        const auto f = geom_f(b);
        for (int n = b.order() - 1; n <= 20; ++n)
            for (int i = 0; i <= 16; ++i) {
                const double t = -2 + 0.25 * i;
                const auto pc = companion_at(b, f, t, n);
                EXPECT_LE(std::abs(pc.lambda), b.alpha() + 1e-12);
                EXPECT_GE(pc.Q, 0);
                for (int ell = 0; ell < b.order(); ++ell) EXPECT_LE(std::abs(pc.first_row()[ell]), b.a(ell) + 1e-12);
                // lambda^d = sum_l c_l lambda^{d-1-l}
                cplx rhs{0};
                for (int ell = 0; ell < b.order(); ++ell)
                    rhs += pc.first_row()[ell] * std::pow(pc.lambda, b.order() - 1 - ell);
                EXPECT_LT(std::abs(std::pow(pc.lambda, b.order()) - rhs), 1e-10);
            }
    }
}

TEST(Companion, BlockEnergy)
{
    const auto z = build_base("1,1", 40);
    const auto f = geom_f(z);
    EXPECT_DOUBLE_EQ(block_energy(z, f, 3), std::pow(0.5, 6) + std::pow(0.5, 4));
    EXPECT_THROW(block_energy(build_base("1,1,1"), f, 1), index_error);
}
