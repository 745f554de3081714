#pragma once

// Invariant suites behind `gbase verify`. Each check compares a library
// route against a brute-force or closed-form route at desk scale.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gbase.hpp"

namespace gbase::verify {

struct Check {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

using Suite = std::vector<Check>;

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"base", "digits", "gfun", "transform", "series", "empirical"};
    return names;
}

inline const std::vector<std::string>& test_bases()
{
    static const std::vector<std::string> bases{"1,1", "1,1,1", "2,1"};
    return bases;
}

namespace detail {

inline std::string num(double x)
{
    std::ostringstream s;
    s.precision(3);
    s << x;
    return s.str();
}

class Recorder {
public:
    explicit Recorder(std::string suite) : suite_(std::move(suite)) {}

    void expect(const std::string& name, bool ok, const std::string& detail = "")
    {
        out_.push_back({suite_, name, ok, detail});
    }

    /// Runs `body`, turning an exception into a failed check.
    void guarded(const std::string& name, const std::function<void()>& body)
    {
        try {
            body();
        } catch (const std::exception& e) {
            expect(name, false, std::string("exception: ") + e.what());
        }
    }

    Suite take() { return std::move(out_); }

private:
    std::string suite_;
    Suite out_;
};

// sum_{m<G_k} exp(i t f(m)) by expanding every m.
inline cplx brute_H(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t, int k)
{
    std::vector<int> e;
    cplx s{0};
    for (std::uint64_t m = 0; m < base.G_small()[k]; ++m) {
        greedy_expand_small(base, m, e);
        double v = 0;
        for (std::size_t j = 0; j < e.size(); ++j)
            if (e[j]) v += f.weight(e[j], static_cast<int>(j));
        s += std::polar(1.0, t * v);
    }
    return s;
}

inline bool brute_primitive(const std::vector<int>& a)
{
    const int d = static_cast<int>(a.size());
    std::vector<std::vector<long double>> A(d, std::vector<long double>(d, 0)), P;
    for (int j = 0; j < d; ++j) A[0][j] = a[j];
    for (int i = 1; i < d; ++i) A[i][i - 1] = 1;
    P = A;
    for (int p = 1; p <= d * d; ++p) {
        bool pos = true;
        for (auto& row : P)
            for (auto x : row) pos = pos && x > 0;
        if (pos) return true;
        std::vector<std::vector<long double>> Q(d, std::vector<long double>(d, 0));
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                for (int j = 0; j < d; ++j) Q[i][j] += P[i][k] * A[k][j];
        P = Q;
    }
    return false;
}

}  // namespace detail

inline Suite base_suite()
{
    detail::Recorder rec("base");
    for (const auto& c : test_bases()) {
        rec.guarded("build " + c, [&] {
            const auto b = build_base(c, 80);
            const int d = b.order();
            bool recur = true, increasing = true;
            for (int n = 0; n + d <= b.max_level(); ++n) {
                bigint s = 0;
                for (int j = 0; j < d; ++j) s += b.a(j) * b.G(n + d - 1 - j);
                recur = recur && s == b.G(n + d);
            }
            for (int n = 1; n <= b.max_level(); ++n) increasing = increasing && b.G(n) > b.G(n - 1);
            rec.expect("recurrence exact " + c, recur);
            rec.expect("G increasing " + c, increasing);
            rec.expect("alpha bracket " + c, b.a(0) < b.alpha() && b.alpha() < b.max_digit() + 1);
            rec.expect("Perron identity " + c, b.perron_residual() < 1e-12, detail::num(b.perron_residual()));
            if (d == 2) {
                const double ratio = b.G_double(60) / std::pow(b.alpha(), 60);
                rec.expect("kappa closed form vs G_60/alpha^60 " + c, std::fabs(ratio - b.kappa()) < 1e-8);
            }
        });
    }
    bool agree = true;
    for (int d = 2; d <= 4; ++d) {
        std::vector<int> a(d, 0);
        std::function<void(int)> rec_fill = [&](int i) {
            if (i == d) {
                if (a[0] >= 1 && a[d - 1] >= 1)
                    agree = agree && companion_is_primitive({a}) == detail::brute_primitive(a);
                return;
            }
            for (int v = 0; v <= 2; ++v) {
                a[i] = v;
                rec_fill(i + 1);
            }
        };
        rec_fill(0);
    }
    rec.expect("primitivity gcd rule vs matrix powers (d<=4, entries<=2)", agree);
    rec.guarded("pisot verdicts", [&] {
        const bool ok = pisot_check({{1, 1}}).verdict == Pisot::yes && pisot_check({{2, 1}}).verdict == Pisot::yes &&
                        pisot_check({{1, 2}}).verdict == Pisot::no && pisot_check({{1, 1, 1}}).verdict == Pisot::yes;
        rec.expect("pisot verdicts", ok);
    });
    return rec.take();
}

inline Suite digits_suite()
{
    detail::Recorder rec("digits");
    for (const auto& c : test_bases()) {
        rec.guarded("digits " + c, [&] {
            const auto b = build_base(c, 40);
            bool round = true;
            const std::uint64_t top = b.G_small()[12];
            for (std::uint64_t n = 0; n < top; ++n) {
                const auto e = greedy_expand(b, n);
                round = round && decode(b, e) == n && prefix_condition(b, e.digits);
            }
            rec.expect("round trip on [0, G_12) " + c, round);

            bool bij = true;
            for (int n = 0; n <= 6; ++n) {
                const int d = b.order();
                std::set<std::tuple<int, int, std::uint64_t>> seen;
                for (std::uint64_t u = 0; u < b.G_small()[n + d]; ++u) {
                    const auto bd = block_decompose(b, n, u);
                    const bigint back = theta(b, n + d - 1, bd.ell) + bd.k * b.G(n + d - 1 - bd.ell) + bd.v;
                    bij = bij && back == u && bd.k < b.a(bd.ell) && bd.v < b.G(n + d - 1 - bd.ell);
                    seen.insert({bd.ell, bd.k, bd.v.convert_to<std::uint64_t>()});
                }
                bij = bij && seen.size() == b.G_small()[n + d];
            }
            rec.expect("block_decompose bijection n<=6 " + c, bij);

            DigitOdometer odo(b);
            std::mt19937_64 rng(7);
            std::vector<int> e;
            bool odo_ok = true;
            for (std::uint64_t n = 1; n < 20000; ++n) {
                odo.increment();
                if (rng() % 2 == 0) continue;
                greedy_expand_small(b, n, e);
                std::vector<int> got(odo.digits());
                while (!got.empty() && got.back() == 0) got.pop_back();
                odo_ok = odo_ok && got == e;
            }
            rec.expect("odometer agrees with greedy_expand " + c, odo_ok);
        });
    }
    rec.guarded("admissible words", [&] {
        const auto z = build_base("1,1", 20);
        int count = 0;
        bool equiv = true;
        for (int len = 1; len <= 10; ++len)
            for (int mask = 0; mask < (1 << len); ++mask) {
                std::vector<int> w(len);
                for (int i = 0; i < len; ++i) w[i] = (mask >> i) & 1;
                const bool adm = is_admissible(z, w);
                equiv = equiv && adm == prefix_condition(z, w);
                if (len == 10 && adm) ++count;
            }
        rec.expect("admissible words of length 10 == G_10", count == 144, std::to_string(count));
        rec.expect("greedy recode <=> prefix condition", equiv);
    });
    return rec.take();
}

inline Suite gfun_suite()
{
    detail::Recorder rec("gfun");
    rec.guarded("gfun", [&] {
        const auto b = build_base("1,1", 40);
        const auto f = GAdditiveFunction::geom_damped(1, 0.5, {1.0});
        const auto g = GAdditiveFunction::poly_damped(1, 2.0, {1.0});
        const auto fg = GAdditiveFunction::sum(f, g);
        bool additive = true;
        std::vector<int> e;
        for (std::uint64_t n = 1; n < b.G_small()[10]; ++n) {
            greedy_expand_small(b, n, e);
            const int k = static_cast<int>(e.size()) - 1;
            const std::uint64_t m = n - e[k] * b.G_small()[k];
            additive = additive && std::fabs(eval(f, b, n) - eval(f, b, m) - f.weight(e[k], k)) < 1e-14;
        }
        rec.expect("additivity over the top digit below G_10", additive);
        std::mt19937_64 rng(11);
        bool unit = true, sum_ok = true;
        for (int i = 0; i < 1000; ++i) {
            const std::uint64_t n = rng() % b.G_small()[30];
            const double t = std::uniform_real_distribution<double>(-10, 10)(rng);
            unit = unit && std::fabs(std::abs(phase(f, b, n, t)) - 1) < 1e-15;
            sum_ok = sum_ok && std::fabs(eval(fg, b, n) - eval(f, b, n) - eval(g, b, n)) < 1e-13;
        }
        rec.expect("|phase| == 1", unit);
        rec.expect("sum kind evaluates to the sum", sum_ok);
    });
    return rec.take();
}

inline Suite transform_suite()
{
    detail::Recorder rec("transform");
    for (const auto& c : test_bases()) {
        rec.guarded("transform " + c, [&] {
            const auto b = build_base(c, 80);
            const auto f = GAdditiveFunction::geom_damped(b.max_digit(), 0.5, {1.0});
            int kmax = 0;
            while (b.G_small()[kmax + 1] <= 200000) ++kmax;
            double worst = 0;
            for (double t : {0.3, 1.0, 2.5}) {
                const auto tr = h_sequence(b, f, t, kmax);
                for (int k = 0; k <= kmax; ++k) {
                    const cplx brute = detail::brute_H(b, f, t, k);
                    worst = std::max(worst, std::abs(tr.H[k] - brute) / std::abs(brute));
                }
            }
            rec.expect("H recurrence vs brute force " + c, worst < 1e-10, detail::num(worst));

            const auto tr0 = h_sequence(b, f, 0.0, 60);
            double rel0 = 0;
            for (int k = 0; k <= 60; ++k) rel0 = std::max(rel0, std::fabs(tr0.H[k].real() / b.G_double(k) - 1));
            rec.expect("H_k(0) == G_k " + c, rel0 < 1e-9, detail::num(rel0));

            const auto tp = h_sequence(b, f, 1.7, 40), tm = h_sequence(b, f, -1.7, 40);
            double herm = 0;
            for (int k = 0; k <= 40; ++k) herm = std::max(herm, std::abs(tp.H[k] - std::conj(tm.H[k])) / std::abs(tp.H[k]));
            rec.expect("Hermitian symmetry " + c, herm < 1e-12, detail::num(herm));

            double uk = 0;
            const auto g = GAdditiveFunction::poly_damped(b.max_digit(), 2.0, {1.0});
            for (const auto* fn : {&f, &g})
                for (double t : {0.5, 1.0}) {
                    const auto trk = h_sequence(b, *fn, t, 30);
                    for (int k = 2 * b.order(); k <= 30; ++k) uk = std::max(uk, uk_identity(b, *fn, trk, k).residual);
                }
            rec.expect("u_k identity " + c, uk < 1e-8, detail::num(uk));

            const double L = contraction_constant(b);
            rec.expect("L in (0, 1/(d-1)) " + c, L > 0 && L < 1.0 / (b.order() - 1));

            bool bounded = true;
            for (int n = b.order() - 1; n <= 20; ++n)
                for (double t = -2; t <= 2.0001; t += 0.25) {
                    const auto pc = companion_at(b, f, t, n);
                    bounded = bounded && std::abs(pc.lambda) <= b.alpha() + 1e-12 && pc.Q >= 0;
                }
            rec.expect("|lambda_n(t)| <= alpha " + c, bounded);
        });
    }
    rec.guarded("kernel", [&] {
        const auto z = build_base("1,1", 20);
        const auto kc = kernel_coefficients(z, 60);
        rec.expect("Zeckendorf kernel total == golden ratio", std::fabs(kc.partial_sum - std::numbers::phi) < 1e-10);
    });
    return rec.take();
}

inline Suite series_suite()
{
    detail::Recorder rec("series");
    rec.guarded("series", [&] {
        const auto z = build_base("1,1", 260);
        const auto f = GAdditiveFunction::geom_damped(1, 0.5, {1.0});
        const auto g = GAdditiveFunction::poly_damped(1, 2.0, {1.0});
        const double s2g = s2_terms(z, f, 60).total();
        rec.expect("S2 geom total == 4/3", std::fabs(s2g - 4.0 / 3.0) < 1e-12, detail::num(s2g - 4.0 / 3.0));
        const double s2p = s2_terms(z, g, 200).total();
        rec.expect("S2 poly total == pi^4/90", std::fabs(s2p - std::pow(std::numbers::pi, 4) / 90) < 1e-6);
        const auto st = stability_report(z, f, g, 100);
        rec.expect("S1 linear, S2 quadratic", st.s1_residual < 1e-12 && st.s2_residual < 1e-12);
        rec.expect("Cauchy-Schwarz", st.cauchy_schwarz_holds);
        for (const char* c : {"1,1", "2,1", "2,2", "3,1"}) {
            const auto b = build_base(c, 80);
            const auto fb = GAdditiveFunction::geom_damped(b.max_digit(), 0.5, {1.0});
            rec.expect(std::string("order-2 index shift ") + c, order2_series(b, fb, 60).shift_residual < 1e-12);
        }
    });
    return rec.take();
}

inline Suite empirical_suite()
{
    detail::Recorder rec("empirical");
    for (const auto& c : test_bases()) {
        rec.guarded("empirical " + c, [&] {
            const auto b = build_base(c, 60);
            const auto f = GAdditiveFunction::geom_damped(b.max_digit(), 0.5, {1.0});
            const auto g = GAdditiveFunction::poly_damped(b.max_digit(), 2.0, {1.0});
            int kmax = 0;
            while (b.G_small()[kmax + 1] <= 200000) ++kmax;
            const auto values = enumerate_values(b, f, b.G_small()[kmax]);
            const auto tr = h_sequence(b, f, 0.7, kmax);
            double worst = 0;
            for (int k = 0; k <= kmax; ++k) {
                const auto n = b.G_small()[k];
                const cplx emp = empirical_charfn(std::span<const double>(values.data(), n), 0.7);
                worst = std::max(worst, std::abs(emp - tr.H[k] / double(n)));
            }
            rec.expect("charfn at N=G_k matches H_k/G_k " + c, worst < 1e-10, detail::num(worst));

            std::mt19937_64 rng(2024);
            double chang = 0;
            for (const auto* fn : {&f, &g}) {
                const auto vals = enumerate_values(b, *fn, 1000000);
                for (int i = 0; i < 20; ++i) {
                    const std::uint64_t N = 1 + rng() % 999999;
                    chang = std::max(chang, chang_decomposition(b, *fn, 0.5, N, vals).residual);
                }
            }
            rec.expect("chang decomposition residual " + c, chang < 1e-9, detail::num(chang));
        });
    }
    rec.guarded("ks", [&] {
        const auto z = build_base("1,1", 40);
        const auto f = GAdditiveFunction::geom_damped(1, 0.5, {1.0});
        std::vector<double> ks;
        for (int k = 10; k <= 18; k += 2)
            ks.push_back(ks_distance(empirical_distribution(z, f, z.G_small()[k]),
                                     empirical_distribution(z, f, z.G_small()[k + 2])));
        bool decreasing = true;
        for (std::size_t i = 1; i < ks.size(); ++i) decreasing = decreasing && ks[i] < ks[i - 1];
        rec.expect("KS distances decrease, last < 0.02", decreasing && ks.back() < 0.02, detail::num(ks.back()));
    });
    return rec.take();
}

inline Suite run_suite(const std::string& name)
{
    if (name == "base") return base_suite();
    if (name == "digits") return digits_suite();
    if (name == "gfun") return gfun_suite();
    if (name == "transform") return transform_suite();
    if (name == "series") return series_suite();
    if (name == "empirical") return empirical_suite();
    if (name == "all") {
        Suite all;
        for (const auto& s : suite_names()) {
            auto part = run_suite(s);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw parse_error("unknown suite '" + name + "'");
}

}  // namespace gbase::verify
