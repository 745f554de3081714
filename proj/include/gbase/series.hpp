#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "base.hpp"
#include "error.hpp"
#include "gfun.hpp"

namespace gbase {

enum class Verdict { converged_numerically, diverging, inconclusive };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::converged_numerically: return "converged-numerically";
    case Verdict::diverging: return "diverging";
    default: return "inconclusive";
    }
}

/// Layer values of a canonical series with running sums and a three-state
/// numerical verdict.
struct SeriesReport {
    std::vector<double> terms;
    std::vector<double> partial_sums;
    std::optional<double> tail_estimate;
    Verdict verdict = Verdict::inconclusive;
    double tolerance = 1e-10;

    double total() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

/// Fills partial sums, the tail estimate and the verdict.
///
/// converged-numerically: the last 10 terms are below `tol` and the
/// halving check |S_N - S_{N/2}| < tol passes. diverging: the halving
/// differences do not shrink, |S_N - S_{N/2}| >= max(tol, |S_{N/2} - S_{N/4}|).
/// Otherwise inconclusive. The tail estimate assumes a geometric tail and is
/// only given when the last term ratio is below 1.
inline SeriesReport make_report(std::vector<double> terms, double tol = 1e-10)
{
    if (!(tol > 0)) throw domain_error("tolerance must be > 0");
    SeriesReport rep;
    rep.tolerance = tol;
    rep.terms = std::move(terms);
    rep.partial_sums.reserve(rep.terms.size());
    double s = 0;
    for (double x : rep.terms) {
        s += x;
        rep.partial_sums.push_back(s);
    }
    const std::size_t N = rep.terms.size();
    if (N >= 2 && rep.terms[N - 2] != 0) {
        const double q = std::fabs(rep.terms[N - 1] / rep.terms[N - 2]);
        if (q < 1) rep.tail_estimate = rep.terms[N - 1] * q / (1 - q);
    } else if (N >= 2 && rep.terms[N - 1] == 0) {
        rep.tail_estimate = 0.0;
    }
    if (N < 10) return rep;

    auto S = [&](std::size_t n) { return n == 0 ? 0.0 : rep.partial_sums[n - 1]; };
    bool small_tail = true;
    for (std::size_t i = N - 10; i < N; ++i)
        if (!(std::fabs(rep.terms[i]) < tol)) small_tail = false;
    const double half = std::fabs(S(N) - S(N / 2));
    const double quarter = std::fabs(S(N / 2) - S(N / 4));
    if (small_tail && half < tol)
        rep.verdict = Verdict::converged_numerically;
    else if (half >= tol && half >= quarter)
        rep.verdict = Verdict::diverging;
    return rep;
}

namespace detail {

inline void check_layers(const LinearRecurrenceBase& base, int top_level)
{
    if (top_level > base.max_level())
        throw capacity_error("series layer needs level " + std::to_string(top_level), top_level);
}

}  // namespace detail

/// M_n = sum_{j<d} alpha^{-j} sum_{k<a_j} ( f(k G_{n+d-j}) + sum_{l<j} f(a_l G_{n+d-l}) ).
inline double s1_layer(const LinearRecurrenceBase& base, const GAdditiveFunction& f, int n)
{
    const int d = base.order();
    const double alpha = base.alpha();
    double m = 0;
    for (int j = 0; j < d; ++j) {
        double carried = 0;
        for (int ell = 0; ell < j; ++ell) carried += f.weight(base.a(ell), n + d - ell);
        double inner = 0;
        for (int k = 0; k < base.a(j); ++k) inner += f.weight(k, n + d - j) + carried;
        m += inner / std::pow(alpha, j);
    }
    return m;
}

inline SeriesReport s1_terms(const LinearRecurrenceBase& base, const GAdditiveFunction& f, int N, double tol = 1e-10)
{
    check_digits_fit(base, f);
    detail::check_layers(base, N - 1 + base.order());
    std::vector<double> terms;
    terms.reserve(N);
    for (int n = 0; n < N; ++n) terms.push_back(s1_layer(base, f, n));
    return make_report(std::move(terms), tol);
}

/// sum_{1<=k<=a} f(k G_n)^2.
inline double s2_layer(const GAdditiveFunction& f, int n)
{
    double s = 0;
    for (int k = 1; k <= f.max_digit(); ++k) {
        const double w = f.weight(k, n);
        s += w * w;
    }
    return s;
}

inline SeriesReport s2_terms(const LinearRecurrenceBase& base, const GAdditiveFunction& f, int N, double tol = 1e-10)
{
    check_digits_fit(base, f);
    detail::check_layers(base, N - 1);
    std::vector<double> terms;
    terms.reserve(N);
    for (int n = 0; n < N; ++n) terms.push_back(s2_layer(f, n));
    return make_report(std::move(terms), tol);
}

struct Order2Series {
    SeriesReport first;
    SeriesReport second;
    /// max_n |first.terms[n+1] - s1.terms[n]|.
    double shift_residual = 0;
};

/// Order-2 criterion with a = a_0, b = a_1:
///   sum_{k<a} f(k G_{n+1}) + (1/alpha) sum_{k<b} ( f(k G_n) + f(a G_{n+1}) ),
/// which is the M_n layer shifted by one index.
inline Order2Series order2_series(const LinearRecurrenceBase& base, const GAdditiveFunction& f, int N,
                                  double tol = 1e-10)
{
    if (base.order() != 2) throw domain_error("order2_series needs a base of order 2");
    check_digits_fit(base, f);
    detail::check_layers(base, N);
    const int a = base.a(0), b = base.a(1);
    const double alpha = base.alpha();
    std::vector<double> terms;
    terms.reserve(N);
    for (int n = 0; n < N; ++n) {
        double x = 0, y = 0;
        for (int k = 0; k < a; ++k) x += f.weight(k, n + 1);
        for (int k = 0; k < b; ++k) y += f.weight(k, n) + f.weight(a, n + 1);
        terms.push_back(x + y / alpha);
    }
    Order2Series out{make_report(std::move(terms), tol), s2_terms(base, f, N, tol), 0.0};
    if (N >= 2) {
        const auto s1 = s1_terms(base, f, N - 1, tol);
        for (int n = 0; n + 1 < N; ++n)
            out.shift_residual = std::max(out.shift_residual, std::fabs(out.first.terms[n + 1] - s1.terms[n]));
    }
    return out;
}

/// Convergence-equivalent first series for the special order-2 cases:
/// a == b gives (alpha+1) sum_{k<a} f(k G_n) + a f(a G_n); b == 1 gives
/// alpha sum_{k<a} f(k G_n) + f(a G_n). Each is alpha times the order-2
/// layer with its level-(n+1) parts moved to level n.
inline std::vector<double> order2_special_terms(const LinearRecurrenceBase& base, const GAdditiveFunction& f, int N)
{
    if (base.order() != 2) throw domain_error("order2_special_terms needs a base of order 2");
    const int a = base.a(0), b = base.a(1);
    if (a != b && b != 1) throw domain_error("special forms exist only for a == b or b == 1");
    detail::check_layers(base, N - 1);
    const double alpha = base.alpha();
    std::vector<double> out;
    for (int n = 0; n < N; ++n) {
        double low = 0;
        for (int k = 0; k < a; ++k) low += f.weight(k, n);
        out.push_back(a == b ? (alpha + 1) * low + a * f.weight(a, n) : alpha * low + f.weight(a, n));
    }
    return out;
}

struct StabilityReport {
    /// max_n |S1[f+g]_n - S1[f]_n - S1[g]_n|.
    double s1_residual = 0;
    /// max_n |S2[f+g]_n - S2[f]_n - S2[g]_n - 2 sum_c f(cG_n) g(cG_n)|.
    double s2_residual = 0;
    /// sum_n sum_c f(c G_n) g(c G_n).
    double cross_term = 0;
    /// sqrt(S2[f]) sqrt(S2[g]).
    double cauchy_schwarz_bound = 0;
    bool cauchy_schwarz_holds = false;
};

inline StabilityReport stability_report(const LinearRecurrenceBase& base, const GAdditiveFunction& f,
                                        const GAdditiveFunction& g, int N)
{
    const auto fg = GAdditiveFunction::sum(f, g);
    const auto s1f = s1_terms(base, f, N), s1g = s1_terms(base, g, N), s1fg = s1_terms(base, fg, N);
    const auto s2f = s2_terms(base, f, N), s2g = s2_terms(base, g, N), s2fg = s2_terms(base, fg, N);
    StabilityReport rep;
    double abs_cross = 0;
    for (int n = 0; n < N; ++n) {
        rep.s1_residual = std::max(rep.s1_residual, std::fabs(s1fg.terms[n] - s1f.terms[n] - s1g.terms[n]));
        double cross = 0;
        for (int c = 1; c <= base.max_digit(); ++c) {
            cross += f.weight(c, n) * g.weight(c, n);
            abs_cross += std::fabs(f.weight(c, n) * g.weight(c, n));
        }
        rep.cross_term += cross;
        rep.s2_residual =
            std::max(rep.s2_residual, std::fabs(s2fg.terms[n] - s2f.terms[n] - s2g.terms[n] - 2 * cross));
    }
    rep.cauchy_schwarz_bound = std::sqrt(s2f.total()) * std::sqrt(s2g.total());
    // Rounding slack relative to the bound; equality is attained for f = g.
    rep.cauchy_schwarz_holds = abs_cross <= rep.cauchy_schwarz_bound * (1 + 1e-12) + 1e-300;
    return rep;
}

struct AtomicityResult {
    bool atomic = false;
    /// Smallest J with f(c G_j) = 0 for all c and j >= J (when atomic).
    int level = 0;
    int j_max = 0;

    std::string str() const
    {
        return atomic ? "atomic-by-level-" + std::to_string(level)
                      : "not-eventually-zero-up-to-" + std::to_string(j_max);
    }
};

/// The limit law is purely atomic iff the digit weights vanish from some level on.
inline AtomicityResult atomicity_check(const GAdditiveFunction& f, int j_max)
{
    AtomicityResult r;
    r.j_max = j_max;
    if (const auto J = f.eventually_zero_from(); J && *J <= j_max) {
        r.atomic = true;
        r.level = *J;
    }
    return r;
}

}  // namespace gbase
