#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "bigint.hpp"
#include "error.hpp"
#include "poly.hpp"

namespace gbase {

/// Coefficients (a_0, ..., a_{d-1}) of G_{n+d} = a_0 G_{n+d-1} + ... + a_{d-1} G_n.
struct RecurrenceCoefficients {
    std::vector<int> a;

    int order() const noexcept { return static_cast<int>(a.size()); }
    int max_coefficient() const { return a.empty() ? 0 : *std::max_element(a.begin(), a.end()); }

    std::string str() const
    {
        std::string s;
        for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
        return s;
    }

    bool operator==(const RecurrenceCoefficients&) const = default;
};

/// Parses "a0,a1,...,a{d-1}".
inline RecurrenceCoefficients parse_coefficients(const std::string& text)
{
    RecurrenceCoefficients c;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos || item.size() > 6)
            throw parse_error("bad coefficient '" + item + "' in '" + text + "'");
        c.a.push_back(std::stoi(item));
    }
    if (c.a.empty()) throw parse_error("empty coefficient list");
    return c;
}

struct RuleResult {
    std::string rule;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<RuleResult> rules;
    bool primitive = false;

    bool ok() const
    {
        return std::all_of(rules.begin(), rules.end(), [](const RuleResult& r) { return r.passed; });
    }

    std::string failures() const
    {
        std::string s;
        for (const auto& r : rules)
            if (!r.passed) s += (s.empty() ? "" : "; ") + r.rule + ": " + r.detail;
        return s;
    }
};

/// gcd{ j+1 : a_j > 0 } == 1 together with a_{d-1} > 0 (irreducibility) is
/// primitivity of the companion matrix.
inline bool companion_is_primitive(const RecurrenceCoefficients& c)
{
    if (c.a.empty() || c.a.back() <= 0) return false;
    int g = 0;
    for (int j = 0; j < c.order(); ++j)
        if (c.a[j] > 0) g = std::gcd(g, j + 1);
    return g == 1;
}

/// Parry coefficient condition, non-strict form:
/// (a_k, ..., a_{d-1}) <= (a_0, ..., a_{d-1-k}) lexicographically for 1 <= k < d.
/// With a_{d-1} >= 1 this is the strict comparison of the zero-padded tails.
inline bool parry_admissible(const RecurrenceCoefficients& c, int* failing_shift = nullptr)
{
    const int d = c.order();
    for (int k = 1; k < d; ++k) {
        const bool le = !std::lexicographical_compare(c.a.begin(), c.a.begin() + (d - k), c.a.begin() + k, c.a.end());
        if (!le) {
            if (failing_shift) *failing_shift = k;
            return false;
        }
    }
    return true;
}

inline ValidationReport validate_coefficients(const RecurrenceCoefficients& c)
{
    ValidationReport rep;
    const int d = c.order();
    rep.rules.push_back({"order>=2", d >= 2, "d=" + std::to_string(d)});
    const bool nonneg = std::all_of(c.a.begin(), c.a.end(), [](int x) { return x >= 0; });
    rep.rules.push_back({"nonnegative", nonneg, nonneg ? "" : "negative coefficient"});
    rep.rules.push_back({"a_0>=1", d >= 1 && c.a[0] >= 1, d >= 1 ? "a_0=" + std::to_string(c.a[0]) : "missing"});
    rep.rules.push_back(
        {"a_{d-1}>=1", d >= 1 && c.a.back() >= 1, d >= 1 ? "a_{d-1}=" + std::to_string(c.a.back()) : "missing"});
    int shift = 0;
    const bool parry = d >= 2 && nonneg && parry_admissible(c, &shift);
    rep.rules.push_back({"parry", parry, parry ? "" : "tail comparison fails at shift k=" + std::to_string(shift)});
    rep.primitive = nonneg && companion_is_primitive(c);
    rep.rules.push_back({"primitive", rep.primitive, rep.primitive ? "" : "gcd{j+1 : a_j>0} != 1"});
    return rep;
}

enum class Pisot { yes, no, indeterminate };

inline const char* to_string(Pisot p)
{
    switch (p) {
    case Pisot::yes: return "yes";
    case Pisot::no: return "no";
    default: return "indeterminate";
    }
}

struct PisotReport {
    Pisot verdict = Pisot::indeterminate;
    double dominant = 0;
    std::vector<std::complex<double>> others;
    double max_other_modulus = 0;
    int sweeps = 0;
    std::string diagnostic;
};

namespace detail {

inline std::vector<double> char_poly(const RecurrenceCoefficients& c)
{
    std::vector<double> p{1.0};
    for (int x : c.a) p.push_back(-static_cast<double>(x));
    return p;
}

// Newton polish in long double, used for kappa.
inline long double refine_root(const RecurrenceCoefficients& c, long double x)
{
    for (int it = 0; it < 8; ++it) {
        long double p = 1, dp = 0;
        for (int x_ : c.a) {
            dp = dp * x + p;
            p = p * x - x_;
        }
        if (dp == 0) break;
        x -= p / dp;
    }
    return x;
}

}  // namespace detail

/// Perron root by bisection of x^d - a_0 x^{d-1} - ... - a_{d-1} on (a_0, max a + 1).
inline double perron_root(const RecurrenceCoefficients& c)
{
    const auto p = detail::char_poly(c);
    return poly::bisect(p, c.a[0], c.max_coefficient() + 1.0, 1e-14);
}

inline double perron_residual(const RecurrenceCoefficients& c, double alpha)
{
    long double s = 0, inv = 1.0L / alpha, pw = inv;
    for (int x : c.a) {
        s += x * pw;
        pw *= inv;
    }
    return static_cast<double>(std::fabs(s - 1));
}

inline constexpr double pisot_band = 1e-9;

/// Classifies the Perron root. Order 2 uses the exact criterion b <= a;
/// higher orders deflate the dominant root and locate the rest numerically.
/// Moduli inside 1 +- 1e-9 are reported as indeterminate.
inline PisotReport pisot_check(const RecurrenceCoefficients& c)
{
    if (c.order() < 2 || c.a[0] < 1 || c.a.back() < 1)
        throw invalid_coefficients("pisot_check needs d>=2, a_0>=1, a_{d-1}>=1");
    PisotReport rep;
    rep.dominant = perron_root(c);
    const int d = c.order();
    if (d == 2) {
        const double conj = -static_cast<double>(c.a[1]) / rep.dominant;
        rep.others = {conj};
        rep.max_other_modulus = std::fabs(conj);
        rep.verdict = c.a[1] <= c.a[0] ? Pisot::yes : Pisot::no;
        rep.diagnostic = "order 2: exact criterion b <= a";
        return rep;
    }
    const auto p = detail::char_poly(c);
    const auto q = poly::deflate(p, rep.dominant);
    const auto roots = poly::durand_kerner<double>(q, 500, 1e-14);
    rep.others = roots.roots;
    rep.sweeps = roots.sweeps;
    for (const auto& z : rep.others) rep.max_other_modulus = std::max(rep.max_other_modulus, std::abs(z));
    if (!roots.converged) {
        rep.verdict = Pisot::indeterminate;
        rep.diagnostic = "root iteration did not converge after 500 sweeps";
        return rep;
    }
    if (rep.max_other_modulus < 1 - pisot_band) {
        rep.verdict = Pisot::yes;
    } else if (rep.max_other_modulus > 1 + pisot_band) {
        rep.verdict = Pisot::no;
    } else {
        rep.verdict = Pisot::indeterminate;
        rep.diagnostic = "a conjugate lies within 1e-9 of the unit circle";
    }
    return rep;
}

/// Linear recurrence base: exact G_0..G_M plus spectral data. Immutable once
/// built; share freely between threads.
class LinearRecurrenceBase {
public:
    const RecurrenceCoefficients& coeffs() const noexcept { return coeffs_; }
    int order() const noexcept { return coeffs_.order(); }
    int a(int j) const { return coeffs_.a.at(j); }
    /// max_j a_j, the largest digit.
    int max_digit() const noexcept { return frak_a_; }
    int max_level() const noexcept { return static_cast<int>(G_.size()) - 1; }

    const bigint& G(int k) const
    {
        if (k < 0 || k > max_level())
            throw capacity_error("level " + std::to_string(k) + " is not stored", k);
        return G_[k];
    }
    const std::vector<bigint>& G_sequence() const noexcept { return G_; }

    /// Levels whose G_k fits in 63 bits, as machine integers; used by the
    /// brute-force enumerators.
    const std::vector<std::uint64_t>& G_small() const noexcept { return G_small_; }
    double G_double(int k) const { return G(k).convert_to<double>(); }

    double alpha() const noexcept { return alpha_; }
    double kappa() const noexcept { return kappa_; }
    double kappa_error() const noexcept { return kappa_err_; }
    const PisotReport& pisot() const noexcept { return pisot_; }
    bool primitive() const noexcept { return primitive_; }
    double perron_residual() const { return gbase::perron_residual(coeffs_, alpha_); }

    std::string id() const { return coeffs_.str(); }

    friend LinearRecurrenceBase build_base(const RecurrenceCoefficients& c, int max_level);

private:
    LinearRecurrenceBase() = default;

    RecurrenceCoefficients coeffs_;
    std::vector<bigint> G_;
    std::vector<std::uint64_t> G_small_;
    double alpha_ = 0;
    double kappa_ = 0;
    double kappa_err_ = 0;
    int frak_a_ = 0;
    PisotReport pisot_;
    bool primitive_ = false;
};

/// G_0 = 1, G_k = a_0 G_{k-1} + ... + a_{k-1} G_0 + 1 (0 < k < d), then the recurrence.
inline std::vector<bigint> g_sequence(const RecurrenceCoefficients& c, int max_level)
{
    const int d = c.order();
    std::vector<bigint> G;
    G.reserve(max_level + 1);
    G.emplace_back(1);
    for (int k = 1; k <= max_level; ++k) {
        bigint v = (k < d) ? bigint(1) : bigint(0);
        for (int j = 0; j < std::min(k, d); ++j)
            if (c.a[j]) v += c.a[j] * G[k - 1 - j];
        G.push_back(std::move(v));
    }
    return G;
}

inline LinearRecurrenceBase build_base(const RecurrenceCoefficients& c, int max_level = 120)
{
    const auto rep = validate_coefficients(c);
    if (!rep.ok()) throw invalid_coefficients("coefficients (" + c.str() + ") rejected: " + rep.failures());
    const int d = c.order();
    if (max_level < d) throw domain_error("max_level must be >= d");

    LinearRecurrenceBase b;
    b.coeffs_ = c;
    b.frak_a_ = c.max_coefficient();
    b.primitive_ = rep.primitive;
    b.G_ = g_sequence(c, max_level);
    for (const auto& g : b.G_) {
        if (boost::multiprecision::msb(g) >= 62) break;
        b.G_small_.push_back(g.convert_to<std::uint64_t>());
    }
    b.alpha_ = perron_root(c);
    if (gbase::perron_residual(c, b.alpha_) >= 1e-12) throw numeric_error("Perron identity residual too large");
    b.pisot_ = pisot_check(c);

    if (d == 2) {
        const double a = c.a[0], bb = c.a[1];
        const double s = std::sqrt(a * a + 4 * bb);
        b.kappa_ = (a + 2 + s) / (2 * s);
        b.kappa_err_ = 8 * std::numeric_limits<double>::epsilon() * b.kappa_;
        return b;
    }

    // kappa ~ G_M / alpha^M; remainder decays like (rho/alpha)^M. The
    // estimate uses its own extension so it does not depend on max_level.
    const long double al = detail::refine_root(c, b.alpha_);
    const auto ext = max_level >= 400 ? b.G_ : g_sequence(c, 400);
    int M = static_cast<int>(ext.size()) - 1;
    while (M > d && boost::multiprecision::msb(ext[M]) > 16000) --M;
    auto ratio = [&](int n) {
        return ext[n].convert_to<long double>() / std::pow(al, static_cast<long double>(n));
    };
    b.kappa_ = static_cast<double>(ratio(M));
    const double rho = b.pisot_.max_other_modulus;
    const bool have_rho = b.pisot_.verdict != Pisot::indeterminate || !b.pisot_.others.empty();
    long double err = 0;
    for (int n = std::max(0, M - 10); n < M; ++n) {
        const long double diff = std::fabs(ratio(n) - ratio(n + 1));
        const long double scale =
            have_rho && rho > 0 ? std::pow(static_cast<long double>(rho) / al, static_cast<long double>(M - n)) : 1.0L;
        err = std::max(err, diff * scale);
    }
    b.kappa_err_ = static_cast<double>(err) + 8 * std::numeric_limits<double>::epsilon() * b.kappa_;
    return b;
}

inline LinearRecurrenceBase build_base(const std::string& coeffs, int max_level = 120)
{
    return build_base(parse_coefficients(coeffs), max_level);
}

}  // namespace gbase
