#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "base.hpp"
#include "digits.hpp"
#include "error.hpp"
#include "gfun.hpp"
#include "poly.hpp"

namespace gbase {

using cplx = std::complex<double>;

/// Ratios whose denominator |H_{k-1}| falls below this are left undefined.
inline constexpr double ratio_floor = 1e-300;

/// Phases of the first companion row at one frequency. Caches f(j G_k) so
/// that sigma, theta phases and c_{q,l} cost O(a) each.
class BlockPhases {
public:
    BlockPhases(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t)
        : base_(base), weights_((check_digits_fit(base, f), f), base.max_level() + 1), t_(t)
    {
    }

    double t() const noexcept { return t_; }
    const WeightTable& weights() const noexcept { return weights_; }

    /// sigma_{q,l}(t) = sum_{h<a_l} g_t(h G_{q-l}).
    cplx sigma(int q, int ell) const
    {
        check(q, ell);
        cplx s{0};
        for (int h = 0; h < base_.a(ell); ++h) s += std::polar(1.0, t_ * weights_(h, q - ell));
        return s;
    }

    /// f(theta_{q,l}) = sum_{j<l} f(a_j G_{q-j}).
    double theta_value(int q, int ell) const
    {
        check(q, ell);
        double s = 0;
        for (int j = 0; j < ell; ++j) s += weights_(base_.a(j), q - j);
        return s;
    }

    /// c_{q,l}(t) = g_t(theta_{q,l}) sigma_{q,l}(t).
    cplx coefficient(int q, int ell) const { return std::polar(1.0, t_ * theta_value(q, ell)) * sigma(q, ell); }

private:
    void check(int q, int ell) const
    {
        if (ell < 0 || ell >= base_.order()) throw index_error("block index l must lie in [0, d)");
        if (q < ell || q > base_.max_level())
            throw capacity_error("level q=" + std::to_string(q) + " out of range", q);
    }

    const LinearRecurrenceBase& base_;
    WeightTable weights_;
    double t_;
};

inline cplx sigma(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t, int q, int ell)
{
    return BlockPhases(base, f, t).sigma(q, ell);
}

/// Per-frequency record of H_k, r_k, eps_k, u_k and the truncated product.
/// Index k addresses level k in every sequence; entries that are undefined
/// (k < d for u, or a vanishing denominator) are empty.
struct TransformTrace {
    double t = 0;
    int K = 0;
    std::vector<cplx> H;
    std::vector<std::optional<cplx>> r;
    std::vector<std::optional<cplx>> eps;
    std::vector<std::optional<cplx>> u;
    /// (1/kappa) prod_{j<=k} r_j/alpha; entry 0 is 1/kappa.
    std::vector<std::optional<cplx>> phi_partial;

    /// |Phi_K - Phi_{K-1}|, the last increment of the product.
    std::optional<double> last_increment() const
    {
        if (K < 1 || !phi_partial[K] || !phi_partial[K - 1]) return std::nullopt;
        return std::abs(*phi_partial[K] - *phi_partial[K - 1]);
    }
};

namespace detail {

inline cplx u_from_phases(const LinearRecurrenceBase& base, const BlockPhases& ph, int k)
{
    const int d = base.order();
    const double alpha = base.alpha();
    cplx s{0};
    double pw = alpha;
    for (int ell = 0; ell < d; ++ell) {
        s += (ph.coefficient(k - 1, ell) - double(base.a(ell))) / pw;
        pw *= alpha;
    }
    return std::pow(alpha, d) * s;
}

}  // namespace detail

/// H_k(t) = sum_{m<G_k} exp(i t f(m)) for k <= K via the d-step block
/// recurrence, bootstrapped by direct summation for k < d.
inline TransformTrace h_sequence(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t, int K)
{
    if (K < 0) throw domain_error("K must be >= 0");
    if (K > base.max_level() - 1) throw capacity_error("h_sequence up to K=" + std::to_string(K), K + 1);
    const int d = base.order();
    const BlockPhases ph(base, f, t);

    TransformTrace tr;
    tr.t = t;
    tr.K = K;
    tr.H.resize(K + 1);
    std::vector<int> digits;
    for (int k = 0; k <= std::min(K, d - 1); ++k) {
        cplx s{0};
        const std::uint64_t limit = base.G_small()[k];
        for (std::uint64_t m = 0; m < limit; ++m) {
            greedy_expand_small(base, m, digits);
            s += std::polar(1.0, t * ph.weights().sum_digits(digits));
        }
        tr.H[k] = s;
    }
    for (int k = d; k <= K; ++k) {
        cplx s{0};
        for (int ell = 0; ell < d; ++ell) s += ph.coefficient(k - 1, ell) * tr.H[k - 1 - ell];
        tr.H[k] = s;
    }

    const double alpha = base.alpha();
    tr.r.assign(K + 1, std::nullopt);
    tr.eps.assign(K + 1, std::nullopt);
    tr.u.assign(K + 1, std::nullopt);
    tr.phi_partial.assign(K + 1, std::nullopt);
    tr.r[0] = cplx(1);
    tr.phi_partial[0] = cplx(1.0 / base.kappa());
    for (int k = 1; k <= K; ++k) {
        if (std::abs(tr.H[k - 1]) > ratio_floor) {
            tr.r[k] = tr.H[k] / tr.H[k - 1];
            tr.eps[k] = *tr.r[k] - alpha;
            if (tr.phi_partial[k - 1]) tr.phi_partial[k] = *tr.phi_partial[k - 1] * (*tr.r[k] / alpha);
        }
        if (k >= d) tr.u[k] = detail::u_from_phases(base, ph, k);
    }
    return tr;
}

/// u_k(t) = alpha^d sum_{l<d} (g_t(theta_{k-1,l}) sigma_{k-1,l}(t) - a_l) / alpha^{l+1}.
inline cplx u_k(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t, int k)
{
    if (k < base.order()) throw index_error("u_k needs k >= d");
    if (k - 1 > base.max_level()) throw capacity_error("u_k at level " + std::to_string(k), k - 1);
    return detail::u_from_phases(base, BlockPhases(base, f, t), k);
}

struct UkIdentity {
    cplx lhs;        // u_k computed from its definition
    cplx linear;     // alpha^{d-2} sum_j (alpha - tau_{k,j}) eps_{k-j}
    cplx remainder;  // R_k
    double residual = 0;
};

namespace detail {

// Elementary symmetric polynomials e_0..e_n of xs.
inline std::vector<cplx> elementary_symmetric(const std::vector<cplx>& xs)
{
    std::vector<cplx> e(xs.size() + 1, cplx(0));
    e[0] = 1;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t m = i + 1; m >= 1; --m) e[m] += e[m - 1] * xs[i];
    return e;
}

}  // namespace detail

/// Checks u_k = alpha^{d-2} sum_{j<d} (alpha - tau_{k,j}) eps_{k-j} + R_k on a
/// computed trace, where R_k collects the products of two or more deviations.
inline UkIdentity uk_identity(const LinearRecurrenceBase& base, const GAdditiveFunction& f, const TransformTrace& tr,
                              int k)
{
    const int d = base.order();
    if (k < 2 * d) throw index_error("u_k identity needs k >= 2d");
    if (k > tr.K) throw capacity_error("u_k identity beyond the computed trace", k);
    for (int j = 0; j < d; ++j)
        if (!tr.eps[k - j]) throw error("identity-unavailable", "ratio r_" + std::to_string(k - j) + " is undefined");

    const double alpha = base.alpha();
    const BlockPhases ph(base, f, tr.t);
    std::vector<cplx> c(d);
    for (int m = 0; m < d; ++m) c[m] = ph.coefficient(k - 1, m);
    auto eps = [&](int j) { return *tr.eps[k - j]; };

    // Second-order part of prod_{l<j<d} (alpha + eps_{k-j}) - alpha^{d-l-1}.
    auto pi_hat2 = [&](int ell) {
        std::vector<cplx> xs;
        for (int j = ell + 1; j < d; ++j) xs.push_back(eps(j));
        const auto e = detail::elementary_symmetric(xs);
        cplx s{0};
        for (int m = 2; m < d - ell; ++m) s += std::pow(alpha, d - ell - m - 1) * e[m];
        return s;
    };

    UkIdentity out;
    out.lhs = detail::u_from_phases(base, ph, k);
    cplx tau{0};
    for (int j = 0; j < d; ++j) {
        // tau_{k,j} = sum_{m<j} c_m / alpha^m
        if (j > 0) tau += c[j - 1] / std::pow(alpha, j - 1);
        out.linear += (alpha - tau) * eps(j);
    }
    out.linear *= std::pow(alpha, d - 2);

    cplx tail_sum{0};
    for (int j = 1; j < d; ++j) tail_sum += eps(j);
    out.remainder = (alpha + eps(0)) * pi_hat2(0) + std::pow(alpha, d - 2) * tail_sum * eps(0);
    for (int m = 0; m < d; ++m) out.remainder -= c[m] * pi_hat2(m);

    out.residual = std::abs(out.lhs - out.linear - out.remainder);
    return out;
}

inline double verify_uk_identity(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t, int k)
{
    const auto tr = h_sequence(base, f, t, k);
    return uk_identity(base, f, tr, k).residual;
}

/// One-step contraction constant L of |eps_k| <= |u_k| + L sum_{1<=j<d} |eps_{k-j}|.
inline double contraction_constant(const LinearRecurrenceBase& base)
{
    const int d = base.order();
    const double alpha = base.alpha();
    const double L = d == 2 ? 1 - base.a(0) / alpha
                            : (2 - 2 * base.a(0) / alpha - base.a(d - 1) / std::pow(alpha, d)) / (2.0 * (d - 1));
    if (!(L > 0 && L < 1.0 / (d - 1))) throw numeric_error("contraction constant outside (0, 1/(d-1))");
    return L;
}

struct KernelCoefficients {
    double L = 0;
    std::vector<double> b;
    double partial_sum = 0;
    /// 1 / (1 - L (d-1)), the value of the full series.
    double total = 0;
};

/// Coefficients of 1 / (1 - L(x + ... + x^{d-1})): b_0 = 1,
/// b_n = L (b_{n-1} + ... + b_{n-d+1}).
inline KernelCoefficients kernel_coefficients(const LinearRecurrenceBase& base, int N)
{
    if (N < 0) throw domain_error("N must be >= 0");
    const int d = base.order();
    KernelCoefficients kc;
    kc.L = contraction_constant(base);
    kc.b.assign(N + 1, 0.0);
    kc.b[0] = 1;
    for (int n = 1; n <= N; ++n) {
        double s = 0;
        for (int j = 1; j < d && n - j >= 0; ++j) s += kc.b[n - j];
        kc.b[n] = kc.L * s;
    }
    for (double x : kc.b) kc.partial_sum += x;
    kc.total = 1 / (1 - kc.L * (d - 1));
    return kc;
}

struct PerturbedCompanion {
    int n = 0;
    double t = 0;
    /// d x d, row-major.
    std::vector<std::vector<cplx>> entries;
    cplx lambda;
    double Q = 0;
    std::string method;

    const std::vector<cplx>& first_row() const { return entries.front(); }
};

/// Q_n = sum_{r<d} sum_{1<=c<=a} f(c G_{n-r})^2.
inline double block_energy(const LinearRecurrenceBase& base, const GAdditiveFunction& f, int n)
{
    const int d = base.order();
    if (n < d - 1) throw index_error("block energy needs n >= d-1");
    double q = 0;
    for (int r = 0; r < d; ++r)
        for (int c = 1; c <= base.max_digit(); ++c) {
            const double w = f.weight(c, n - r);
            q += w * w;
        }
    return q;
}

namespace detail {

inline std::vector<cplx> first_row(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t, int n)
{
    const BlockPhases ph(base, f, t);
    std::vector<cplx> row(base.order());
    for (int ell = 0; ell < base.order(); ++ell) row[ell] = ph.coefficient(n, ell);
    return row;
}

// Follows the root of det(x - A_n(s)) from s=0 (root alpha) to s=t.
inline std::optional<cplx> continue_eigenvalue(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t,
                                               int n)
{
    cplx lam(base.alpha());
    double s = 0;
    double step = t / 32;
    int shrink = 0;
    while (s != t) {
        const double next = (std::abs(t - s) <= std::abs(step)) ? t : s + step;
        const auto row = first_row(base, f, next, n);
        const auto p = poly::characteristic<cplx>(row);
        const auto z = poly::newton(p, lam);
        if (z && std::abs(*z - lam) < 0.25 * std::max(1.0, std::abs(lam))) {
            lam = *z;
            s = next;
        } else {
            if (++shrink > 30) return std::nullopt;
            step /= 2;
        }
    }
    return lam;
}

}  // namespace detail

/// A_n(t) with first row c_{n,l}(t), its eigenvalue continued from alpha, and
/// the block energy Q_n.
inline PerturbedCompanion companion_at(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t, int n)
{
    const int d = base.order();
    if (n < d - 1) throw index_error("companion_at needs n >= d-1");
    if (n > base.max_level()) throw capacity_error("companion_at level", n);
    PerturbedCompanion pc;
    pc.n = n;
    pc.t = t;
    pc.entries.assign(d, std::vector<cplx>(d, cplx(0)));
    pc.entries[0] = detail::first_row(base, f, t, n);
    for (int i = 1; i < d; ++i) pc.entries[i][i - 1] = 1;
    pc.Q = block_energy(base, f, n);

    if (t == 0) {
        pc.lambda = base.alpha();
        pc.method = "unperturbed";
    } else if (auto lam = detail::continue_eigenvalue(base, f, t, n)) {
        pc.lambda = *lam;
        pc.method = "continuation";
    } else {
        const auto p = poly::characteristic<cplx>(pc.entries[0]);
        const auto roots = poly::durand_kerner<cplx>(p, 500, 1e-14);
        if (!roots.converged) throw numeric_error("eigenvalue tracking and eigensolve both failed");
        pc.lambda = roots.roots.front();
        for (const cplx& z : roots.roots)
            if (std::abs(z - base.alpha()) < std::abs(pc.lambda - base.alpha())) pc.lambda = z;
        pc.method = "eigensolve";
    }
    return pc;
}

}  // namespace gbase
