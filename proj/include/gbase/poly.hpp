#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace gbase::poly {

using cplx = std::complex<double>;

// Coefficients are stored highest degree first: p[0] x^n + ... + p[n].

template <class T>
T horner(std::span<const double> p, T x)
{
    T acc{0};
    for (double c : p) acc = acc * x + c;
    return acc;
}

inline cplx horner(std::span<const cplx> p, cplx x)
{
    cplx acc{0};
    for (const cplx& c : p) acc = acc * x + c;
    return acc;
}

/// Characteristic polynomial x^d - a_0 x^{d-1} - ... - a_{d-1} of a companion
/// first row.
template <class T>
std::vector<T> characteristic(std::span<const T> first_row)
{
    std::vector<T> p;
    p.reserve(first_row.size() + 1);
    p.push_back(T{1});
    for (const T& c : first_row) p.push_back(-c);
    return p;
}

/// Root of p on [lo, hi] by bisection; p(lo) and p(hi) must differ in sign.
/// Iterates until the bracket stops shrinking or is below `tol`.
inline double bisect(std::span<const double> p, double lo, double hi, double tol = 1e-14)
{
    long double a = lo, b = hi;
    long double fa = horner<long double>(p, a);
    for (int it = 0; it < 400 && (b - a) > tol * 1e-2; ++it) {
        const long double m = (a + b) / 2;
        if (m <= a || m >= b) break;
        const long double fm = horner<long double>(p, m);
        if (fm == 0) return static_cast<double>(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return static_cast<double>((a + b) / 2);
}

/// Synthetic division of p by (x - r); the remainder is dropped.
inline std::vector<double> deflate(std::span<const double> p, double r)
{
    std::vector<double> q;
    q.reserve(p.size() - 1);
    double acc = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        acc = acc * r + p[i];
        q.push_back(acc);
    }
    return q;
}

struct RootsResult {
    std::vector<cplx> roots;
    int sweeps = 0;
    bool converged = false;
};

/// All roots of p by Durand–Kerner simultaneous iteration.
template <class Coef>
RootsResult durand_kerner(std::span<const Coef> p, int max_sweeps = 500, double tol = 1e-14)
{
    RootsResult out;
    const std::size_t n = p.size() - 1;
    if (n == 0) {
        out.converged = true;
        return out;
    }
    std::vector<cplx> mon(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) mon[i] = cplx(p[i]) / cplx(p[0]);

    double radius = 0;
    for (std::size_t i = 1; i < mon.size(); ++i) radius = std::max(radius, std::abs(mon[i]));
    radius = 1 + radius;  // Cauchy bound
    const cplx seed(0.4, 0.9);
    std::vector<cplx>& z = out.roots;
    z.resize(n);
    cplx w = seed;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = w * (radius / 2);
        w *= seed;
    }

    std::span<const cplx> ms(mon);
    for (out.sweeps = 1; out.sweeps <= max_sweeps; ++out.sweeps) {
        double change = 0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx denom{1};
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            if (std::abs(denom) == 0) denom = cplx(1e-300);
            const cplx step = horner(ms, z[i]) / denom;
            z[i] -= step;
            change = std::max(change, std::abs(step) / std::max(1.0, std::abs(z[i])));
        }
        if (change < tol) {
            out.converged = true;
            break;
        }
    }
    // A few Newton polishes on the original polynomial.
    std::vector<cplx> dp;
    for (std::size_t i = 0; i + 1 < mon.size(); ++i) dp.push_back(mon[i] * double(n - i));
    std::span<const cplx> ds(dp);
    for (cplx& r : z) {
        for (int it = 0; it < 3; ++it) {
            const cplx d = horner(ds, r);
            if (std::abs(d) == 0) break;
            r -= horner(ms, r) / d;
        }
    }
    return out;
}

/// Newton iteration on a complex polynomial from `start`; nullopt if it fails
/// to converge in `max_iter` steps.
inline std::optional<cplx> newton(std::span<const cplx> p, cplx start, int max_iter = 60, double tol = 1e-15)
{
    const std::size_t n = p.size() - 1;
    std::vector<cplx> dp;
    for (std::size_t i = 0; i < n; ++i) dp.push_back(p[i] * double(n - i));
    std::span<const cplx> ds(dp);
    cplx z = start;
    for (int it = 0; it < max_iter; ++it) {
        const cplx d = horner(ds, z);
        if (std::abs(d) == 0) return std::nullopt;
        const cplx step = horner(p, z) / d;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        if (std::abs(step) <= tol * std::max(1.0, std::abs(z))) return z;
    }
    return std::nullopt;
}

}  // namespace gbase::poly
