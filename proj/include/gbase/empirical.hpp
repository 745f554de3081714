#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "base.hpp"
#include "digits.hpp"
#include "error.hpp"
#include "gfun.hpp"
#include "parallel.hpp"
#include "transform.hpp"

namespace gbase {

/// Above this many samples the distribution is kept as a quantile sketch.
inline constexpr std::uint64_t exact_sample_limit = 10'000'000;
inline constexpr std::uint64_t sketch_chunk = 1'000'000;
inline constexpr int sketch_points_per_chunk = 1000;

namespace detail {

inline void check_range(const LinearRecurrenceBase& base, std::uint64_t N)
{
    const auto& G = base.G_small();
    if (N > G.back() || N > base.G_sequence().back()) {
        const int need = static_cast<int>(std::upper_bound(G.begin(), G.end(), N) - G.begin());
        throw capacity_error("N=" + std::to_string(N) + " exceeds G_max", need);
    }
}

// f(n) for n in [lo, hi) by odometer stepping.
inline void fill_values(const LinearRecurrenceBase& base, const WeightTable& w, std::uint64_t lo, std::uint64_t hi,
                        double* out)
{
    if (lo >= hi) return;
    DigitOdometer odo(base, lo);
    double value = 0;
    const auto& e = odo.digits();
    for (std::size_t k = 0; k < e.size(); ++k)
        if (e[k]) value += w(e[k], static_cast<int>(k));
    out[0] = value;
    for (std::uint64_t n = lo + 1; n < hi; ++n) {
        odo.increment([&](int level, int from, int to) { value += w(to, level) - w(from, level); });
        out[n - lo] = value;
    }
}

}  // namespace detail

/// f(n) for every n < N, in order. Sub-ranges are filled concurrently; each
/// slot is written by exactly one worker so the result is deterministic.
inline std::vector<double> enumerate_values(const LinearRecurrenceBase& base, const GAdditiveFunction& f,
                                            std::uint64_t N, unsigned threads = 1)
{
    check_digits_fit(base, f);
    detail::check_range(base, N);
    const WeightTable w(f, static_cast<int>(base.G_small().size()));
    std::vector<double> out(N);
    const std::uint64_t block = 1 << 16;
    const std::size_t blocks = (N + block - 1) / block;
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::uint64_t lo = b * block, hi = std::min<std::uint64_t>(N, lo + block);
        detail::fill_values(base, w, lo, hi, out.data() + lo);
    });
    return out;
}

/// Empirical law of f(n), n < N. Exact mode keeps every value; sketch mode
/// keeps 1000 weighted quantile points per million samples, giving rank
/// error at most 1e-3 of N.
struct EmpiricalDistribution {
    std::uint64_t N = 0;
    std::vector<double> values;   // sorted
    std::vector<double> cumulative;  // sketch mode only: running weight through values[i]
    std::string source;           // base and function identity
    bool exact = true;

    double count_through(std::size_t i) const { return exact ? double(i + 1) : cumulative[i]; }

    /// F_N(z) = #{n < N : f(n) <= z} / N.
    double cdf(double z) const
    {
        const auto it = std::upper_bound(values.begin(), values.end(), z);
        if (it == values.begin()) return 0.0;
        return count_through(static_cast<std::size_t>(it - values.begin()) - 1) / double(N);
    }
};

inline std::string source_id(const LinearRecurrenceBase& base, const GAdditiveFunction& f)
{
    return base.id() + "|" + f.description();
}

inline EmpiricalDistribution empirical_distribution(const LinearRecurrenceBase& base, const GAdditiveFunction& f,
                                                    std::uint64_t N, unsigned threads = 1)
{
    if (N == 0) throw domain_error("N must be >= 1");
    check_digits_fit(base, f);
    detail::check_range(base, N);
    EmpiricalDistribution dist;
    dist.N = N;
    dist.source = source_id(base, f);
    if (N <= exact_sample_limit) {
        dist.values = enumerate_values(base, f, N, threads);
        std::sort(dist.values.begin(), dist.values.end());
        return dist;
    }

    dist.exact = false;
    const WeightTable w(f, static_cast<int>(base.G_small().size()));
    const std::size_t chunks = (N + sketch_chunk - 1) / sketch_chunk;
    std::vector<std::vector<std::pair<double, double>>> parts(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::uint64_t lo = c * sketch_chunk, hi = std::min<std::uint64_t>(N, lo + sketch_chunk);
        std::vector<double> v(hi - lo);
        detail::fill_values(base, w, lo, hi, v.data());
        std::sort(v.begin(), v.end());
        const std::size_t m = std::min<std::size_t>(sketch_points_per_chunk, v.size());
        std::size_t prev = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t rank = (i + 1) * v.size() / m;  // points cover (prev, rank]
            parts[c].emplace_back(v[rank - 1], double(rank - prev));
            prev = rank;
        }
    });
    std::vector<std::pair<double, double>> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    double run = 0;
    for (const auto& [v, wt] : all) {
        run += wt;
        dist.values.push_back(v);
        dist.cumulative.push_back(run);
    }
    return dist;
}

/// (z, F_N(z)) on the grid.
inline std::vector<std::pair<double, double>> empirical_cdf(const LinearRecurrenceBase& base,
                                                            const GAdditiveFunction& f, std::uint64_t N,
                                                            std::span<const double> z_grid, unsigned threads = 1)
{
    const auto dist = empirical_distribution(base, f, N, threads);
    std::vector<std::pair<double, double>> out;
    out.reserve(z_grid.size());
    for (double z : z_grid) out.emplace_back(z, dist.cdf(z));
    return out;
}

/// (1/N) sum_{n<N} exp(i t f(n)) over precomputed values.
inline cplx empirical_charfn(std::span<const double> values, double t)
{
    if (values.empty()) throw domain_error("empty sample");
    cplx s{0};
    for (double v : values) s += std::polar(1.0, t * v);
    return s / double(values.size());
}

inline cplx empirical_charfn(const LinearRecurrenceBase& base, const GAdditiveFunction& f, std::uint64_t N, double t,
                             unsigned threads = 1)
{
    if (N == 0) throw domain_error("N must be >= 1");
    return empirical_charfn(enumerate_values(base, f, N, threads), t);
}

/// Sup-norm distance between two empirical d.f.s of the same (base, f).
inline double ks_distance(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2)
{
    if (d1.source != d2.source) throw domain_error("ks_distance: distributions come from different (base, f)");
    std::size_t i = 0, j = 0;
    double F1 = 0, F2 = 0, best = 0;
    const auto& v1 = d1.values;
    const auto& v2 = d2.values;
    while (i < v1.size() || j < v2.size()) {
        const double z = (j >= v2.size() || (i < v1.size() && v1[i] <= v2[j])) ? v1[i] : v2[j];
        while (i < v1.size() && v1[i] == z) ++i;
        while (j < v2.size() && v2[j] == z) ++j;
        F1 = i ? d1.count_through(i - 1) / double(d1.N) : 0.0;
        F2 = j ? d2.count_through(j - 1) / double(d2.N) : 0.0;
        best = std::max(best, std::fabs(F1 - F2));
    }
    return best;
}

struct ChangDecomposition {
    cplx direct;
    cplx reconstructed;
    /// omega_q(N) for q = 0..Q (zero where e_q(N) = 0).
    std::vector<cplx> weights;
    double residual = 0;
};

/// S(N) = sum_{n<N} g_t(n) both directly and as
/// N sum_q omega_q(N) S(G_q)/G_q, with S(G_q) taken from the block recurrence.
/// `values` must hold f(n) for at least n < N.
inline ChangDecomposition chang_decomposition(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t,
                                              std::uint64_t N, std::span<const double> values)
{
    if (N == 0) throw domain_error("N must be >= 1");
    if (values.size() < N) throw domain_error("chang_decomposition: not enough precomputed values");
    ChangDecomposition out;
    for (std::uint64_t n = 0; n < N; ++n) out.direct += std::polar(1.0, t * values[n]);

    const auto e = greedy_expand(base, bigint(N));
    const int Q = e.top_level();
    const auto tr = h_sequence(base, f, t, Q);
    const BlockPhases ph(base, f, t);
    out.weights.assign(Q + 1, cplx(0));
    cplx prefix{1};  // prod_{r>q} g_t(e_r G_r)
    for (int q = Q; q >= 0; --q) {
        const int eq = e.digits[q];
        if (eq > 0) {
            cplx inner{0};
            for (int j = 0; j < eq; ++j) inner += std::polar(1.0, t * ph.weights()(j, q));
            out.weights[q] = prefix * inner * (base.G_double(q) / double(N));
            out.reconstructed += prefix * inner * tr.H[q];
        }
        prefix *= std::polar(1.0, t * ph.weights()(eq, q));
    }
    out.residual = std::abs(out.direct - out.reconstructed) / std::abs(out.direct);
    return out;
}

inline double chang_decomposition_residual(const LinearRecurrenceBase& base, const GAdditiveFunction& f, double t,
                                           std::uint64_t N)
{
    const auto values = enumerate_values(base, f, N);
    return chang_decomposition(base, f, t, N, values).residual;
}

}  // namespace gbase
