#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "base.hpp"
#include "digits.hpp"
#include "error.hpp"

namespace gbase {

/// A G-additive function, given by its digit-level weights f(j G_k).
class GAdditiveFunction {
public:
    enum class Kind { table, poly_damped, geom_damped, sum };

    /// Explicit weights; levels absent from the map weigh 0.
    static GAdditiveFunction table(int max_digit, const std::map<std::pair<int, int>, double>& weights)
    {
        Table t;
        for (const auto& [jk, w] : weights) {
            const auto [j, k] = jk;
            if (j < 1 || j > max_digit) throw domain_error("table weight digit " + std::to_string(j) + " outside 1..a");
            if (k < 0) throw domain_error("table weight level must be >= 0");
            if (static_cast<int>(t.w.size()) <= k) t.w.resize(k + 1, std::vector<double>(max_digit + 1, 0.0));
            t.w[k][j] = w;
        }
        return GAdditiveFunction(max_digit, std::move(t));
    }

    static GAdditiveFunction zero(int max_digit) { return table(max_digit, {}); }

    /// Weight 1 for every nonzero digit at every level up to `levels`.
    static GAdditiveFunction digit_count(int max_digit, int levels)
    {
        std::map<std::pair<int, int>, double> w;
        for (int k = 0; k < levels; ++k)
            for (int j = 1; j <= max_digit; ++j) w[{j, k}] = 1.0;
        return table(max_digit, w);
    }

    /// f(j G_n) = phi(j) / (n+1)^beta. `phi` lists phi(1), phi(2), ...; missing
    /// entries are 0.
    static GAdditiveFunction poly_damped(int max_digit, double beta, std::vector<double> phi)
    {
        if (!(beta > 0)) throw domain_error("poly_damped needs beta > 0");
        return GAdditiveFunction(max_digit, Poly{beta, normalize_phi(max_digit, std::move(phi))});
    }

    /// f(j G_n) = rho^n phi(j).
    static GAdditiveFunction geom_damped(int max_digit, double rho, std::vector<double> phi)
    {
        if (!(rho > -1 && rho < 1)) throw domain_error("geom_damped needs rho in (-1, 1)");
        return GAdditiveFunction(max_digit, Geom{rho, normalize_phi(max_digit, std::move(phi))});
    }

    static GAdditiveFunction sum(GAdditiveFunction f, GAdditiveFunction g)
    {
        if (f.max_digit() != g.max_digit()) throw domain_error("sum of functions over different digit sets");
        const int a = f.max_digit();
        return GAdditiveFunction(a, Sum{std::make_shared<const GAdditiveFunction>(std::move(f)),
                                        std::make_shared<const GAdditiveFunction>(std::move(g))});
    }

    Kind kind() const noexcept { return static_cast<Kind>(repr_.index()); }
    int max_digit() const noexcept { return max_digit_; }

    /// f(j G_k).
    double weight(int j, int k) const
    {
        if (j < 0 || j > max_digit_)
            throw domain_error("digit " + std::to_string(j) + " outside 0.." + std::to_string(max_digit_));
        if (j == 0) return 0.0;
        return std::visit([&](const auto& r) { return r.at(j, k); }, repr_);
    }

    /// Smallest J with f(c G_j) = 0 for every digit c and every j >= J, when
    /// that can be decided from the parameters. Cancellation between two
    /// non-eventually-zero summands is not detected.
    std::optional<int> eventually_zero_from() const
    {
        return std::visit([&](const auto& r) { return r.zero_from(*this); }, repr_);
    }

    std::string description() const
    {
        return std::visit([](const auto& r) { return r.describe(); }, repr_);
    }

private:
    static std::vector<double> normalize_phi(int max_digit, std::vector<double> phi)
    {
        if (static_cast<int>(phi.size()) > max_digit)
            throw domain_error("phi given for more digits than the base allows");
        phi.insert(phi.begin(), 0.0);
        phi.resize(max_digit + 1, 0.0);
        return phi;
    }

    static bool all_zero(const std::vector<double>& v)
    {
        for (double x : v)
            if (x != 0) return false;
        return true;
    }

    static std::string join(const std::vector<double>& phi)
    {
        std::ostringstream s;
        s.precision(17);
        for (std::size_t j = 1; j < phi.size(); ++j) s << (j > 1 ? "," : "") << phi[j];
        return s.str();
    }

    struct Table {
        std::vector<std::vector<double>> w;  // w[k][j]

        double at(int j, int k) const { return k < static_cast<int>(w.size()) ? w[k][j] : 0.0; }
        std::optional<int> zero_from(const GAdditiveFunction&) const
        {
            int J = static_cast<int>(w.size());
            while (J > 0 && all_zero(w[J - 1])) --J;
            return J;
        }
        std::string describe() const
        {
            std::ostringstream s;
            s.precision(17);
            s << "table[";
            bool first = true;
            for (std::size_t k = 0; k < w.size(); ++k)
                for (std::size_t j = 1; j < w[k].size(); ++j)
                    if (w[k][j] != 0) {
                        s << (first ? "" : ";") << j << "," << k << "," << w[k][j];
                        first = false;
                    }
            s << "]";
            return s.str();
        }
    };

    struct Poly {
        double beta;
        std::vector<double> phi;

        double at(int j, int k) const { return phi[j] / std::pow(k + 1.0, beta); }
        std::optional<int> zero_from(const GAdditiveFunction&) const
        {
            return all_zero(phi) ? std::optional<int>(0) : std::nullopt;
        }
        std::string describe() const
        {
            std::ostringstream s;
            s.precision(17);
            s << "poly:" << beta << ":" << join(phi);
            return s.str();
        }
    };

    struct Geom {
        double rho;
        std::vector<double> phi;

        double at(int j, int k) const { return std::pow(rho, k) * phi[j]; }
        std::optional<int> zero_from(const GAdditiveFunction&) const
        {
            if (all_zero(phi)) return 0;
            if (rho == 0) return 1;
            return std::nullopt;
        }
        std::string describe() const
        {
            std::ostringstream s;
            s.precision(17);
            s << "geom:" << rho << ":" << join(phi);
            return s.str();
        }
    };

    struct Sum {
        std::shared_ptr<const GAdditiveFunction> f, g;

        double at(int j, int k) const { return f->weight(j, k) + g->weight(j, k); }
        std::optional<int> zero_from(const GAdditiveFunction& self) const
        {
            const auto a = f->eventually_zero_from();
            const auto b = g->eventually_zero_from();
            if (!a || !b) return std::nullopt;
            int J = std::max(*a, *b);
            auto level_zero = [&](int k) {
                for (int c = 1; c <= self.max_digit(); ++c)
                    if (self.weight(c, k) != 0) return false;
                return true;
            };
            while (J > 0 && level_zero(J - 1)) --J;
            return J;
        }
        std::string describe() const { return "sum:(" + f->description() + ")+(" + g->description() + ")"; }
    };

    using Repr = std::variant<Table, Poly, Geom, Sum>;

    GAdditiveFunction(int max_digit, Repr r) : max_digit_(max_digit), repr_(std::move(r))
    {
        if (max_digit < 1) throw domain_error("max_digit must be >= 1");
    }

    int max_digit_;
    Repr repr_;
};

/// Dense cache of f(j G_k) for levels 0..levels-1; the hot loops read this
/// instead of dispatching per digit.
class WeightTable {
public:
    WeightTable(const GAdditiveFunction& f, int levels) : stride_(f.max_digit() + 1), levels_(levels)
    {
        w_.resize(static_cast<std::size_t>(levels) * stride_);
        for (int k = 0; k < levels; ++k)
            for (int j = 0; j < stride_; ++j) w_[k * stride_ + j] = f.weight(j, k);
    }

    double operator()(int j, int k) const { return w_[static_cast<std::size_t>(k) * stride_ + j]; }
    int levels() const noexcept { return levels_; }

    double sum_digits(const std::vector<int>& digits) const
    {
        double s = 0;
        for (std::size_t k = 0; k < digits.size(); ++k)
            if (digits[k]) s += (*this)(digits[k], static_cast<int>(k));
        return s;
    }

private:
    int stride_;
    int levels_;
    std::vector<double> w_;
};

inline void check_digits_fit(const LinearRecurrenceBase& base, const GAdditiveFunction& f)
{
    if (f.max_digit() != base.max_digit())
        throw domain_error("function digit bound " + std::to_string(f.max_digit()) + " does not match the base (" +
                           std::to_string(base.max_digit()) + ")");
}

/// f(n) = sum_k f(e_k(n) G_k) over the greedy digits of n.
inline double eval(const GAdditiveFunction& f, const LinearRecurrenceBase& base, const bigint& n)
{
    check_digits_fit(base, f);
    const auto e = greedy_expand(base, n);
    double s = 0;
    for (std::size_t k = 0; k < e.digits.size(); ++k)
        if (e.digits[k]) s += f.weight(e.digits[k], static_cast<int>(k));
    return s;
}

/// g_t(n) = exp(i t f(n)).
inline std::complex<double> phase(const GAdditiveFunction& f, const LinearRecurrenceBase& base, const bigint& n,
                                  double t)
{
    return std::polar(1.0, t * eval(f, base, n));
}

}  // namespace gbase
