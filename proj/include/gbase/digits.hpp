#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "base.hpp"
#include "bigint.hpp"
#include "error.hpp"

namespace gbase {

/// Greedy digit word of an integer. Digits are least significant first;
/// an empty word represents 0.
struct DigitExpansion {
    std::vector<int> digits;
    std::string base_id;

    bool empty() const noexcept { return digits.empty(); }
    int top_level() const noexcept { return static_cast<int>(digits.size()) - 1; }

    std::vector<int> most_significant_first() const { return {digits.rbegin(), digits.rend()}; }

    /// Space-separated, most significant first; "0" for the empty word.
    std::string str() const
    {
        if (digits.empty()) return "0";
        std::string s;
        for (auto it = digits.rbegin(); it != digits.rend(); ++it) s += (s.empty() ? "" : " ") + std::to_string(*it);
        return s;
    }

    bool operator==(const DigitExpansion& o) const { return digits == o.digits; }
};

namespace detail {

inline void trim(std::vector<int>& w)
{
    while (!w.empty() && w.back() == 0) w.pop_back();
}

// Smallest level L with G_L > n, growing the sequence past the stored range if needed.
inline int required_level(const LinearRecurrenceBase& base, const bigint& n)
{
    std::vector<bigint> G = base.G_sequence();
    const int d = base.order();
    while (G.back() <= n) {
        bigint v = 0;
        const int k = static_cast<int>(G.size());
        for (int j = 0; j < d; ++j) v += base.a(j) * G[k - 1 - j];
        G.push_back(std::move(v));
    }
    const auto it = std::upper_bound(G.begin(), G.end(), n);
    return static_cast<int>(it - G.begin());
}

}  // namespace detail

inline DigitExpansion greedy_expand(const LinearRecurrenceBase& base, const bigint& n)
{
    if (n < 0) throw domain_error("greedy_expand needs n >= 0");
    const auto& G = base.G_sequence();
    if (n >= G.back())
        throw capacity_error("n=" + n.str() + " is not below G_" + std::to_string(base.max_level()),
                             detail::required_level(base, n));
    DigitExpansion e;
    e.base_id = base.id();
    if (n == 0) return e;
    const int top = static_cast<int>(std::upper_bound(G.begin(), G.end(), n) - G.begin()) - 1;
    e.digits.assign(top + 1, 0);
    bigint rest = n;
    for (int k = top; k >= 0 && rest > 0; --k) {
        if (rest >= G[k]) {
            const bigint q = rest / G[k];
            e.digits[k] = q.convert_to<int>();
            rest -= q * G[k];
        }
    }
    return e;
}

/// Machine-word greedy expansion; n must lie below the last 63-bit level.
inline void greedy_expand_small(const LinearRecurrenceBase& base, std::uint64_t n, std::vector<int>& out)
{
    const auto& G = base.G_small();
    if (n >= G.back()) throw capacity_error("n is beyond the machine-word range", static_cast<int>(G.size()));
    out.clear();
    if (n == 0) return;
    const int top = static_cast<int>(std::upper_bound(G.begin(), G.end(), n) - G.begin()) - 1;
    out.assign(top + 1, 0);
    for (int k = top; k >= 0 && n > 0; --k) {
        out[k] = static_cast<int>(n / G[k]);
        n -= out[k] * G[k];
    }
}

inline bigint decode(const LinearRecurrenceBase& base, const std::vector<int>& digits)
{
    if (static_cast<int>(digits.size()) > base.max_level() + 1)
        throw capacity_error("digit word longer than the stored levels", static_cast<int>(digits.size()) - 1);
    bigint n = 0;
    for (std::size_t k = 0; k < digits.size(); ++k)
        if (digits[k]) n += digits[k] * base.G_sequence()[k];
    return n;
}

inline bigint decode(const LinearRecurrenceBase& base, const DigitExpansion& e) { return decode(base, e.digits); }

/// Prefix-sum uniqueness condition: sum_{k<K} e_k G_k < G_K for every K up to
/// the word length.
inline bool prefix_condition(const LinearRecurrenceBase& base, const std::vector<int>& digits)
{
    if (static_cast<int>(digits.size()) > base.max_level()) return false;
    bigint prefix = 0;
    for (std::size_t k = 0; k < digits.size(); ++k) {
        if (digits[k] < 0) return false;
        prefix += digits[k] * base.G_sequence()[k];
        if (prefix >= base.G_sequence()[k + 1]) return false;
    }
    return true;
}

/// True iff re-encoding the decoded value reproduces the word (high zeros
/// ignored). Cross-checked against the prefix-sum condition on every call.
inline bool is_admissible(const LinearRecurrenceBase& base, std::vector<int> digits)
{
    bool greedy = std::all_of(digits.begin(), digits.end(), [](int x) { return x >= 0; });
    detail::trim(digits);
    if (greedy) {
        if (static_cast<int>(digits.size()) > base.max_level()) {
            greedy = false;
        } else {
            const bigint n = decode(base, digits);
            greedy = n < base.G_sequence().back() && greedy_expand(base, n).digits == digits;
        }
    }
    if (greedy != prefix_condition(base, digits))
        throw std::logic_error("greedy recode and prefix condition disagree on a digit word");
    return greedy;
}

inline bool is_admissible(const LinearRecurrenceBase& base, const DigitExpansion& e)
{
    return is_admissible(base, e.digits);
}

struct WindowViolation {
    int position;
    int length;
};

/// Diagnostic only: positions where (e_k, ..., e_{k-l+1}) >= (a_0, ..., a_{l-1})
/// lexicographically. Read literally this flags every Zeckendorf digit 1
/// at l=1, so admissibility never depends on it.
inline std::vector<WindowViolation> window_violations(const LinearRecurrenceBase& base, const std::vector<int>& digits)
{
    std::vector<WindowViolation> out;
    const int d = base.order();
    for (int k = 0; k < static_cast<int>(digits.size()); ++k) {
        for (int l = 1; l <= d && k - l + 1 >= 0; ++l) {
            std::vector<int> window, prefix;
            for (int i = 0; i < l; ++i) {
                window.push_back(digits[k - i]);
                prefix.push_back(base.a(i));
            }
            if (!(window < prefix)) out.push_back({k, l});
        }
    }
    return out;
}

/// theta_{q,l} = sum_{j<l} a_j G_{q-j}.
inline bigint theta(const LinearRecurrenceBase& base, int q, int ell)
{
    if (ell < 0 || ell >= base.order()) throw index_error("theta: ell must lie in [0, d)");
    if (q < ell || q > base.max_level()) throw index_error("theta: level q=" + std::to_string(q) + " out of range");
    bigint v = 0;
    for (int j = 0; j < ell; ++j) v += base.a(j) * base.G(q - j);
    return v;
}

struct BlockDecomposition {
    int ell = 0;
    int k = 0;
    bigint v = 0;

    bool operator==(const BlockDecomposition&) const = default;
};

/// u = theta_{q,l} + k G_{q-l} + v with q = n_level + d - 1, 0 <= k < a_l,
/// 0 <= v < G_{q-l}.
inline BlockDecomposition block_decompose(const LinearRecurrenceBase& base, int n_level, const bigint& u)
{
    const int d = base.order();
    const int q = n_level + d - 1;
    if (n_level < 0 || q + 1 > base.max_level())
        throw capacity_error("block_decompose: level out of range", q + 1);
    if (u < 0 || u >= base.G(q + 1)) throw index_error("block_decompose: u must lie in [0, G_{n+d})");
    bigint offset = 0;
    for (int ell = 0; ell < d; ++ell) {
        const bigint& g = base.G(q - ell);
        const bigint next = offset + base.a(ell) * g;
        if (u < next) {
            const bigint rel = u - offset;
            return {ell, (rel / g).convert_to<int>(), rel % g};
        }
        offset = next;
    }
    throw std::logic_error("block_decompose: blocks do not cover [0, G_{n+d})");
}

/// Steps through greedy expansions of 0, 1, 2, ... with amortised O(1) digit
/// changes. Only levels with 63-bit G_k are available.
class DigitOdometer {
public:
    explicit DigitOdometer(const LinearRecurrenceBase& base, std::uint64_t start = 0)
        : G_(base.G_small()), digits_(G_.size(), 0), prefix_(G_.size(), 0), value_(start)
    {
        std::vector<int> e;
        greedy_expand_small(base, start, e);
        std::copy(e.begin(), e.end(), digits_.begin());
        for (std::size_t j = 1; j < G_.size(); ++j) prefix_[j] = prefix_[j - 1] + digits_[j - 1] * G_[j - 1];
    }

    std::uint64_t value() const noexcept { return value_; }
    std::uint64_t limit() const noexcept { return G_.back(); }
    const std::vector<int>& digits() const noexcept { return digits_; }

    /// Advances to value()+1. `on_change(level, old_digit, new_digit)` is
    /// invoked for every digit that changes.
    template <class OnChange>
    void increment(OnChange&& on_change)
    {
        if (value_ + 1 >= limit()) throw capacity_error("odometer exhausted the machine-word levels", int(G_.size()));
        // prefix_[j] = sum_{i<j} e_i G_i; adding 1 may make it reach G_j.
        std::size_t carry = 0;
        for (std::size_t j = 1; j < G_.size(); ++j) {
            if (++prefix_[j] == G_[j]) carry = j;
        }
        for (std::size_t j = 0; j < carry; ++j) {
            if (digits_[j]) {
                on_change(static_cast<int>(j), digits_[j], 0);
                digits_[j] = 0;
            }
            prefix_[j + 1] = 0;
        }
        const int old = digits_[carry]++;
        on_change(static_cast<int>(carry), old, old + 1);
        ++value_;
    }

    void increment()
    {
        increment([](int, int, int) {});
    }

private:
    std::vector<std::uint64_t> G_;
    std::vector<int> digits_;
    std::vector<std::uint64_t> prefix_;
    std::uint64_t value_ = 0;
};

}  // namespace gbase
