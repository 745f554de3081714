#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>

#include "error.hpp"

namespace gbase {

using bigint = boost::multiprecision::cpp_int;

inline std::string to_string(const bigint& v) { return v.str(); }

inline bigint parse_bigint(const std::string& s)
{
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw parse_error("expected a nonnegative decimal integer, got '" + s + "'");
    return bigint(s);
}

/// log(v) for v > 0 without overflowing a double.
inline double log_of(const bigint& v)
{
    const unsigned bits = boost::multiprecision::msb(v) + 1;
    if (bits <= 1000) return std::log(v.convert_to<double>());
    const unsigned shift = bits - 64;
    const bigint top = v >> shift;
    return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

}  // namespace gbase
