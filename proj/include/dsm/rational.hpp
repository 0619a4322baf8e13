#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <string>
#include <string_view>

namespace dsm {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses "3", "-2", "0.67", "2/3" or "1.5e-1" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// Canonical text form: "3", "3/2". Round-trips through parse_rational.
std::string to_string_exact(const Rational& r);

// Fixed-point decimal text, rounding half away from zero.
std::string to_fixed(const Rational& r, int decimals);

// Rounds to the nearest multiple of 10^-decimals, half away from zero; returns the scaled integer.
BigInt round_scaled(const Rational& r, int decimals);

// Floor of r as a (signed) integer.
BigInt floor_int(const Rational& r);

double to_double(const Rational& r);

// Three-way comparison; boost numbers only provide the relational operators.
inline std::strong_ordering compare(const Rational& a, const Rational& b) {
    return a < b ? std::strong_ordering::less : (b < a ? std::strong_ordering::greater : std::strong_ordering::equal);
}

}  // namespace dsm
