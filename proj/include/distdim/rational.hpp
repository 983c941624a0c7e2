#pragma once

// Exact arithmetic helpers shared by every module.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace distdim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using RVec = std::vector<Rational>;
using Vec = std::vector<double>;

/// Parses "p/q", an integer, or a plain decimal such as "-0.125" exactly.
Rational parse_rational(std::string_view text);

/// Always "p/q" (denominator 1 included) so the output round-trips.
std::string to_string(const Rational& r);
std::string to_string(const BigInt& n);

double to_double(const Rational& r);
double to_double(const BigInt& n);

/// Natural logarithm of a positive big integer without overflowing a double.
double log_big(const BigInt& n);

BigInt ipow(unsigned base, std::int64_t exponent);

bool fits_int64(const BigInt& n);

/// Returns k when n == base^k.
std::optional<std::int64_t> exact_log(const BigInt& n, unsigned base);

/// Smallest c >= 0 with base^c >= value.
int ceil_log(unsigned base, const BigInt& value);

BigInt lcm(const BigInt& a, const BigInt& b);

RVec to_rational(const std::vector<std::int64_t>& v);
Vec to_double(const RVec& v);

/// Floor of a / b for b > 0.
BigInt floor_div(const BigInt& a, const BigInt& b);

}  // namespace distdim
