#include "distdim/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "distdim/errors.hpp"

namespace distdim {

namespace {

BigInt parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) throw ParseError("empty integer in \"" + std::string(whole) + "\"");
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) throw ParseError("malformed number \"" + std::string(whole) + "\"");
  BigInt value = 0;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c < '0' || c > '9') throw ParseError("malformed number \"" + std::string(whole) + "\"");
    value = value * 10 + (c - '0');
  }
  return negative ? BigInt(-value) : value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view raw) {
  std::string_view text = trim(raw);
  if (text.empty()) throw ParseError("empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(trim(text.substr(0, slash)), raw);
    BigInt den = parse_integer(trim(text.substr(slash + 1)), raw);
    if (den == 0) throw ParseError("zero denominator in \"" + std::string(raw) + "\"");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string digits(text.substr(0, dot));
    std::string_view frac = text.substr(dot + 1);
    digits += frac;
    if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
    BigInt num = parse_integer(digits, raw);
    return Rational(num, ipow(10, static_cast<std::int64_t>(frac.size())));
  }
  return Rational(parse_integer(text, raw));
}

std::string to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

std::string to_string(const BigInt& n) { return n.str(); }

double to_double(const Rational& r) { return r.convert_to<double>(); }

double to_double(const BigInt& n) { return n.convert_to<double>(); }

double log_big(const BigInt& n) {
  if (n <= 0) throw std::domain_error("log of non-positive integer");
  auto bits = boost::multiprecision::msb(n);
  if (bits < 60) return std::log(n.convert_to<double>());
  unsigned shift = static_cast<unsigned>(bits - 60);
  BigInt head = n >> shift;
  return std::log(head.convert_to<double>()) + shift * std::log(2.0);
}

BigInt ipow(unsigned base, std::int64_t exponent) {
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

bool fits_int64(const BigInt& n) {
  static const BigInt lo = std::numeric_limits<std::int64_t>::min();
  static const BigInt hi = std::numeric_limits<std::int64_t>::max();
  return n >= lo && n <= hi;
}

std::optional<std::int64_t> exact_log(const BigInt& n, unsigned base) {
  if (n <= 0 || base < 2) return std::nullopt;
  BigInt v = n;
  std::int64_t k = 0;
  while (v > 1) {
    if (v % base != 0) return std::nullopt;
    v /= base;
    ++k;
  }
  return k;
}

int ceil_log(unsigned base, const BigInt& value) {
  int c = 0;
  BigInt p = 1;
  while (p < value) {
    p *= base;
    ++c;
  }
  return c;
}

BigInt lcm(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::lcm(a, b);
}

RVec to_rational(const std::vector<std::int64_t>& v) {
  RVec out;
  out.reserve(v.size());
  for (auto x : v) out.emplace_back(x);
  return out;
}

Vec to_double(const RVec& v) {
  Vec out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

}  // namespace distdim
