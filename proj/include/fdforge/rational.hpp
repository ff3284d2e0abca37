#pragma once

// Exact rationals backed by Boost.Multiprecision. cpp_rational keeps values in
// lowest terms with a positive denominator.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fdforge/errors.hpp"

namespace fdforge {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
/// Extended precision float used where residuals fall far below double epsilon.
using Extended = boost::multiprecision::cpp_bin_float_50;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw Error("rational with zero denominator");
  return Rational(num, den);
}

inline BigInt factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline long double to_long_double(const Rational& r) {
  // Two-step division keeps the full long double mantissa for huge operands.
  Extended e = Extended(numerator(r)) / Extended(denominator(r));
  return e.convert_to<long double>();
}
inline long double to_long_double(double x) { return x; }

inline Extended to_extended(const Rational& r) {
  return Extended(numerator(r)) / Extended(denominator(r));
}
inline Extended to_extended(double x) { return Extended(x); }

/// Exact value of a finite double.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw Error("cannot convert non-finite value to a rational");
  return Rational(x);
}

/// "p/q" in lowest terms, or "p" when the denominator is one.
inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "n", "n/d", or a plain decimal such as "-0.125" or "2.5e-3" exactly.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { return ParseError("malformed number '" + std::string(text) + "'"); };
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw fail();
    return num / den;
  }

  bool negative = false;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  BigInt mantissa = 0;
  long exponent = 0;
  bool digits = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    char ch = text[i];
    if (ch >= '0' && ch <= '9') {
      mantissa = mantissa * 10 + (ch - '0');
      if (seen_point) --exponent;
      digits = true;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!digits) throw fail();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') throw fail();
    std::string tail(text.substr(i + 1));
    if (tail.empty()) throw fail();
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(tail, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != tail.size() || e > 4000 || e < -4000) throw fail();
    exponent += e;
  }
  Rational value(mantissa);
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exponent)));
  if (exponent >= 0) {
    value *= scale;
  } else {
    value /= scale;
  }
  return negative ? -value : value;
}

/// Continued-fraction approximation n/d of x with |x - n/d| <= tol*|x|.
/// This is the usual "rat" display convention for irrational quantities.
inline std::pair<std::int64_t, std::int64_t> approximate_fraction(double x, double tol = 1e-6) {
  if (!std::isfinite(x)) throw Error("cannot approximate non-finite value");
  std::int64_t h0 = 1, h1 = 0, k0 = 0, k1 = 1;
  double y = x;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(y);
    std::int64_t ai = static_cast<std::int64_t>(a);
    std::int64_t h = ai * h0 + h1;
    std::int64_t k = ai * k0 + k1;
    h1 = h0;
    h0 = h;
    k1 = k0;
    k0 = k;
    if (std::abs(x - static_cast<double>(h0) / static_cast<double>(k0)) <= tol * std::abs(x) || y == a) break;
    y = 1.0 / (y - a);
  }
  return {h0, k0};
}

inline std::string approximate_fraction_string(double x, double tol = 1e-6) {
  auto [n, d] = approximate_fraction(x, tol);
  if (d == 1) return std::to_string(n);
  return std::to_string(n) + "/" + std::to_string(d);
}

}  // namespace fdforge
