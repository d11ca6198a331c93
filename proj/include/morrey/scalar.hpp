#pragma once

// Scalar layer: every quantity in the library is computed either in exact
// rational arithmetic (gallery objects, witness certification) or in plain
// doubles (randomized search). Code is templated on the scalar type S and
// the helpers below are the only place the two modes differ.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace morrey {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

template <class S>
inline constexpr bool is_exact_scalar_v = false;
template <>
inline constexpr bool is_exact_scalar_v<Rational> = true;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

template <class S>
S fraction(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("fraction: zero denominator");
  if constexpr (is_exact_scalar_v<S>) {
    return S(BigInt(num), BigInt(den));
  } else {
    return static_cast<S>(num) / static_cast<S>(den);
  }
}

inline double scalar_abs(double x) { return std::fabs(x); }
inline Rational scalar_abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

inline double scalar_floor(double x) { return std::floor(x); }
inline Rational scalar_floor(const Rational& x) {
  BigInt num = numerator(x);
  BigInt den = denominator(x);
  BigInt q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) --q;
  return Rational(q);
}

// Exact conversion; every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  auto m = static_cast<long long>(std::ldexp(mant, 53));  // integral for IEEE doubles
  Rational r(m);
  int shift = exp - 53;
  BigInt p = BigInt(1) << static_cast<unsigned>(shift >= 0 ? shift : -shift);
  if (shift >= 0)
    r *= Rational(p);
  else
    r /= Rational(p);
  return r;
}

namespace detail {

inline BigInt pow10_big(unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  // strip whitespace
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty scalar literal");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("scalar literal with zero denominator: " + s);
    return Rational(num, den);
  }

  bool neg = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    neg = (s[pos] == '-');
    ++pos;
  }
  std::string digits;
  long long frac_digits = 0;
  long long exp10 = 0;
  bool seen_dot = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      exp10 = std::stoll(std::string(s.substr(pos + 1)));
      break;
    } else {
      throw std::invalid_argument("malformed scalar literal: " + s);
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed scalar literal: " + s);
  BigInt mant(digits);
  if (neg) mant = -mant;
  long long e = exp10 - frac_digits;
  Rational r(mant);
  if (e >= 0)
    r *= Rational(pow10_big(static_cast<unsigned>(e)));
  else
    r /= Rational(pow10_big(static_cast<unsigned>(-e)));
  return r;
}

}  // namespace detail

// Accepts "3", "-7", "1/2", "0.25", "2.5e-3".
template <class S>
S parse_scalar(std::string_view text) {
  Rational r = detail::parse_rational(text);
  if constexpr (is_exact_scalar_v<S>)
    return r;
  else
    return to_double(r);
}

inline std::string scalar_to_string(const Rational& x) {
  std::string s = numerator(x).str();
  if (denominator(x) != 1) s += "/" + denominator(x).str();
  return s;
}

inline std::string scalar_to_string(double x) {
  nlohmann::json j = x;  // shortest round-trip formatting
  return j.dump();
}

// JSON convention: doubles are JSON numbers, rationals are canonical "p/q"
// strings (plain "p" when the denominator is 1).
inline nlohmann::json scalar_to_json(double x) { return x; }
inline nlohmann::json scalar_to_json(const Rational& x) { return scalar_to_string(x); }

template <class S>
S scalar_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_scalar<S>(j.get<std::string>());
  if constexpr (is_exact_scalar_v<S>) {
    if (j.is_number_integer()) return S(j.get<long long>());
    if (j.is_number_float()) return rational_from_double(j.get<double>());
  } else {
    if (j.is_number()) return j.get<double>();
  }
  throw std::invalid_argument("expected scalar, got: " + j.dump());
}

template <class S>
const char* arithmetic_mode_name() {
  return is_exact_scalar_v<S> ? "rational" : "float";
}

}  // namespace morrey
