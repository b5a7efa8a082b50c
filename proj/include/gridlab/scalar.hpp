#pragma once

// Dual arithmetic backbone. Everything downstream is templated on a scalar
// ring R which is either Rational (exact, for certificates and inequality
// audits) or double (fast, for exploratory runs). Quantities of the form
// base^(1/root) are carried as Powered values so that exact mode never
// needs an irrational number: audits compare root-th powers instead.

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "gridlab/errors.hpp"

namespace gridlab {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

template <class R>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

inline constexpr double kDefaultTol = 1e-9;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

template <class R>
R make_ratio(long long num, long long den) {
  if constexpr (is_exact_v<R>) {
    return Rational(BigInt(num), BigInt(den));
  } else {
    return static_cast<double>(num) / static_cast<double>(den);
  }
}

// 2^e for integer e of either sign.
template <class R>
R pow2(long e) {
  if constexpr (is_exact_v<R>) {
    BigInt one = 1;
    if (e >= 0) return Rational(one << e, one);
    return Rational(one, one << (-e));
  } else {
    return std::ldexp(1.0, static_cast<int>(e));
  }
}

// b^e, integer e >= 0.
inline Rational pow_nonneg(const Rational& b, long e) {
  if (e < 0) throw DomainError("pow_nonneg: negative exponent");
  if (e == 0) return Rational(1);
  BigInt n = boost::multiprecision::pow(numerator(b), static_cast<unsigned>(e));
  BigInt d = boost::multiprecision::pow(denominator(b), static_cast<unsigned>(e));
  return Rational(n, d);
}

inline double pow_nonneg(double b, long e) {
  if (e < 0) throw DomainError("pow_nonneg: negative exponent");
  return std::pow(b, static_cast<double>(e));
}

template <class R>
R abs_val(const R& x) {
  if constexpr (is_exact_v<R>) {
    return x < 0 ? R(-x) : x;
  } else {
    return std::fabs(x);
  }
}

inline double log2_big(const BigInt& n) {
  // n > 0. Take the top 52 bits and adjust by the shifted-out exponent.
  unsigned bits = boost::multiprecision::msb(n);
  if (bits <= 52) return std::log2(n.template convert_to<double>());
  BigInt top = n >> (bits - 52);
  return static_cast<double>(bits - 52) + std::log2(top.template convert_to<double>());
}

inline double log2_approx(const Rational& q) {
  if (q <= 0) throw DomainError("log2_approx: nonpositive value");
  return log2_big(numerator(q)) - log2_big(denominator(q));
}

inline double log2_approx(double x) {
  if (x <= 0) throw DomainError("log2_approx: nonpositive value");
  return std::log2(x);
}

// A nonnegative value stored as base^(1/root). In exact mode base is the
// root-th power of the value; in float mode callers usually set root = 1.
template <class R>
struct Powered {
  R base{};
  long root = 1;

  double approx() const {
    if (root == 1) return to_double(base);
    if (base == R(0)) return 0.0;
    return std::exp2(log2_approx(base) / static_cast<double>(root));
  }
};

// a >= b, with tolerance slack in float mode only.
template <class R>
bool geq(const R& a, const R& b, double tol = kDefaultTol) {
  if constexpr (is_exact_v<R>) {
    (void)tol;
    return a >= b;
  } else {
    return a >= b - tol;
  }
}

template <class R>
bool leq(const R& a, const R& b, double tol = kDefaultTol) {
  return geq(b, a, tol);
}

// Smallest integer m with m >= x.
template <class R>
long long ceil_to_ll(const R& x) {
  if constexpr (is_exact_v<R>) {
    BigInt q = numerator(x) / denominator(x);
    if (q * denominator(x) < numerator(x)) q += 1;
    return q.template convert_to<long long>();
  } else {
    return static_cast<long long>(std::ceil(x - 1e-12));
  }
}

template <class R>
R parse_scalar(const std::string& tok) {
  try {
    auto slash = tok.find('/');
    if constexpr (is_exact_v<R>) {
      if (slash != std::string::npos) {
        return Rational(BigInt(tok.substr(0, slash)), BigInt(tok.substr(slash + 1)));
      }
      auto dot = tok.find('.');
      if (dot == std::string::npos) return Rational(BigInt(tok));
      // decimal literal -> exact rational
      std::string digits = tok.substr(0, dot) + tok.substr(dot + 1);
      long scale = static_cast<long>(tok.size() - dot - 1);
      BigInt den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale));
      return Rational(BigInt(digits), den);
    } else {
      if (slash != std::string::npos) {
        return std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1));
      }
      return std::stod(tok);
    }
  } catch (const Error&) {
    throw;
  } catch (...) {
    throw DomainError("bad scalar literal: '" + tok + "'");
  }
}

inline std::string format_scalar(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline std::string format_scalar(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace gridlab
