#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace clickstat {

using BigInt = mpz_class;
using Rational = mpq_class;

/// mpq_class does not canonicalize two-argument constructions on its own.
inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Exact binary value of a finite double (no decimal rounding).
inline Rational rational_from_double(double x) {
  if (!(x == x) || x - x != 0.0)
    throw std::invalid_argument("rational_from_double: non-finite value");
  return Rational(x);
}

inline BigInt bigint_pow(const BigInt& base, unsigned long exp) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline Rational rational_pow(const Rational& base, unsigned long exp) {
  Rational r;
  mpz_pow_ui(mpq_numref(r.get_mpq_t()), mpq_numref(base.get_mpq_t()), exp);
  mpz_pow_ui(mpq_denref(r.get_mpq_t()), mpq_denref(base.get_mpq_t()), exp);
  return r;  // power of a canonical rational is canonical
}

inline double to_double(const Rational& q) { return q.get_d(); }

inline bool is_probability(const Rational& q) { return q >= 0 && q <= 1; }

/// "num/den", or just "num" for integers; the CLI's exact serialization.
inline std::string rational_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace clickstat
