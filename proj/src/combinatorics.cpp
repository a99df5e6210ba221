#include "clickstat/combinatorics.hpp"

#include <cmath>
#include <stdexcept>

#include "clickstat/numeric.hpp"

namespace clickstat {

StirlingTable::StirlingTable(int max_n, int max_k) : max_n_(max_n), max_k_(max_k) {
  if (max_n < 0 || max_k < 0)
    throw std::invalid_argument("StirlingTable: negative bounds");
  entries_.assign(static_cast<size_t>(max_n + 1) * (max_k + 1), BigInt(0));
  auto cell = [&](int n, int k) -> BigInt& {
    return entries_[static_cast<size_t>(n) * (max_k_ + 1) + k];
  };
  cell(0, 0) = 1;
  for (int n = 1; n <= max_n; ++n)
    for (int k = 1; k <= max_k && k <= n; ++k)
      cell(n, k) = k * cell(n - 1, k) + cell(n - 1, k - 1);
}

const BigInt& StirlingTable::at(int n, int k) const {
  if (n < 0 || k < 0) throw std::invalid_argument("StirlingTable::at: negative index");
  if (n > max_n_ || k > max_k_)
    throw std::out_of_range("StirlingTable::at: index beyond table");
  if (k > n) return zero_;
  return entries_[static_cast<size_t>(n) * (max_k_ + 1) + k];
}

LogStirlingTable::LogStirlingTable(int max_n, int max_k)
    : max_n_(max_n), max_k_(max_k) {
  if (max_n < 0 || max_k < 0)
    throw std::invalid_argument("LogStirlingTable: negative bounds");
  entries_.assign(static_cast<size_t>(max_n + 1) * (max_k + 1), kNegInf);
  auto cell = [&](int n, int k) -> double& {
    return entries_[static_cast<size_t>(n) * (max_k_ + 1) + k];
  };
  cell(0, 0) = 0.0;
  for (int n = 1; n <= max_n; ++n)
    for (int k = 1; k <= max_k && k <= n; ++k) {
      double log_k = std::log(static_cast<double>(k));
      cell(n, k) = log_add_exp(log_k + cell(n - 1, k), cell(n - 1, k - 1));
    }
}

double LogStirlingTable::log_at(int n, int k) const {
  if (n < 0 || k < 0)
    throw std::invalid_argument("LogStirlingTable::log_at: negative index");
  if (n > max_n_ || k > max_k_)
    throw std::out_of_range("LogStirlingTable::log_at: index beyond table");
  if (k > n) return kNegInf;
  return entries_[static_cast<size_t>(n) * (max_k_ + 1) + k];
}

BigInt stirling2(int n, int k) {
  if (n < 0 || k < 0) throw std::invalid_argument("stirling2: negative argument");
  if (k > n) return 0;
  StirlingTable table(n, k);
  return table.at(n, k);
}

BigInt binomial(int n, int k) {
  if (n < 0) throw std::invalid_argument("binomial: negative n");
  if (k < 0 || k > n) return 0;
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

BigInt factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

BigInt falling_factorial(long x, int k) {
  if (k < 0) throw std::invalid_argument("falling_factorial: negative k");
  if (x < 0) throw std::invalid_argument("falling_factorial: negative x");
  BigInt r = 1;
  for (int i = 0; i < k; ++i) r *= BigInt(x - i);
  return r;
}

Rational binom_pmf(int m, int n, const Rational& xi) {
  if (n < 0 || m < 0 || m > n)
    throw std::invalid_argument("binom_pmf: require 0 <= m <= n");
  if (!is_probability(xi)) throw std::invalid_argument("binom_pmf: xi outside [0, 1]");
  if (xi == 0) return m == 0 ? Rational(1) : Rational(0);
  if (xi == 1) return m == n ? Rational(1) : Rational(0);
  Rational r(binomial(n, m));
  r *= rational_pow(xi, static_cast<unsigned long>(m));
  Rational one_minus = Rational(1) - xi;
  r *= rational_pow(one_minus, static_cast<unsigned long>(n - m));
  return r;
}

}  // namespace clickstat
