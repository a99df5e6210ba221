#pragma once

#include <vector>

#include "clickstat/bignum.hpp"

namespace clickstat {

/// Stirling numbers of the second kind, S(n, k): ways to partition n
/// labelled items into k nonempty unlabelled blocks.  Built once by the
/// recurrence S(n, k) = k S(n-1, k) + S(n-1, k-1); S(0, 0) = 1 so the
/// zero-photon window still normalizes.
class StirlingTable {
 public:
  StirlingTable(int max_n, int max_k);

  const BigInt& at(int n, int k) const;
  int max_n() const { return max_n_; }
  int max_k() const { return max_k_; }

 private:
  int max_n_;
  int max_k_;
  std::vector<BigInt> entries_;  // row-major, (max_n+1) x (max_k+1)
  BigInt zero_;
};

/// Same triangle in the log domain for the floating backend.  The
/// recurrence only adds positive terms, so there is no cancellation.
class LogStirlingTable {
 public:
  LogStirlingTable(int max_n, int max_k);

  double log_at(int n, int k) const;  // -inf where S(n, k) = 0
  int max_n() const { return max_n_; }
  int max_k() const { return max_k_; }

 private:
  int max_n_;
  int max_k_;
  std::vector<double> entries_;
};

BigInt stirling2(int n, int k);
BigInt binomial(int n, int k);  // 0 outside 0 <= k <= n
BigInt factorial(int n);

/// x (x-1) ... (x-k+1); counts injections, so falling_factorial(3, 4) = 0.
BigInt falling_factorial(long x, int k);

/// Exact binomial pmf C(n,m) xi^m (1-xi)^(n-m) with the same edge
/// conventions as the log version: xi = 0 or 1 degenerates to a delta.
Rational binom_pmf(int m, int n, const Rational& xi);

}  // namespace clickstat
