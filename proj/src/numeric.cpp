#include "clickstat/numeric.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace clickstat {

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = a, lo = b;
  if (lo > hi) std::swap(hi, lo);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> values) {
  double max = kNegInf;
  for (double v : values)
    if (v > max) max = v;
  if (max == kNegInf) return kNegInf;
  if (std::isinf(max)) return max;  // +inf dominates
  double sum = 0.0, carry = 0.0;
  for (double v : values) {
    double term = std::exp(v - max);
    double y = term - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return max + std::log(sum);
}

void StreamingLogSumExp::add(double log_term) {
  if (log_term == kNegInf) return;
  if (log_term > max_) {
    // rescale the accumulated sum to the new reference
    double scale = std::exp(max_ - log_term);
    sum_ = sum_ * scale + 1.0;
    carry_ *= scale;
    max_ = log_term;
    return;
  }
  double term = std::exp(log_term - max_);
  double y = term - carry_;
  double t = sum_ + y;
  carry_ = (t - sum_) - y;
  sum_ = t;
}

double StreamingLogSumExp::value() const {
  if (max_ == kNegInf) return kNegInf;
  return max_ + std::log(sum_);
}

namespace {

// lgamma via the re-entrant form: std::lgamma may touch the signgam
// global, and log_factorial gets called from parallel loops.
double lgamma_threadsafe(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

constexpr int kLogFactTableSize = 4096;

const std::vector<double>& log_fact_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactTableSize);
    for (int i = 0; i < kLogFactTableSize; ++i)
      t[i] = lgamma_threadsafe(static_cast<double>(i) + 1.0);
    return t;
  }();
  return table;
}

}  // namespace

double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  const auto& table = log_fact_table();
  if (n < kLogFactTableSize) return table[n];
  return lgamma_threadsafe(static_cast<double>(n) + 1.0);
}

double log_binomial(int n, int k) {
  if (n < 0) throw std::invalid_argument("log_binomial: negative n");
  if (k < 0 || k > n) return kNegInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_binom_pmf(int m, int n, double xi) {
  if (n < 0 || m < 0 || m > n)
    throw std::invalid_argument("log_binom_pmf: require 0 <= m <= n");
  if (!(xi >= 0.0 && xi <= 1.0))
    throw std::invalid_argument("log_binom_pmf: xi outside [0, 1]");
  if (xi == 0.0) return m == 0 ? 0.0 : kNegInf;
  if (xi == 1.0) return m == n ? 0.0 : kNegInf;
  return log_binomial(n, m) + m * std::log(xi) + (n - m) * std::log1p(-xi);
}

namespace {

// Lower-tail series: P(a,x) = x^a e^-x / Gamma(a+1) * sum x^k / ((a+1)...(a+k))
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - lgamma_threadsafe(a));
}

// Upper-tail continued fraction (modified Lentz).
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-17) break;
  }
  return h * std::exp(-x + a * std::log(x) - lgamma_threadsafe(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0))
    throw std::invalid_argument("gamma_q: require a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double chi_square_pvalue(double chi2, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof < 1");
  if (!(chi2 >= 0.0)) throw std::invalid_argument("chi_square_pvalue: chi2 < 0");
  return gamma_q(0.5 * dof, 0.5 * chi2);
}

}  // namespace clickstat
