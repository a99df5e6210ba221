#include "clickstat/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clickstat/numeric.hpp"

namespace clickstat {

namespace {

constexpr int kBaseTableLimit = 4096;
constexpr std::size_t kTableEntryCap = 1u << 22;  // doubles, ~32 MB

// Table size that keeps the inclusion-exclusion route out of its
// cancellation zone: past n ~ (D/eta) log(2C+2) successive alternating
// terms shrink by at least a factor of two.
int adaptive_table_limit(const DetectorBank& bank, int clicks) {
  if (bank.eta == 0.0) return 64;
  double guard = (bank.detectors / bank.eta) * std::log(2.0 * clicks + 2.0);
  double limit = std::max<double>(kBaseTableLimit, std::ceil(guard));
  limit = std::min(limit, static_cast<double>(1 << 20));
  std::size_t row = static_cast<std::size_t>(clicks) + 1;
  std::size_t max_rows = kTableEntryCap / row;
  limit = std::min(limit, static_cast<double>(max_rows > 0 ? max_rows - 1 : 0));
  return std::max(64, static_cast<int>(limit));
}

}  // namespace

LikelihoodEvaluator::LikelihoodEvaluator(const DetectorBank& bank, int clicks,
                                         int n_hint)
    : bank_(bank), clicks_(clicks) {
  bank_.validate();
  if (clicks < 0 || clicks > bank.detectors)
    throw std::invalid_argument("likelihood: clicks outside 0..detectors");

  const int d = bank.detectors;
  table_limit_ = adaptive_table_limit(bank, clicks);
  if (n_hint >= 0) table_limit_ = std::min(table_limit_, n_hint);
  stirling_ = std::make_unique<LogStirlingTable>(table_limit_,
                                                 std::min(clicks, table_limit_));

  log_eps_.resize(clicks + 1);
  survival_.resize(clicks + 1);
  for (int i = 0; i <= clicks; ++i) {
    log_eps_[i] = log_binom_pmf(i, d, bank.epsilon);
    survival_[i] = bank.eta * (static_cast<double>(d - i) / d);
  }

  base_.resize(clicks + 1);
  log_base_.resize(clicks + 1);
  for (int j = 0; j <= clicks; ++j) {
    long double b = 1.0L - static_cast<long double>(d - clicks + j) *
                               static_cast<long double>(bank.eta) / d;
    if (b < 0.0L) b = 0.0L;  // rounding guard; mathematically b >= 0
    base_[j] = b;
    log_base_[j] = b > 0.0L ? std::log(b) : 0.0L;
  }

  pascal_.assign(static_cast<std::size_t>(clicks + 1) * (clicks + 1), 0.0L);
  for (int c = 0; c <= clicks; ++c) {
    pascal_[static_cast<std::size_t>(c) * (clicks + 1)] = 1.0L;
    for (int j = 1; j <= c; ++j)
      pascal_[static_cast<std::size_t>(c) * (clicks + 1) + j] =
          pascal_[static_cast<std::size_t>(c - 1) * (clicks + 1) + j - 1] +
          (j <= c - 1 ? pascal_[static_cast<std::size_t>(c - 1) * (clicks + 1) + j]
                      : 0.0L);
  }

  std::vector<double> k_terms;
  for (int i = 0; i <= clicks; ++i) {
    if (log_eps_[i] == kNegInf) continue;
    k_terms.push_back(log_eps_[i] + log_binomial(d - i, clicks - i) +
                      (clicks - i) * std::log(2.0));
  }
  env_log_k_ = log_sum_exp(k_terms);
  env_log_base_ = base_[0] > 0.0L ? static_cast<double>(log_base_[0]) : kNegInf;
}

double LikelihoodEvaluator::log_prob_table(int photons) const {
  const int d = bank_.detectors;
  std::vector<double> outer;
  outer.reserve(clicks_ + 1);
  std::vector<double> inner;
  for (int i = 0; i <= clicks_; ++i) {
    if (log_eps_[i] == kNegInf) continue;
    const int sub_d = d - i, sub_c = clicks_ - i;
    if (sub_c > photons || sub_c > sub_d) continue;
    const double s = survival_[i];
    if (s == 0.0) {
      if (sub_c == 0) outer.push_back(log_eps_[i]);
      continue;
    }
    // the surviving-count binomial concentrates near s * photons; the
    // window discards only terms below ~1e-30 relative
    int k_lo = sub_c, k_hi = photons;
    if (photons > 256) {
      double mean = s * photons;
      double width = 12.0 * std::sqrt(photons * s * (1.0 - s)) + 16.0;
      k_lo = std::max(k_lo, static_cast<int>(std::floor(mean - width)));
      k_hi = std::min(k_hi, static_cast<int>(std::ceil(mean + width)));
    }
    inner.clear();
    for (int k = k_lo; k <= k_hi; ++k) {
      if (sub_d == 0) {
        if (sub_c == 0 && k == 0) inner.push_back(log_binom_pmf(k, photons, s));
        continue;
      }
      double ideal = log_binomial(sub_d, sub_c) + log_factorial(sub_c) +
                     stirling_->log_at(k, sub_c) -
                     k * std::log(static_cast<double>(sub_d));
      if (ideal == kNegInf) continue;
      inner.push_back(log_binom_pmf(k, photons, s) + ideal);
    }
    double m = log_sum_exp(inner);
    if (m != kNegInf) outer.push_back(log_eps_[i] + m);
  }
  return log_sum_exp(outer);
}

double LikelihoodEvaluator::log_prob_closed(int photons) const {
  const int d = bank_.detectors;
  std::vector<double> outer;
  outer.reserve(clicks_ + 1);
  for (int i = 0; i <= clicks_; ++i) {
    if (log_eps_[i] == kNegInf) continue;
    const int sub_d = d - i, sub_c = clicks_ - i;
    if (sub_c > photons || sub_c > sub_d) continue;
    if (survival_[i] == 0.0) {
      if (sub_c == 0) outer.push_back(log_eps_[i]);
      continue;
    }
    long double sum = 0.0L, carry = 0.0L, max_mag = 0.0L;
    for (int j = 0; j <= sub_c; ++j) {
      long double pow_term;
      if (base_[j] > 0.0L)
        pow_term = std::exp(static_cast<long double>(photons) * log_base_[j]);
      else
        pow_term = photons == 0 ? 1.0L : 0.0L;
      long double t = pascal_[static_cast<std::size_t>(sub_c) * (clicks_ + 1) + j] *
                      pow_term;
      if (t > max_mag) max_mag = t;
      if (j & 1) t = -t;
      long double y = t - carry;
      long double u = sum + y;
      carry = (u - sum) - y;
      sum = u;
    }
    // a result this deep in the cancellation noise is numerically zero
    if (!(sum > max_mag * 1e-11L)) continue;
    outer.push_back(log_eps_[i] + log_binomial(sub_d, sub_c) +
                    static_cast<double>(std::log(sum)));
  }
  return log_sum_exp(outer);
}

double LikelihoodEvaluator::log_prob(int photons) const {
  if (photons < 0) throw std::invalid_argument("likelihood: photons < 0");
  if (photons <= table_limit_) return log_prob_table(photons);
  return log_prob_closed(photons);
}

void LikelihoodEvaluator::fill(int n_begin, std::span<double> out) const {
  const std::int64_t count = static_cast<std::int64_t>(out.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t t = 0; t < count; ++t)
    out[static_cast<std::size_t>(t)] = log_prob(n_begin + static_cast<int>(t));
}

void LikelihoodEvaluator::fill_serial(int n_begin, std::span<double> out) const {
  for (std::size_t t = 0; t < out.size(); ++t)
    out[t] = log_prob(n_begin + static_cast<int>(t));
}

std::vector<double> log_likelihood_column(const DetectorBank& bank, int clicks,
                                          int n_max) {
  if (n_max < 0) throw std::invalid_argument("likelihood column: n_max < 0");
  LikelihoodEvaluator eval(bank, clicks, n_max);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  eval.fill(0, out);
  return out;
}

std::vector<double> log_likelihood_column_serial(const DetectorBank& bank, int clicks,
                                                 int n_max) {
  if (n_max < 0) throw std::invalid_argument("likelihood column: n_max < 0");
  LikelihoodEvaluator eval(bank, clicks, n_max);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  eval.fill_serial(0, out);
  return out;
}

}  // namespace clickstat
