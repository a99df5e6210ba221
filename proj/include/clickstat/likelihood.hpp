#pragma once

#include <memory>
#include <span>
#include <vector>

#include "clickstat/clickmodel.hpp"
#include "clickstat/combinatorics.hpp"

namespace clickstat {

/// log P(clicks | photons = n) for one fixed observation, evaluated
/// over a range of n.  Routing loss and detector efficiency compose
/// into a single thinning, which leaves two interchangeable routes:
///
///   small n: sum over surviving photon counts with a partition-count
///            table (exact structure, log domain);
///   large n: inclusion-exclusion over which detectors stay silent,
///            O(clicks^2) per n with no table and no n-dependent state.
///
/// The crossover is chosen so the alternating large-n sum is past its
/// cancellation zone; a long-double compensated sum plus a floor guard
/// covers the rest.  Entries depend only on n, so parallel and serial
/// fills produce identical bytes.
class LikelihoodEvaluator {
 public:
  /// n_hint, when nonnegative, bounds the table size to the range the
  /// caller will actually query; it never changes results.
  LikelihoodEvaluator(const DetectorBank& bank, int clicks, int n_hint = -1);

  double log_prob(int photons) const;

  void fill(int n_begin, std::span<double> out) const;        // OpenMP
  void fill_serial(int n_begin, std::span<double> out) const; // reference

  /// log P(clicks | n) <= envelope_log_k() + n * envelope_log_base();
  /// lets evidence sums bound their unseen tail.
  double envelope_log_k() const { return env_log_k_; }
  double envelope_log_base() const { return env_log_base_; }

  int table_limit() const { return table_limit_; }
  int clicks() const { return clicks_; }
  const DetectorBank& bank() const { return bank_; }

 private:
  double log_prob_table(int photons) const;
  double log_prob_closed(int photons) const;

  DetectorBank bank_;
  int clicks_ = 0;
  int table_limit_ = 0;
  std::unique_ptr<LogStirlingTable> stirling_;
  std::vector<double> log_eps_;    // log p_eps(i | D), i = 0..clicks
  std::vector<double> survival_;   // eta (D - i) / D, by false-click count i
  std::vector<long double> base_;  // b_j = 1 - (D - clicks + j) eta / D
  std::vector<long double> log_base_;
  std::vector<long double> pascal_;  // C(c, j) for c, j <= clicks
  double env_log_k_ = 0.0;
  double env_log_base_ = 0.0;
};

std::vector<double> log_likelihood_column(const DetectorBank& bank, int clicks,
                                          int n_max);
std::vector<double> log_likelihood_column_serial(const DetectorBank& bank, int clicks,
                                                 int n_max);

}  // namespace clickstat
