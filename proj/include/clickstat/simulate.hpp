#pragma once

#include <cstdint>
#include <vector>

#include "clickstat/clickmodel.hpp"

namespace clickstat {

/// Counter-addressable generator: every trial gets its own stream
/// derived from (seed, trial index), so any partition of trials across
/// threads reproduces the serial result bit for bit.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next();
  double next_unit();  // [0, 1), 53 random bits
  bool bernoulli(double p);
  std::uint32_t uniform_below(std::uint32_t bound);  // unbiased
};

SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial_index);

struct TrialConfig {
  DetectorBank bank;
  int photons = 0;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EmpiricalPmf {
  std::vector<std::int64_t> counts;  // by click count, 0..detectors
  std::int64_t trials = 0;

  double frequency(int clicks) const;
  double std_error(int clicks) const;  // sqrt(p(1-p)/trials)
};

/// One measurement window: detectors false-click with probability
/// epsilon, each photon picks a uniform detector, survives with
/// probability eta unless the detector false-clicked (which absorbs
/// it), and marks its detector.  Returns the number of clicked
/// detectors.
int simulate_window(const DetectorBank& bank, int photons, SplitMix64& rng);

EmpiricalPmf estimate_pmf(const TrialConfig& config);         // OpenMP
EmpiricalPmf estimate_pmf_serial(const TrialConfig& config);  // reference

/// Chi-square goodness of fit of an empirical pmf against analytic
/// probabilities; bins with expected count below min_expected are
/// pooled.  Returns the upper-tail p-value.
double chi_square_gof(const EmpiricalPmf& empirical,
                      const std::vector<double>& analytic_probs,
                      double min_expected = 5.0);

/// One window of the two-arm leak experiment: draws the first-coupler
/// output from |p, p>, leaks each arm binomially, then measures each
/// leak with its bank.
struct JointClicks {
  int clicks1 = 0;
  int clicks2 = 0;
};
JointClicks simulate_noon_window(const DetectorBank& bank1, const DetectorBank& bank2,
                                 int photons_per_port, double leak_transmissivity,
                                 SplitMix64& rng);

struct EmpiricalJointPmf {
  std::vector<std::vector<std::int64_t>> counts;
  std::int64_t trials = 0;

  double frequency(int clicks1, int clicks2) const;
  double std_error(int clicks1, int clicks2) const;
};

EmpiricalJointPmf estimate_noon_joint(const DetectorBank& bank1,
                                      const DetectorBank& bank2, int photons_per_port,
                                      double leak_transmissivity, std::int64_t trials,
                                      std::uint64_t seed);

}  // namespace clickstat
