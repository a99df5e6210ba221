#include "clickstat/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "clickstat/fockoptics.hpp"
#include "clickstat/numeric.hpp"

namespace clickstat {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

bool SplitMix64::bernoulli(double p) { return next_unit() < p; }

std::uint32_t SplitMix64::uniform_below(std::uint32_t bound) {
  // Lemire's multiply-shift rejection
  std::uint64_t x = next();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - static_cast<std::uint64_t>(bound)) % bound;
    while (low < threshold) {
      x = next();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 64);
}

SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial_index) {
  // separate the per-trial states by the same odd constant the
  // generator strides by internally
  return SplitMix64{seed + 0x9E3779B97F4A7C15ull * (trial_index + 1)};
}

void TrialConfig::validate() const {
  bank.validate();
  if (photons < 0) throw std::invalid_argument("simulate: photons < 0");
  if (trials < 1) throw std::invalid_argument("simulate: trials < 1");
}

double EmpiricalPmf::frequency(int clicks) const {
  return static_cast<double>(counts.at(static_cast<std::size_t>(clicks))) /
         static_cast<double>(trials);
}

double EmpiricalPmf::std_error(int clicks) const {
  double p = frequency(clicks);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

namespace {

// detector states within a window
constexpr std::uint8_t kIdle = 0;
constexpr std::uint8_t kFalseClicked = 1;
constexpr std::uint8_t kPhotonClicked = 2;

int run_window(const DetectorBank& bank, int photons, SplitMix64& rng,
               std::vector<std::uint8_t>& scratch) {
  const int d = bank.detectors;
  scratch.assign(static_cast<std::size_t>(d), kIdle);
  int clicked = 0;
  for (int i = 0; i < d; ++i)
    if (bank.epsilon > 0.0 && rng.bernoulli(bank.epsilon)) {
      scratch[static_cast<std::size_t>(i)] = kFalseClicked;
      ++clicked;
    }
  for (int photon = 0; photon < photons; ++photon) {
    auto target = rng.uniform_below(static_cast<std::uint32_t>(d));
    if (scratch[target] == kFalseClicked) continue;  // absorbed, no effect
    if (rng.bernoulli(bank.eta)) {
      if (scratch[target] == kIdle) ++clicked;
      scratch[target] = kPhotonClicked;
    }
  }
  return clicked;
}

}  // namespace

int simulate_window(const DetectorBank& bank, int photons, SplitMix64& rng) {
  bank.validate();
  if (photons < 0) throw std::invalid_argument("simulate: photons < 0");
  std::vector<std::uint8_t> scratch;
  return run_window(bank, photons, rng, scratch);
}

EmpiricalPmf estimate_pmf(const TrialConfig& config) {
  config.validate();
  const int d = config.bank.detectors;
  EmpiricalPmf pmf{std::vector<std::int64_t>(static_cast<std::size_t>(d) + 1, 0),
                   config.trials};
#ifdef _OPENMP
#pragma omp parallel
  {
    std::vector<std::int64_t> local(static_cast<std::size_t>(d) + 1, 0);
    std::vector<std::uint8_t> scratch;
#pragma omp for schedule(static)
    for (std::int64_t trial = 0; trial < config.trials; ++trial) {
      SplitMix64 rng = trial_stream(config.seed, static_cast<std::uint64_t>(trial));
      ++local[static_cast<std::size_t>(
          run_window(config.bank, config.photons, rng, scratch))];
    }
#pragma omp critical
    for (std::size_t c = 0; c < local.size(); ++c) pmf.counts[c] += local[c];
  }
#else
  std::vector<std::uint8_t> scratch;
  for (std::int64_t trial = 0; trial < config.trials; ++trial) {
    SplitMix64 rng = trial_stream(config.seed, static_cast<std::uint64_t>(trial));
    ++pmf.counts[static_cast<std::size_t>(
        run_window(config.bank, config.photons, rng, scratch))];
  }
#endif
  return pmf;
}

EmpiricalPmf estimate_pmf_serial(const TrialConfig& config) {
  config.validate();
  const int d = config.bank.detectors;
  EmpiricalPmf pmf{std::vector<std::int64_t>(static_cast<std::size_t>(d) + 1, 0),
                   config.trials};
  std::vector<std::uint8_t> scratch;
  for (std::int64_t trial = 0; trial < config.trials; ++trial) {
    SplitMix64 rng = trial_stream(config.seed, static_cast<std::uint64_t>(trial));
    ++pmf.counts[static_cast<std::size_t>(
        run_window(config.bank, config.photons, rng, scratch))];
  }
  return pmf;
}

double chi_square_gof(const EmpiricalPmf& empirical,
                      const std::vector<double>& analytic_probs,
                      double min_expected) {
  if (analytic_probs.size() != empirical.counts.size())
    throw std::invalid_argument("chi_square_gof: bin count mismatch");
  const double trials = static_cast<double>(empirical.trials);
  // pool small-expectation bins from the top down into a remainder bin
  double chi2 = 0.0;
  int used_bins = 0;
  double pooled_expected = 0.0;
  std::int64_t pooled_observed = 0;
  for (std::size_t c = 0; c < analytic_probs.size(); ++c) {
    double expected = analytic_probs[c] * trials;
    if (expected < min_expected) {
      pooled_expected += expected;
      pooled_observed += empirical.counts[c];
      continue;
    }
    double diff = static_cast<double>(empirical.counts[c]) - expected;
    chi2 += diff * diff / expected;
    ++used_bins;
  }
  if (pooled_expected >= min_expected) {
    double diff = static_cast<double>(pooled_observed) - pooled_expected;
    chi2 += diff * diff / pooled_expected;
    ++used_bins;
  }
  int dof = used_bins - 1;
  if (dof < 1) return 1.0;  // everything pooled; nothing to test
  return chi_square_pvalue(chi2, dof);
}

namespace {

// probabilities of each first-coupler output |n, 2p - n> of |p, p>
std::vector<double> splitter_weights(int photons_per_port) {
  TwoModeAmplitudes first = beamsplitter_fock(photons_per_port, photons_per_port, 0.5);
  std::vector<double> weights(first.amps.size());
  for (std::size_t k = 0; k < weights.size(); ++k)
    weights[k] = first.amps[k] * first.amps[k];
  return weights;
}

JointClicks run_noon_window(const DetectorBank& bank1, const DetectorBank& bank2,
                            const std::vector<double>& weights, int t_max,
                            double leak_transmissivity, SplitMix64& rng,
                            std::vector<std::uint8_t>& scratch) {
  double u = rng.next_unit();
  int n = t_max;  // fallback for accumulated rounding
  double cdf = 0.0;
  for (int k = 0; k <= t_max; ++k) {
    cdf += weights[static_cast<std::size_t>(k)];
    if (u < cdf) {
      n = k;
      break;
    }
  }

  int leak1 = 0, leak2 = 0;
  for (int i = 0; i < n; ++i)
    if (rng.bernoulli(leak_transmissivity)) ++leak1;
  for (int i = 0; i < t_max - n; ++i)
    if (rng.bernoulli(leak_transmissivity)) ++leak2;

  JointClicks clicks;
  clicks.clicks1 = run_window(bank1, leak1, rng, scratch);
  clicks.clicks2 = run_window(bank2, leak2, rng, scratch);
  return clicks;
}

}  // namespace

JointClicks simulate_noon_window(const DetectorBank& bank1, const DetectorBank& bank2,
                                 int photons_per_port, double leak_transmissivity,
                                 SplitMix64& rng) {
  bank1.validate();
  bank2.validate();
  if (photons_per_port < 0)
    throw std::invalid_argument("simulate: negative photons per port");
  if (!(leak_transmissivity >= 0.0 && leak_transmissivity <= 1.0))
    throw std::invalid_argument("simulate: leak outside [0, 1]");
  std::vector<std::uint8_t> scratch;
  return run_noon_window(bank1, bank2, splitter_weights(photons_per_port),
                         2 * photons_per_port, leak_transmissivity, rng, scratch);
}

double EmpiricalJointPmf::frequency(int clicks1, int clicks2) const {
  return static_cast<double>(counts.at(static_cast<std::size_t>(clicks1))
                                 .at(static_cast<std::size_t>(clicks2))) /
         static_cast<double>(trials);
}

double EmpiricalJointPmf::std_error(int clicks1, int clicks2) const {
  double p = frequency(clicks1, clicks2);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

EmpiricalJointPmf estimate_noon_joint(const DetectorBank& bank1,
                                      const DetectorBank& bank2, int photons_per_port,
                                      double leak_transmissivity, std::int64_t trials,
                                      std::uint64_t seed) {
  bank1.validate();
  bank2.validate();
  if (photons_per_port < 0)
    throw std::invalid_argument("simulate: negative photons per port");
  if (!(leak_transmissivity >= 0.0 && leak_transmissivity <= 1.0))
    throw std::invalid_argument("simulate: leak outside [0, 1]");
  if (trials < 1) throw std::invalid_argument("simulate: trials < 1");
  const std::size_t rows = static_cast<std::size_t>(bank1.detectors) + 1;
  const std::size_t cols = static_cast<std::size_t>(bank2.detectors) + 1;
  const std::vector<double> weights = splitter_weights(photons_per_port);
  const int t_max = 2 * photons_per_port;
  EmpiricalJointPmf pmf{std::vector<std::vector<std::int64_t>>(
                            rows, std::vector<std::int64_t>(cols, 0)),
                        trials};
#ifdef _OPENMP
#pragma omp parallel
  {
    std::vector<std::vector<std::int64_t>> local(rows,
                                                 std::vector<std::int64_t>(cols, 0));
    std::vector<std::uint8_t> scratch;
#pragma omp for schedule(static)
    for (std::int64_t trial = 0; trial < trials; ++trial) {
      SplitMix64 rng = trial_stream(seed, static_cast<std::uint64_t>(trial));
      JointClicks c = run_noon_window(bank1, bank2, weights, t_max,
                                      leak_transmissivity, rng, scratch);
      ++local[static_cast<std::size_t>(c.clicks1)][static_cast<std::size_t>(c.clicks2)];
    }
#pragma omp critical
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) pmf.counts[i][j] += local[i][j];
  }
#else
  std::vector<std::uint8_t> scratch;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng = trial_stream(seed, static_cast<std::uint64_t>(trial));
    JointClicks c = run_noon_window(bank1, bank2, weights, t_max, leak_transmissivity,
                                    rng, scratch);
    ++pmf.counts[static_cast<std::size_t>(c.clicks1)][static_cast<std::size_t>(c.clicks2)];
  }
#endif
  return pmf;
}

}  // namespace clickstat
