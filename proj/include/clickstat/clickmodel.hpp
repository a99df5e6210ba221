#pragma once

#include <vector>

#include "clickstat/bignum.hpp"

namespace clickstat {

/// A bank of D identical on/off detectors fed through a balanced
/// 1-to-D splitter.  eta is the per-photon detection efficiency,
/// epsilon the per-detector false-click probability per window.
struct DetectorBank {
  int detectors = 1;
  double eta = 1.0;
  double epsilon = 0.0;

  void validate() const;
};

/// Same bank with exact rational parameters.
struct ExactBank {
  int detectors = 1;
  Rational eta = 1;
  Rational epsilon = 0;

  void validate() const;
};

/// Click-count distribution for a fixed photon number: probs[c] is the
/// probability of seeing exactly c clicked detectors, c = 0..detectors.
struct ClickPmf {
  int detectors = 0;
  int photons = 0;
  std::vector<double> probs;
};

struct ExactClickPmf {
  int detectors = 0;
  int photons = 0;
  std::vector<Rational> probs;
};

/// Ideal bank (eta = 1, epsilon = 0): the count of occupied cells when
/// photons land uniformly on detectors, C(D,c) c! S(n,c) / D^n.
ExactClickPmf pmf_ideal_exact(int detectors, int photons);
ClickPmf pmf_ideal(int detectors, int photons);

/// Lossy bank (epsilon = 0): each photon first survives with
/// probability eta, then the ideal bank counts the survivors.
ExactClickPmf pmf_lossy_exact(int detectors, int photons, const Rational& eta);
ClickPmf pmf_lossy(int detectors, int photons, double eta);

/// Full model with false clicks.  A detector that false-clicks absorbs
/// the photons routed to it without changing its state, so i false
/// clicks leave an ideal sub-bank of D - i detectors for the rest.
ExactClickPmf pmf_noisy_exact(const ExactBank& bank, int photons);
ClickPmf pmf_noisy(const DetectorBank& bank, int photons);

/// Probability that every detector clicks when n photons hit a lossy
/// bank; approaches eta^n as the bank grows.
Rational all_detect_probability_exact(int detectors, const Rational& eta, int photons);
double all_detect_probability(int detectors, double eta, int photons);

/// False-click probability of one detector for a Poisson dark-count
/// process: rate_hz * window_s is the mean count in the gate.
double epsilon_from_rate(double rate_hz, double window_s);

}  // namespace clickstat
