#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "clickstat/clickmodel.hpp"
#include "clickstat/numeric.hpp"
#include "clickstat/priors.hpp"

namespace clickstat {

/// No photon number with prior support can produce the observed
/// clicks; raised instead of returning NaN or a made-up posterior.
class ImpossibleObservation : public std::runtime_error {
 public:
  explicit ImpossibleObservation(const std::string& what)
      : std::runtime_error(what) {}
};

/// Posterior over photon number for one observed click count.
struct Posterior {
  int clicks = 0;
  DetectorBank bank;
  std::vector<double> probs;      // N = 0 .. prior n_max
  double log_evidence = kNegInf;  // log P(clicks) under the truncated prior
};

struct ExactPosterior {
  int clicks = 0;
  ExactBank bank;
  std::vector<Rational> probs;
  Rational evidence = 0;
};

struct PosteriorSummary {
  int mode = 0;  // argmax N, ties broken toward smaller N
  double mean = 0.0;
  double mass_at_mode = 0.0;
};

/// Bayes inversion of the click model.  Likelihood columns come from
/// the shared evaluator; the evidence sum walks the prior in fixed
/// blocks and stops once an analytic envelope bounds the unseen tail
/// below 1e-16 of the evidence, so huge windows stay cheap and the
/// result is identical for any thread count.
Posterior retrodict(const DetectorBank& bank, const PhotonPrior& prior, int clicks);

ExactPosterior retrodict_exact(const ExactBank& bank, const ExactPrior& prior,
                               int clicks);

PosteriorSummary posterior_summary(const Posterior& posterior);

/// Ideal-bank closed form under a Poisson prior of mean mu, with
/// gamma = detectors / mu:
///   P(N | C) = C! S(N,C) / (N! gamma^N (e^(1/gamma) - 1)^C).
double retrodict_poisson_ideal(int detectors, double mu, int clicks, int n);

/// Ideal-bank closed form under a thermal prior of mean mu.  With
/// x = 1 / (detectors + gamma):
///   P(N | C) = S(N,C) x^(N-C) (1-x)(1-2x)...(1-Cx),
/// which sums to 1 over N.
double retrodict_thermal_ideal(int detectors, double mu, int clicks, int n);
Rational retrodict_thermal_ideal_exact(int detectors, const Rational& mu, int clicks,
                                       int n);

}  // namespace clickstat
