#pragma once

#include <string>
#include <vector>

#include "clickstat/bignum.hpp"

namespace clickstat {

inline constexpr double kDefaultTailTolerance = 1e-12;

enum class PriorKind { Poisson, Thermal, SqueezedGain, Custom };

/// Photon-number prior truncated at n_max; the analytic mass beyond
/// n_max is at most the tail tolerance the factory was given, and the
/// stored weights are renormalized over the window.
struct PhotonPrior {
  PriorKind kind = PriorKind::Custom;
  double mu = 0.0;    // mean photon number (SqueezedGain keeps sinh^2 g here)
  double gain = 0.0;  // SqueezedGain only
  int n_max = 0;
  std::vector<double> weights;
};

PhotonPrior make_poisson_prior(double mu, double tail_tol = kDefaultTailTolerance);
PhotonPrior make_thermal_prior(double mu, double tail_tol = kDefaultTailTolerance);

/// Squeezed source of gain g: photon statistics of the detected arm are
/// thermal with mean sinh(g)^2.
PhotonPrior make_squeezed_prior(double gain, double tail_tol = kDefaultTailTolerance);

PhotonPrior make_custom_prior(std::vector<double> weights);

/// Analytic (untruncated) mass at n.  Rejects n > n_max, which would
/// silently mix truncated and untruncated quantities.  Custom priors
/// have no analytic form and return the renormalized weight.
double prior_pmf(const PhotonPrior& prior, int n);

/// Smallest n_max whose analytic tail mass is <= tail_tol.
int truncation_bound(PriorKind kind, double mu, double tail_tol);

/// Grammar: "poisson:mu=<float>", "thermal:mu=<float>",
/// "squeezed:g=<float>", "custom:<w0,w1,...>".
PhotonPrior parse_prior_spec(const std::string& spec,
                             double tail_tol = kDefaultTailTolerance);

/// Exact window-renormalized priors for the rational backend.
struct ExactPrior {
  int n_max = 0;
  std::vector<Rational> weights;
};

/// Poisson weights in ratio form mu^n / n!; the e^-mu factor cancels in
/// the renormalization, so everything stays rational.
ExactPrior exact_poisson_prior(const Rational& mu, int n_max);
ExactPrior exact_thermal_prior(const Rational& mu, int n_max);
ExactPrior exact_custom_prior(std::vector<Rational> weights);

}  // namespace clickstat
