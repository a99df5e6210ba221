#include "clickstat/fockoptics.hpp"

#include <cmath>
#include <stdexcept>

#include "clickstat/combinatorics.hpp"
#include "clickstat/numeric.hpp"
#include "clickstat/retrodict.hpp"

namespace clickstat {

double SignedSqrt::value() const {
  return sign * std::sqrt(to_double(square));
}

TwoModeAmplitudes beamsplitter_fock(int m, int n, double transmission) {
  if (m < 0 || n < 0) throw std::invalid_argument("beamsplitter: negative photon count");
  if (!(transmission >= 0.0 && transmission <= 1.0))
    throw std::invalid_argument("beamsplitter: transmission outside [0, 1]");
  const int total = m + n;
  const double t = std::sqrt(transmission);
  const double r = std::sqrt(1.0 - transmission);
  TwoModeAmplitudes out{total, std::vector<double>(total + 1, 0.0)};
  for (int p = 0; p <= m; ++p)
    for (int q = 0; q <= n; ++q) {
      int u = p + n - q;
      double coeff = to_double(Rational(binomial(m, p) * binomial(n, q))) *
                     std::pow(t, p + q) * std::pow(r, m + n - p - q);
      if ((n - q) & 1) coeff = -coeff;
      out.amps[u] += coeff;
    }
  for (int u = 0; u <= total; ++u)
    out.amps[u] *= std::exp(0.5 * (log_factorial(u) + log_factorial(total - u) -
                                   log_factorial(m) - log_factorial(n)));
  return out;
}

ExactTwoModeAmplitudes beamsplitter_fock_exact(int m, int n,
                                               const Rational& transmission) {
  if (m < 0 || n < 0) throw std::invalid_argument("beamsplitter: negative photon count");
  if (!is_probability(transmission))
    throw std::invalid_argument("beamsplitter: transmission outside [0, 1]");
  const int total = m + n;
  const Rational big_t = transmission;
  const Rational big_r = Rational(1) - transmission;

  // terms landing on output u share the parity of their t and r powers,
  // so each bucket is (rational) * t^0or1 * r^0or1 and the squared
  // amplitude is rational
  std::vector<Rational> coeff(total + 1, Rational(0));
  for (int p = 0; p <= m; ++p)
    for (int q = 0; q <= n; ++q) {
      int u = p + n - q;
      int t_pow = p + q, r_pow = m + n - p - q;
      Rational term(binomial(m, p) * binomial(n, q));
      term *= rational_pow(big_t, static_cast<unsigned long>(t_pow / 2));
      term *= rational_pow(big_r, static_cast<unsigned long>(r_pow / 2));
      if ((n - q) & 1) term = -term;
      coeff[u] += term;
    }

  ExactTwoModeAmplitudes out{total, std::vector<SignedSqrt>(total + 1)};
  for (int u = 0; u <= total; ++u) {
    SignedSqrt& amp = out.amps[u];
    int cmp = sgn(coeff[u]);
    amp.sign = cmp;
    if (cmp == 0) continue;
    Rational sq = coeff[u] * coeff[u];
    if ((u + n) & 1) sq *= big_t;  // leftover odd power of t
    if ((m + u) & 1) sq *= big_r;
    sq *= make_rational(factorial(u) * factorial(total - u), factorial(m) * factorial(n));
    amp.square = sq;
  }
  return out;
}

JointPrior noon_joint_prior(int photons_per_port, double leak_transmissivity) {
  if (photons_per_port < 0)
    throw std::invalid_argument("noon prior: negative photons per port");
  if (!(leak_transmissivity >= 0.0 && leak_transmissivity <= 1.0))
    throw std::invalid_argument("noon prior: leak outside [0, 1]");
  const int p = photons_per_port, t_max = 2 * p;
  TwoModeAmplitudes first = beamsplitter_fock(p, p, 0.5);
  JointPrior prior{t_max, std::vector<std::vector<double>>(
                              t_max + 1, std::vector<double>(t_max + 1, 0.0))};
  for (int n = 0; n <= t_max; ++n) {
    double weight = first.amps[n] * first.amps[n];
    if (weight == 0.0) continue;
    for (int n1 = 0; n1 <= n; ++n1) {
      double leak1 = std::exp(log_binom_pmf(n1, n, leak_transmissivity));
      for (int n2 = 0; n2 <= t_max - n; ++n2)
        prior.probs[n1][n2] +=
            weight * leak1 *
            std::exp(log_binom_pmf(n2, t_max - n, leak_transmissivity));
    }
  }
  return prior;
}

ExactJointPrior noon_joint_prior_exact(int photons_per_port,
                                       const Rational& leak_transmissivity) {
  if (photons_per_port < 0)
    throw std::invalid_argument("noon prior: negative photons per port");
  if (!is_probability(leak_transmissivity))
    throw std::invalid_argument("noon prior: leak outside [0, 1]");
  const int p = photons_per_port, t_max = 2 * p;
  ExactTwoModeAmplitudes first = beamsplitter_fock_exact(p, p, make_rational(1, 2));
  ExactJointPrior prior{t_max, std::vector<std::vector<Rational>>(
                                   t_max + 1, std::vector<Rational>(t_max + 1, 0))};
  for (int n = 0; n <= t_max; ++n) {
    if (first.amps[n].sign == 0) continue;
    const Rational& weight = first.amps[n].square;
    for (int n1 = 0; n1 <= n; ++n1) {
      Rational leak1 = binom_pmf(n1, n, leak_transmissivity);
      if (leak1 == 0) continue;
      for (int n2 = 0; n2 <= t_max - n; ++n2) {
        Rational leak2 = binom_pmf(n2, t_max - n, leak_transmissivity);
        if (leak2 == 0) continue;
        prior.probs[n1][n2] += weight * leak1 * leak2;
      }
    }
  }
  return prior;
}

JointPosterior joint_retrodict(const DetectorBank& bank1, const DetectorBank& bank2,
                               const JointPrior& prior, int clicks1, int clicks2) {
  bank1.validate();
  bank2.validate();
  if (clicks1 < 0 || clicks1 > bank1.detectors)
    throw std::invalid_argument("joint retrodict: clicks1 outside 0..detectors");
  if (clicks2 < 0 || clicks2 > bank2.detectors)
    throw std::invalid_argument("joint retrodict: clicks2 outside 0..detectors");
  const int t_max = prior.t_max;
  std::vector<double> col1(t_max + 1), col2(t_max + 1);
  for (int k = 0; k <= t_max; ++k) {
    col1[k] = pmf_noisy(bank1, k).probs[clicks1];
    col2[k] = pmf_noisy(bank2, k).probs[clicks2];
  }
  JointPosterior post{clicks1, clicks2,
                      std::vector<std::vector<double>>(
                          t_max + 1, std::vector<double>(t_max + 1, 0.0)),
                      0.0};
  double evidence = 0.0;
  for (int n1 = 0; n1 <= t_max; ++n1)
    for (int n2 = 0; n2 <= t_max; ++n2) {
      double v = col1[n1] * col2[n2] * prior.probs[n1][n2];
      post.probs[n1][n2] = v;
      evidence += v;
    }
  if (evidence <= 0.0)
    throw ImpossibleObservation("joint retrodict: clicks (" +
                                std::to_string(clicks1) + ", " +
                                std::to_string(clicks2) +
                                ") have zero probability under this prior");
  for (auto& row : post.probs)
    for (auto& v : row) v /= evidence;
  post.evidence = evidence;
  return post;
}

ExactJointPosterior joint_retrodict_exact(const ExactBank& bank1,
                                          const ExactBank& bank2,
                                          const ExactJointPrior& prior, int clicks1,
                                          int clicks2) {
  bank1.validate();
  bank2.validate();
  if (clicks1 < 0 || clicks1 > bank1.detectors)
    throw std::invalid_argument("joint retrodict: clicks1 outside 0..detectors");
  if (clicks2 < 0 || clicks2 > bank2.detectors)
    throw std::invalid_argument("joint retrodict: clicks2 outside 0..detectors");
  const int t_max = prior.t_max;
  std::vector<Rational> col1(t_max + 1), col2(t_max + 1);
  for (int k = 0; k <= t_max; ++k) {
    col1[k] = pmf_noisy_exact(bank1, k).probs[clicks1];
    col2[k] = pmf_noisy_exact(bank2, k).probs[clicks2];
  }
  ExactJointPosterior post{clicks1, clicks2,
                           std::vector<std::vector<Rational>>(
                               t_max + 1, std::vector<Rational>(t_max + 1, 0)),
                           0};
  Rational evidence = 0;
  for (int n1 = 0; n1 <= t_max; ++n1)
    for (int n2 = 0; n2 <= t_max; ++n2) {
      Rational v = col1[n1] * col2[n2] * prior.probs[n1][n2];
      post.probs[n1][n2] = v;
      evidence += v;
    }
  if (evidence == 0)
    throw ImpossibleObservation("joint retrodict: clicks (" +
                                std::to_string(clicks1) + ", " +
                                std::to_string(clicks2) +
                                ") have zero probability under this prior");
  for (auto& row : post.probs)
    for (auto& v : row) v /= evidence;
  post.evidence = evidence;
  return post;
}

JointMode joint_mode(const JointPosterior& posterior) {
  JointMode mode;
  mode.mass = -1.0;
  for (std::size_t n1 = 0; n1 < posterior.probs.size(); ++n1)
    for (std::size_t n2 = 0; n2 < posterior.probs[n1].size(); ++n2)
      if (posterior.probs[n1][n2] > mode.mass) {
        mode.mass = posterior.probs[n1][n2];
        mode.n1 = static_cast<int>(n1);
        mode.n2 = static_cast<int>(n2);
      }
  return mode;
}

}  // namespace clickstat
