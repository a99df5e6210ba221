#include "clickstat/clickmodel.hpp"

#include <cmath>
#include <stdexcept>

#include "clickstat/combinatorics.hpp"
#include "clickstat/numeric.hpp"

namespace clickstat {

void DetectorBank::validate() const {
  if (detectors < 1) throw std::invalid_argument("bank: detectors < 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("bank: eta outside [0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("bank: epsilon outside [0, 1]");
}

void ExactBank::validate() const {
  if (detectors < 1) throw std::invalid_argument("bank: detectors < 1");
  if (!is_probability(eta)) throw std::invalid_argument("bank: eta outside [0, 1]");
  if (!is_probability(epsilon))
    throw std::invalid_argument("bank: epsilon outside [0, 1]");
}

namespace {

// P_d(c | k) for an ideal bank of d detectors hit by k photons.
// The d = 0 sub-bank shows up when every detector false-clicked; it can
// only produce zero clicks from zero photons.
Rational ideal_prob_exact(int d, int c, int k, const StirlingTable& stirling) {
  if (d == 0) return (c == 0 && k == 0) ? Rational(1) : Rational(0);
  if (c > d || c > k) return 0;
  BigInt num = binomial(d, c) * factorial(c) * stirling.at(k, c);
  return make_rational(num, bigint_pow(BigInt(d), static_cast<unsigned long>(k)));
}

double log_ideal_prob(int d, int c, int k, const LogStirlingTable& stirling) {
  if (d == 0) return (c == 0 && k == 0) ? 0.0 : kNegInf;
  if (c > d || c > k) return kNegInf;
  return log_binomial(d, c) + log_factorial(c) + stirling.log_at(k, c) -
         k * std::log(static_cast<double>(d));
}

}  // namespace

ExactClickPmf pmf_ideal_exact(int detectors, int photons) {
  if (detectors < 1) throw std::invalid_argument("pmf_ideal: detectors < 1");
  if (photons < 0) throw std::invalid_argument("pmf_ideal: photons < 0");
  StirlingTable stirling(photons, std::min(photons, detectors));
  ExactClickPmf pmf{detectors, photons, {}};
  pmf.probs.resize(detectors + 1, Rational(0));
  for (int c = 0; c <= std::min(detectors, photons); ++c)
    pmf.probs[c] = ideal_prob_exact(detectors, c, photons, stirling);
  return pmf;
}

ClickPmf pmf_ideal(int detectors, int photons) {
  if (detectors < 1) throw std::invalid_argument("pmf_ideal: detectors < 1");
  if (photons < 0) throw std::invalid_argument("pmf_ideal: photons < 0");
  LogStirlingTable stirling(photons, std::min(photons, detectors));
  ClickPmf pmf{detectors, photons, std::vector<double>(detectors + 1, 0.0)};
  for (int c = 0; c <= detectors; ++c)
    pmf.probs[c] = std::exp(log_ideal_prob(detectors, c, photons, stirling));
  return pmf;
}

ExactClickPmf pmf_lossy_exact(int detectors, int photons, const Rational& eta) {
  if (detectors < 1) throw std::invalid_argument("pmf_lossy: detectors < 1");
  if (photons < 0) throw std::invalid_argument("pmf_lossy: photons < 0");
  if (!is_probability(eta)) throw std::invalid_argument("pmf_lossy: eta outside [0, 1]");
  StirlingTable stirling(photons, std::min(photons, detectors));
  ExactClickPmf pmf{detectors, photons, {}};
  pmf.probs.resize(detectors + 1, Rational(0));
  for (int k = 0; k <= photons; ++k) {
    Rational survive = binom_pmf(k, photons, eta);
    if (survive == 0) continue;
    for (int c = 0; c <= std::min(detectors, k); ++c)
      pmf.probs[c] += survive * ideal_prob_exact(detectors, c, k, stirling);
  }
  return pmf;
}

ClickPmf pmf_lossy(int detectors, int photons, double eta) {
  if (detectors < 1) throw std::invalid_argument("pmf_lossy: detectors < 1");
  if (photons < 0) throw std::invalid_argument("pmf_lossy: photons < 0");
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("pmf_lossy: eta outside [0, 1]");
  LogStirlingTable stirling(photons, std::min(photons, detectors));
  ClickPmf pmf{detectors, photons, std::vector<double>(detectors + 1, 0.0)};
  std::vector<double> terms;
  for (int c = 0; c <= detectors; ++c) {
    terms.clear();
    for (int k = c; k <= photons; ++k)
      terms.push_back(log_binom_pmf(k, photons, eta) +
                      log_ideal_prob(detectors, c, k, stirling));
    pmf.probs[c] = std::exp(log_sum_exp(terms));
  }
  return pmf;
}

ExactClickPmf pmf_noisy_exact(const ExactBank& bank, int photons) {
  bank.validate();
  if (photons < 0) throw std::invalid_argument("pmf_noisy: photons < 0");
  const int d = bank.detectors, n = photons;
  StirlingTable stirling(n, std::min(n, d));

  std::vector<Rational> eps_row(d + 1);
  for (int i = 0; i <= d; ++i) eps_row[i] = binom_pmf(i, d, bank.epsilon);

  // binomial rows reused across click counts
  std::vector<std::vector<Rational>> eta_row(n + 1);
  for (int j = 0; j <= n; ++j) {
    eta_row[j].resize(j + 1);
    for (int k = 0; k <= j; ++k) eta_row[j][k] = binom_pmf(k, j, bank.eta);
  }
  std::vector<std::vector<Rational>> routed_row(d + 1);  // by false-click count i

  ExactClickPmf pmf{d, n, {}};
  pmf.probs.resize(d + 1, Rational(0));
  for (int clicks = 0; clicks <= d; ++clicks) {
    Rational total = 0;
    for (int i = 0; i <= clicks; ++i) {
      if (eps_row[i] == 0) continue;
      const int sub_d = d - i, sub_c = clicks - i;
      if (routed_row[i].empty()) {
        routed_row[i].resize(n + 1);
        Rational kept = make_rational(sub_d, d);
        for (int j = 0; j <= n; ++j) routed_row[i][j] = binom_pmf(j, n, kept);
      }
      for (int j = sub_c; j <= n; ++j) {
        if (routed_row[i][j] == 0) continue;
        for (int k = sub_c; k <= j; ++k) {
          if (eta_row[j][k] == 0) continue;
          Rational ideal = ideal_prob_exact(sub_d, sub_c, k, stirling);
          if (ideal == 0) continue;
          total += eps_row[i] * routed_row[i][j] * eta_row[j][k] * ideal;
        }
      }
    }
    pmf.probs[clicks] = total;
  }
  return pmf;
}

ClickPmf pmf_noisy(const DetectorBank& bank, int photons) {
  bank.validate();
  if (photons < 0) throw std::invalid_argument("pmf_noisy: photons < 0");
  const int d = bank.detectors, n = photons;
  LogStirlingTable stirling(n, std::min(n, d));

  std::vector<double> eps_row(d + 1);
  for (int i = 0; i <= d; ++i) eps_row[i] = log_binom_pmf(i, d, bank.epsilon);

  std::vector<std::vector<double>> eta_row(n + 1);
  for (int j = 0; j <= n; ++j) {
    eta_row[j].resize(j + 1);
    for (int k = 0; k <= j; ++k) eta_row[j][k] = log_binom_pmf(k, j, bank.eta);
  }
  std::vector<std::vector<double>> routed_row(d + 1);

  ClickPmf pmf{d, n, std::vector<double>(d + 1, 0.0)};
  std::vector<double> terms;
  for (int clicks = 0; clicks <= d; ++clicks) {
    terms.clear();
    for (int i = 0; i <= clicks; ++i) {
      if (eps_row[i] == kNegInf) continue;
      const int sub_d = d - i, sub_c = clicks - i;
      if (routed_row[i].empty()) {
        routed_row[i].resize(n + 1);
        double kept = static_cast<double>(sub_d) / d;
        for (int j = 0; j <= n; ++j) routed_row[i][j] = log_binom_pmf(j, n, kept);
      }
      for (int j = sub_c; j <= n; ++j) {
        if (routed_row[i][j] == kNegInf) continue;
        for (int k = sub_c; k <= j; ++k) {
          double term = eps_row[i] + routed_row[i][j] + eta_row[j][k] +
                        log_ideal_prob(sub_d, sub_c, k, stirling);
          if (term != kNegInf) terms.push_back(term);
        }
      }
    }
    pmf.probs[clicks] = std::exp(log_sum_exp(terms));
  }
  return pmf;
}

// Only the k = n survivor term can click all n detectors' worth, so the
// sum collapses to eta^n * D(D-1)...(D-n+1) / D^n.
Rational all_detect_probability_exact(int detectors, const Rational& eta, int photons) {
  if (detectors < 1) throw std::invalid_argument("all_detect: detectors < 1");
  if (photons < 0) throw std::invalid_argument("all_detect: photons < 0");
  if (!is_probability(eta)) throw std::invalid_argument("all_detect: eta outside [0, 1]");
  if (photons > detectors)
    throw std::invalid_argument("all_detect: photons exceed detectors");
  if (photons == 0) return 1;
  Rational r = rational_pow(eta, static_cast<unsigned long>(photons));
  r *= make_rational(falling_factorial(detectors, photons),
                     bigint_pow(BigInt(detectors), static_cast<unsigned long>(photons)));
  return r;
}

double all_detect_probability(int detectors, double eta, int photons) {
  if (detectors < 1) throw std::invalid_argument("all_detect: detectors < 1");
  if (photons < 0) throw std::invalid_argument("all_detect: photons < 0");
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("all_detect: eta outside [0, 1]");
  if (photons > detectors)
    throw std::invalid_argument("all_detect: photons exceed detectors");
  double r = 1.0;
  for (int i = 0; i < photons; ++i)
    r *= eta * (static_cast<double>(detectors - i) / detectors);
  return r;
}

double epsilon_from_rate(double rate_hz, double window_s) {
  if (!(rate_hz >= 0.0)) throw std::invalid_argument("epsilon_from_rate: negative rate");
  if (!(window_s > 0.0))
    throw std::invalid_argument("epsilon_from_rate: window must be positive");
  return -std::expm1(-rate_hz * window_s);
}

}  // namespace clickstat
