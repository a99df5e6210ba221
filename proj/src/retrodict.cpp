#include "clickstat/retrodict.hpp"

#include <cmath>

#include "clickstat/combinatorics.hpp"
#include "clickstat/likelihood.hpp"

namespace clickstat {

namespace {

constexpr int kEvidenceBlock = 8192;
// stop once the unseen tail cannot move the evidence at double precision
constexpr double kLogTailCutoff = -36.841361487904734;  // log(1e-16)

}  // namespace

Posterior retrodict(const DetectorBank& bank, const PhotonPrior& prior, int clicks) {
  bank.validate();
  if (clicks < 0 || clicks > bank.detectors)
    throw std::invalid_argument("retrodict: clicks outside 0..detectors");

  const int n_max = prior.n_max;
  LikelihoodEvaluator eval(bank, clicks, n_max);

  std::vector<double> log_num(static_cast<std::size_t>(n_max) + 1, kNegInf);
  std::vector<double> block(kEvidenceBlock);
  StreamingLogSumExp evidence;
  double prior_seen = 0.0;
  int processed = 0;

  for (int begin = 0; begin <= n_max; begin += kEvidenceBlock) {
    int count = std::min(kEvidenceBlock, n_max - begin + 1);
    std::span<double> out(block.data(), static_cast<std::size_t>(count));
    eval.fill(begin, out);
    for (int t = 0; t < count; ++t) {
      int n = begin + t;
      double w = prior.weights[static_cast<std::size_t>(n)];
      prior_seen += w;
      if (w > 0.0 && out[t] != kNegInf) {
        log_num[n] = out[t] + std::log(w);
        evidence.add(log_num[n]);
      }
    }
    processed = begin + count;
    if (processed > n_max) break;
    double tail = 1.0 - prior_seen;
    if (tail <= 0.0) break;
    double log_tail_bound = std::log(tail) + eval.envelope_log_k() +
                            processed * eval.envelope_log_base();
    double ev = evidence.value();
    if (ev != kNegInf && log_tail_bound < ev + kLogTailCutoff) break;
  }

  double log_ev = evidence.value();
  if (log_ev == kNegInf)
    throw ImpossibleObservation("retrodict: " + std::to_string(clicks) +
                                " clicks have zero probability under this prior");

  Posterior post{clicks, bank, {}, log_ev};
  post.probs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int n = 0; n < processed; ++n)
    if (log_num[n] != kNegInf) post.probs[n] = std::exp(log_num[n] - log_ev);
  return post;
}

ExactPosterior retrodict_exact(const ExactBank& bank, const ExactPrior& prior,
                               int clicks) {
  bank.validate();
  if (clicks < 0 || clicks > bank.detectors)
    throw std::invalid_argument("retrodict: clicks outside 0..detectors");

  ExactPosterior post;
  post.clicks = clicks;
  post.bank = bank;
  post.probs.resize(static_cast<std::size_t>(prior.n_max) + 1);
  Rational evidence = 0;
  for (int n = 0; n <= prior.n_max; ++n) {
    const Rational& w = prior.weights[static_cast<std::size_t>(n)];
    if (w == 0) {
      post.probs[n] = 0;
      continue;
    }
    Rational like = pmf_noisy_exact(bank, n).probs[static_cast<std::size_t>(clicks)];
    post.probs[n] = w * like;
    evidence += post.probs[n];
  }
  if (evidence == 0)
    throw ImpossibleObservation("retrodict: " + std::to_string(clicks) +
                                " clicks have zero probability under this prior");
  for (auto& p : post.probs) p /= evidence;
  post.evidence = evidence;
  return post;
}

PosteriorSummary posterior_summary(const Posterior& posterior) {
  if (posterior.probs.empty())
    throw std::invalid_argument("posterior_summary: empty posterior");
  PosteriorSummary summary;
  double best = -1.0, mean = 0.0;
  for (std::size_t n = 0; n < posterior.probs.size(); ++n) {
    double p = posterior.probs[n];
    mean += static_cast<double>(n) * p;
    if (p > best) {
      best = p;
      summary.mode = static_cast<int>(n);
    }
  }
  summary.mean = mean;
  summary.mass_at_mode = best;
  return summary;
}

double retrodict_poisson_ideal(int detectors, double mu, int clicks, int n) {
  if (detectors < 1) throw std::invalid_argument("retrodict: detectors < 1");
  if (clicks < 0 || clicks > detectors)
    throw std::invalid_argument("retrodict: clicks outside 0..detectors");
  if (n < 0) throw std::invalid_argument("retrodict: n < 0");
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("retrodict: mu must be finite and >= 0");
  if (mu == 0.0) {
    if (clicks > 0)
      throw ImpossibleObservation("retrodict: clicks from a vacuum prior");
    return n == 0 ? 1.0 : 0.0;
  }
  if (n < clicks) return 0.0;
  double gamma = detectors / mu;
  double x = 1.0 / gamma;
  // log(e^x - 1) without overflow for large x
  double log_e_term = x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
  LogStirlingTable stirling(n, std::min(n, clicks));
  double log_p = log_factorial(clicks) + stirling.log_at(n, clicks) -
                 log_factorial(n) - n * std::log(gamma) - clicks * log_e_term;
  return std::exp(log_p);
}

double retrodict_thermal_ideal(int detectors, double mu, int clicks, int n) {
  if (detectors < 1) throw std::invalid_argument("retrodict: detectors < 1");
  if (clicks < 0 || clicks > detectors)
    throw std::invalid_argument("retrodict: clicks outside 0..detectors");
  if (n < 0) throw std::invalid_argument("retrodict: n < 0");
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("retrodict: mu must be finite and >= 0");
  if (mu == 0.0) {
    if (clicks > 0)
      throw ImpossibleObservation("retrodict: clicks from a vacuum prior");
    return n == 0 ? 1.0 : 0.0;
  }
  if (n < clicks) return 0.0;
  double x = mu / (detectors * (mu + 1.0));  // 1 / (D + gamma)
  LogStirlingTable stirling(n, std::min(n, clicks));
  double log_p = stirling.log_at(n, clicks) + (n - clicks) * std::log(x);
  for (int j = 1; j <= clicks; ++j) log_p += std::log1p(-j * x);
  return std::exp(log_p);
}

Rational retrodict_thermal_ideal_exact(int detectors, const Rational& mu, int clicks,
                                       int n) {
  if (detectors < 1) throw std::invalid_argument("retrodict: detectors < 1");
  if (clicks < 0 || clicks > detectors)
    throw std::invalid_argument("retrodict: clicks outside 0..detectors");
  if (n < 0) throw std::invalid_argument("retrodict: n < 0");
  if (mu < 0) throw std::invalid_argument("retrodict: mu must be >= 0");
  if (mu == 0) {
    if (clicks > 0)
      throw ImpossibleObservation("retrodict: clicks from a vacuum prior");
    return n == 0 ? Rational(1) : Rational(0);
  }
  if (n < clicks) return 0;
  Rational x = mu / (detectors * (mu + 1));
  Rational value(stirling2(n, clicks));
  value *= rational_pow(x, static_cast<unsigned long>(n - clicks));
  for (int j = 1; j <= clicks; ++j) value *= Rational(1) - j * x;
  return value;
}

}  // namespace clickstat
