#include "clickstat/priors.hpp"

#include <cmath>
#include <stdexcept>

#include "clickstat/numeric.hpp"

namespace clickstat {

namespace {

void check_mu(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("prior: mean must be finite and >= 0");
}

void check_tol(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("prior: tail tolerance must be in (0, inf)");
}

// windows are materialized as weight vectors; cap them at 512 MB worth
constexpr int kMaxPriorWindow = 1 << 26;

[[noreturn]] void reject_window() {
  throw std::invalid_argument(
      "prior: window exceeds " + std::to_string(kMaxPriorWindow) +
      " entries; raise the tail tolerance or lower the mean");
}

// Renormalize log weights over the window in a single stable pass.
std::vector<double> weights_from_log(const std::vector<double>& log_w) {
  double norm = log_sum_exp(log_w);
  std::vector<double> w(log_w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_w[i] - norm);
  return w;
}

int truncation_thermal(double mu, double tol) {
  if (mu == 0.0) return 0;
  // tail(M) = (mu / (mu + 1))^(M+1)
  double log_r = std::log(mu) - std::log1p(mu);
  double guess = std::ceil(std::log(tol) / log_r) - 1.0;
  if (guess > static_cast<double>(kMaxPriorWindow) + 2.0) reject_window();
  int m = guess > 0.0 ? static_cast<int>(guess) : 0;
  if (m <= (1 << 14)) {
    // near the boundary a few ulps decide the answer; compare exactly
    Rational r = rational_from_double(mu) / (rational_from_double(mu) + 1);
    Rational tol_q = rational_from_double(tol);
    auto tail_le_tol = [&](int mm) {
      return rational_pow(r, static_cast<unsigned long>(mm) + 1) <= tol_q;
    };
    while (!tail_le_tol(m)) ++m;
    while (m > 0 && tail_le_tol(m - 1)) --m;
    return m;
  }
  auto tail_log = [&](int mm) { return (mm + 1.0) * log_r; };
  double log_tol = std::log(tol);
  while (tail_log(m) > log_tol) ++m;
  while (m > 0 && tail_log(m - 1) <= log_tol) --m;
  return m;
}

int truncation_poisson(double mu, double tol) {
  if (mu == 0.0) return 0;
  if (mu > static_cast<double>(kMaxPriorWindow)) reject_window();
  const int mode = static_cast<int>(mu);
  // terms scaled so t(mode) = 1; raw mu^n/n! overflows for mu > ~170
  std::vector<double> below;  // t(mode), t(mode-1), ...
  {
    double t = 1.0;
    for (int n = mode; n >= 0; --n) {
      below.push_back(t);
      if (t == 0.0) break;
      t *= static_cast<double>(n) / mu;
    }
  }
  std::vector<double> above;  // t(mode+1), t(mode+2), ...
  double geo_bound;
  {
    double t = mu / (mode + 1.0);
    int n = mode + 1;
    for (;;) {
      above.push_back(t);
      ++n;
      t *= mu / n;
      double ratio = mu / (n + 1.0);
      if (n > mu && ratio < 1.0) {
        geo_bound = t / (1.0 - ratio);  // remaining tail in scaled units
        if (geo_bound < tol * 1e-3 || t == 0.0) break;
      }
    }
  }
  double z = 0.0;
  for (double t : below) z += t;
  for (double t : above) z += t;

  double acc = geo_bound / z;
  if (acc > tol) throw std::logic_error("poisson truncation scan too short");
  int hi = mode + static_cast<int>(above.size());
  for (int n = hi; n >= mode + 1; --n) {
    acc += above[static_cast<std::size_t>(n - mode - 1)] / z;
    if (acc > tol) return n;
  }
  for (int n = mode; n >= 0; --n) {
    std::size_t idx = static_cast<std::size_t>(mode - n);
    acc += (idx < below.size() ? below[idx] : 0.0) / z;
    if (acc > tol) return n;
  }
  return 0;
}

std::vector<double> thermal_log_weights(double mu, int n_max) {
  std::vector<double> log_w(static_cast<std::size_t>(n_max) + 1);
  if (mu == 0.0) {
    log_w.assign(1, 0.0);
    return log_w;
  }
  double log_r = std::log(mu) - std::log1p(mu);
  for (int n = 0; n <= n_max; ++n) log_w[n] = n * log_r;
  return log_w;
}

}  // namespace

int truncation_bound(PriorKind kind, double mu, double tail_tol) {
  check_mu(mu);
  check_tol(tail_tol);
  if (tail_tol >= 1.0) return 0;
  int bound = 0;
  switch (kind) {
    case PriorKind::Poisson:
      bound = truncation_poisson(mu, tail_tol);
      break;
    case PriorKind::Thermal:
    case PriorKind::SqueezedGain:
      bound = truncation_thermal(mu, tail_tol);
      break;
    case PriorKind::Custom:
      throw std::invalid_argument("truncation_bound: custom priors are already finite");
  }
  if (bound > kMaxPriorWindow) reject_window();
  return bound;
}

PhotonPrior make_poisson_prior(double mu, double tail_tol) {
  check_mu(mu);
  check_tol(tail_tol);
  PhotonPrior prior;
  prior.kind = PriorKind::Poisson;
  prior.mu = mu;
  prior.n_max = truncation_bound(PriorKind::Poisson, mu, tail_tol);
  if (mu == 0.0) {
    prior.weights = {1.0};
    return prior;
  }
  std::vector<double> log_w(static_cast<std::size_t>(prior.n_max) + 1);
  double log_mu = std::log(mu);
  for (int n = 0; n <= prior.n_max; ++n) log_w[n] = n * log_mu - log_factorial(n);
  prior.weights = weights_from_log(log_w);
  return prior;
}

PhotonPrior make_thermal_prior(double mu, double tail_tol) {
  check_mu(mu);
  check_tol(tail_tol);
  PhotonPrior prior;
  prior.kind = PriorKind::Thermal;
  prior.mu = mu;
  prior.n_max = truncation_bound(PriorKind::Thermal, mu, tail_tol);
  prior.weights = weights_from_log(thermal_log_weights(mu, prior.n_max));
  return prior;
}

PhotonPrior make_squeezed_prior(double gain, double tail_tol) {
  if (!(gain >= 0.0) || !std::isfinite(gain))
    throw std::invalid_argument("prior: gain must be finite and >= 0");
  check_tol(tail_tol);
  double sh = std::sinh(gain);
  PhotonPrior prior = make_thermal_prior(sh * sh, tail_tol);
  prior.kind = PriorKind::SqueezedGain;
  prior.gain = gain;
  return prior;
}

PhotonPrior make_custom_prior(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("custom prior: no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("custom prior: weights must be finite and >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("custom prior: weights sum to zero");
  for (double& w : weights) w /= sum;
  PhotonPrior prior;
  prior.kind = PriorKind::Custom;
  prior.n_max = static_cast<int>(weights.size()) - 1;
  prior.weights = std::move(weights);
  return prior;
}

double prior_pmf(const PhotonPrior& prior, int n) {
  if (n < 0) throw std::invalid_argument("prior_pmf: n < 0");
  if (n > prior.n_max)
    throw std::out_of_range("prior_pmf: n beyond the truncation window");
  switch (prior.kind) {
    case PriorKind::Poisson:
      if (prior.mu == 0.0) return n == 0 ? 1.0 : 0.0;
      return std::exp(-prior.mu + n * std::log(prior.mu) - log_factorial(n));
    case PriorKind::Thermal:
    case PriorKind::SqueezedGain: {
      if (prior.mu == 0.0) return n == 0 ? 1.0 : 0.0;
      double log_r = std::log(prior.mu) - std::log1p(prior.mu);
      return std::exp(n * log_r - std::log1p(prior.mu));
    }
    case PriorKind::Custom:
      return prior.weights[static_cast<std::size_t>(n)];
  }
  throw std::logic_error("prior_pmf: unknown prior kind");
}

PhotonPrior parse_prior_spec(const std::string& spec, double tail_tol) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("prior spec: expected '<kind>:<params>'");
  std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);

  auto parse_double = [](const std::string& text, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("prior spec: bad ") + what);
    }
    if (used != text.size())
      throw std::invalid_argument(std::string("prior spec: trailing junk after ") + what);
    return v;
  };

  auto keyed_value = [&](const char* key) {
    std::string prefix = std::string(key) + "=";
    if (rest.rfind(prefix, 0) != 0)
      throw std::invalid_argument("prior spec: expected '" + prefix + "<value>'");
    return parse_double(rest.substr(prefix.size()), key);
  };

  if (kind == "poisson") return make_poisson_prior(keyed_value("mu"), tail_tol);
  if (kind == "thermal") return make_thermal_prior(keyed_value("mu"), tail_tol);
  if (kind == "squeezed") return make_squeezed_prior(keyed_value("g"), tail_tol);
  if (kind == "custom") {
    std::vector<double> weights;
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      std::size_t comma = rest.find(',', pos);
      std::string item =
          rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (item.empty()) throw std::invalid_argument("prior spec: empty weight");
      weights.push_back(parse_double(item, "weight"));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return make_custom_prior(std::move(weights));
  }
  throw std::invalid_argument("prior spec: unknown kind '" + kind + "'");
}

ExactPrior exact_poisson_prior(const Rational& mu, int n_max) {
  if (!(mu >= 0)) throw std::invalid_argument("prior: mean must be >= 0");
  if (n_max < 0) throw std::invalid_argument("prior: n_max < 0");
  ExactPrior prior;
  prior.n_max = n_max;
  prior.weights.resize(static_cast<std::size_t>(n_max) + 1);
  Rational term = 1;
  Rational sum = 0;
  for (int n = 0; n <= n_max; ++n) {
    prior.weights[n] = term;
    sum += term;
    term *= mu;
    term /= (n + 1);
  }
  for (auto& w : prior.weights) w /= sum;
  return prior;
}

ExactPrior exact_thermal_prior(const Rational& mu, int n_max) {
  if (!(mu >= 0)) throw std::invalid_argument("prior: mean must be >= 0");
  if (n_max < 0) throw std::invalid_argument("prior: n_max < 0");
  Rational r = mu / (mu + 1);
  ExactPrior prior;
  prior.n_max = n_max;
  prior.weights.resize(static_cast<std::size_t>(n_max) + 1);
  Rational term = 1;
  Rational sum = 0;
  for (int n = 0; n <= n_max; ++n) {
    prior.weights[n] = term;
    sum += term;
    term *= r;
  }
  for (auto& w : prior.weights) w /= sum;
  return prior;
}

ExactPrior exact_custom_prior(std::vector<Rational> weights) {
  if (weights.empty()) throw std::invalid_argument("custom prior: no weights");
  Rational sum = 0;
  for (const auto& w : weights) {
    if (w < 0) throw std::invalid_argument("custom prior: negative weight");
    sum += w;
  }
  if (sum == 0) throw std::invalid_argument("custom prior: weights sum to zero");
  for (auto& w : weights) w /= sum;
  ExactPrior prior;
  prior.n_max = static_cast<int>(weights.size()) - 1;
  prior.weights = std::move(weights);
  return prior;
}

}  // namespace clickstat
