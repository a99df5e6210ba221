#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clickstat/clickmodel.hpp"
#include "clickstat/fockoptics.hpp"
#include "clickstat/output.hpp"
#include "clickstat/priors.hpp"
#include "clickstat/retrodict.hpp"
#include "clickstat/simulate.hpp"

namespace {

using namespace clickstat;

constexpr const char* kFormatVersion = "clickstat-output/1";

struct BankFlags {
  int detectors = 1;
  double eta = 1.0;
  double epsilon = 0.0;

  DetectorBank bank() const { return DetectorBank{detectors, eta, epsilon}; }
};

void add_bank_flags(CLI::App* cmd, BankFlags& flags) {
  cmd->add_option("--detectors", flags.detectors, "number of multiplexed detectors")
      ->required();
  cmd->add_option("--eta", flags.eta, "quantum efficiency")->required();
  cmd->add_option("--epsilon", flags.epsilon, "false-click probability per detector")
      ->required();
}

Rational exact_param(double value, const std::string& name,
                     std::vector<std::string>& notes) {
  Rational q = rational_from_double(value);
  if (q.get_den() != 1)
    notes.push_back(name + " " + format_probability(value) +
                    " interpreted as its exact binary value " + rational_string(q));
  return q;
}

std::size_t trimmed_size(const std::vector<double>& values) {
  std::size_t n = values.size();
  while (n > 1 && values[n - 1] == 0.0) --n;
  return n;
}

std::size_t trimmed_size(const std::vector<Rational>& values) {
  std::size_t n = values.size();
  while (n > 1 && values[n - 1] == 0) --n;
  return n;
}

PosteriorSummary summarize(const std::vector<double>& probs) {
  PosteriorSummary s;
  double best = -1.0;
  for (std::size_t n = 0; n < probs.size(); ++n) {
    s.mean += static_cast<double>(n) * probs[n];
    if (probs[n] > best) {
      best = probs[n];
      s.mode = static_cast<int>(n);
    }
  }
  s.mass_at_mode = best;
  return s;
}

void write_preamble(JsonWriter& json, const std::string& command,
                    const std::string& backend) {
  json.begin_object();
  json.key("format").value(kFormatVersion);
  json.key("command").value(command);
  json.key("backend").value(backend);
}

void write_notes(JsonWriter& json, const std::vector<std::string>& notes) {
  json.key("notes").begin_array();
  for (const auto& note : notes) json.value(note);
  json.end_array();
}

void write_summary(JsonWriter& json, const PosteriorSummary& summary) {
  json.key("summary").begin_object();
  json.key("mode").value(summary.mode);
  json.key("mean").value(summary.mean);
  json.key("mass_at_mode").value(summary.mass_at_mode);
  json.end_object();
}

void emit(const std::string& text) { std::cout << text << "\n"; }

// ---- pmf ------------------------------------------------------------

struct PmfArgs {
  BankFlags bank;
  int photons = 0;
  bool exact = false;
  std::string format = "json";
};

int cmd_pmf(const PmfArgs& args) {
  OutputFormat format = parse_format(args.format);
  std::vector<std::string> notes;
  std::vector<std::string> cells;  // serialized probabilities, by click count
  std::vector<Rational> exact_probs;
  std::vector<double> float_probs;

  if (args.exact) {
    ExactBank bank{args.bank.detectors, exact_param(args.bank.eta, "eta", notes),
                   exact_param(args.bank.epsilon, "epsilon", notes)};
    exact_probs = pmf_noisy_exact(bank, args.photons).probs;
    for (const auto& p : exact_probs) cells.push_back(rational_string(p));
  } else {
    float_probs = pmf_noisy(args.bank.bank(), args.photons).probs;
    for (double p : float_probs) cells.push_back(format_probability(p));
  }

  if (format == OutputFormat::Csv) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t c = 0; c < cells.size(); ++c)
      rows.push_back({std::to_string(c), cells[c]});
    emit(render_csv({"index", "probability"}, rows));
    return 0;
  }

  JsonWriter json;
  write_preamble(json, "pmf", args.exact ? "exact" : "float");
  json.key("params").begin_object();
  json.key("detectors").value(args.bank.detectors);
  json.key("eta").value(args.bank.eta);
  json.key("epsilon").value(args.bank.epsilon);
  json.key("photons").value(args.photons);
  json.end_object();
  write_notes(json, notes);
  json.key("values").begin_array();
  if (args.exact)
    for (const auto& cell : cells) json.value(cell);
  else
    for (double p : float_probs) json.value(p);
  json.end_array();
  json.end_object();
  emit(json.str());
  return 0;
}

// ---- retrodict -------------------------------------------------------

struct RetrodictArgs {
  BankFlags bank;
  int clicks = 0;
  std::string prior_spec;
  double tail_tol = kDefaultTailTolerance;
  bool exact = false;
  std::string format = "json";
};

std::vector<double> parse_custom_weights(const std::string& spec) {
  // "custom:w0,w1,..." -> raw weights before any normalization
  std::vector<double> weights;
  std::string rest = spec.substr(spec.find(':') + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    std::size_t comma = rest.find(',', pos);
    std::string item =
        rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    weights.push_back(std::stod(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return weights;
}

int cmd_retrodict(const RetrodictArgs& args) {
  OutputFormat format = parse_format(args.format);
  std::vector<std::string> notes;
  PhotonPrior prior = parse_prior_spec(args.prior_spec, args.tail_tol);

  std::vector<std::string> cells;
  std::vector<double> float_probs;
  PosteriorSummary summary;
  std::string evidence_cell;
  double log_evidence = 0.0;
  bool have_log_evidence = false;

  if (args.exact) {
    ExactBank bank{args.bank.detectors, exact_param(args.bank.eta, "eta", notes),
                   exact_param(args.bank.epsilon, "epsilon", notes)};
    ExactPrior exact_prior;
    switch (prior.kind) {
      case PriorKind::Poisson:
        exact_prior =
            exact_poisson_prior(exact_param(prior.mu, "mu", notes), prior.n_max);
        break;
      case PriorKind::Thermal:
        exact_prior =
            exact_thermal_prior(exact_param(prior.mu, "mu", notes), prior.n_max);
        break;
      case PriorKind::SqueezedGain:
        exact_prior = exact_thermal_prior(
            exact_param(prior.mu, "sinh(g)^2", notes), prior.n_max);
        break;
      case PriorKind::Custom: {
        std::vector<Rational> weights;
        for (double w : parse_custom_weights(args.prior_spec))
          weights.push_back(rational_from_double(w));
        exact_prior = exact_custom_prior(std::move(weights));
        break;
      }
    }
    ExactPosterior post = retrodict_exact(bank, exact_prior, args.clicks);
    std::size_t size = trimmed_size(post.probs);
    float_probs.reserve(post.probs.size());
    for (const auto& p : post.probs) float_probs.push_back(to_double(p));
    for (std::size_t n = 0; n < size; ++n) cells.push_back(rational_string(post.probs[n]));
    evidence_cell = rational_string(post.evidence);
    summary = summarize(float_probs);
  } else {
    Posterior post = retrodict(args.bank.bank(), prior, args.clicks);
    std::size_t size = trimmed_size(post.probs);
    float_probs = post.probs;
    for (std::size_t n = 0; n < size; ++n)
      cells.push_back(format_probability(post.probs[n]));
    evidence_cell = format_probability(std::exp(post.log_evidence));
    log_evidence = post.log_evidence;
    have_log_evidence = true;
    summary = summarize(post.probs);
  }

  if (format == OutputFormat::Csv) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t n = 0; n < cells.size(); ++n)
      rows.push_back({std::to_string(n), cells[n]});
    emit(render_csv({"index", "probability"}, rows));
    return 0;
  }

  JsonWriter json;
  write_preamble(json, "retrodict", args.exact ? "exact" : "float");
  json.key("params").begin_object();
  json.key("detectors").value(args.bank.detectors);
  json.key("eta").value(args.bank.eta);
  json.key("epsilon").value(args.bank.epsilon);
  json.key("clicks").value(args.clicks);
  json.key("prior").value(args.prior_spec);
  json.key("tail_tol").value(args.tail_tol);
  json.key("n_max").value(prior.n_max);
  json.end_object();
  write_notes(json, notes);
  json.key("values").begin_array();
  if (args.exact)
    for (const auto& cell : cells) json.value(cell);
  else
    for (std::size_t n = 0; n < cells.size(); ++n) json.value(float_probs[n]);
  json.end_array();
  if (args.exact) {
    json.key("evidence").value(evidence_cell);
  } else {
    json.key("evidence").value(std::exp(log_evidence));
    if (have_log_evidence) json.key("log_evidence").value(log_evidence);
  }
  write_summary(json, summary);
  json.end_object();
  emit(json.str());
  return 0;
}

// ---- simulate --------------------------------------------------------

struct SimulateArgs {
  BankFlags bank;
  int photons = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::string format = "json";
};

int cmd_simulate(const SimulateArgs& args) {
  OutputFormat format = parse_format(args.format);
  TrialConfig config{args.bank.bank(), args.photons, args.trials, args.seed};
  EmpiricalPmf empirical = estimate_pmf(config);
  const int bins = static_cast<int>(empirical.counts.size());

  if (format == OutputFormat::Csv) {
    std::vector<std::vector<std::string>> rows;
    for (int c = 0; c < bins; ++c)
      rows.push_back({std::to_string(c), format_probability(empirical.frequency(c)),
                      format_probability(empirical.std_error(c))});
    emit(render_csv({"index", "probability", "stderr"}, rows));
    return 0;
  }

  JsonWriter json;
  write_preamble(json, "simulate", "float");
  json.key("params").begin_object();
  json.key("detectors").value(args.bank.detectors);
  json.key("eta").value(args.bank.eta);
  json.key("epsilon").value(args.bank.epsilon);
  json.key("photons").value(args.photons);
  json.key("trials").value(args.trials);
  json.key("seed").value(args.seed);
  json.end_object();
  write_notes(json, {});
  json.key("values").begin_array();
  for (int c = 0; c < bins; ++c) json.value(empirical.frequency(c));
  json.end_array();
  json.key("stderr").begin_array();
  for (int c = 0; c < bins; ++c) json.value(empirical.std_error(c));
  json.end_array();
  json.key("counts").begin_array();
  for (int c = 0; c < bins; ++c) json.value(empirical.counts[c]);
  json.end_array();
  json.end_object();
  emit(json.str());
  return 0;
}

// ---- noon ------------------------------------------------------------

struct NoonArgs {
  int photons_per_port = 0;
  BankFlags bank;
  std::string clicks;
  bool prior_only = false;
  std::string format = "json";
};

std::pair<int, int> parse_click_pair(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("clicks: expected 'C1,C2'");
  auto parse_int = [](const std::string& item) {
    std::size_t used = 0;
    int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("clicks: trailing junk");
    return v;
  };
  return {parse_int(text.substr(0, comma)), parse_int(text.substr(comma + 1))};
}

void write_matrix(JsonWriter& json, const std::vector<std::vector<double>>& matrix) {
  json.key("values").begin_array();
  for (const auto& row : matrix) {
    json.begin_array();
    for (double v : row) json.value(v);
    json.end_array();
  }
  json.end_array();
}

std::vector<std::vector<std::string>> matrix_rows(
    const std::vector<std::vector<double>>& matrix) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t n1 = 0; n1 < matrix.size(); ++n1)
    for (std::size_t n2 = 0; n2 < matrix[n1].size(); ++n2)
      rows.push_back({std::to_string(n1), std::to_string(n2),
                      format_probability(matrix[n1][n2])});
  return rows;
}

int cmd_noon(const NoonArgs& args) {
  OutputFormat format = parse_format(args.format);
  const double leak = 0.5;  // the setup's leak splitters are 50:50
  JointPrior prior = noon_joint_prior(args.photons_per_port, leak);

  if (args.prior_only) {
    if (format == OutputFormat::Csv) {
      emit(render_csv({"n1", "n2", "probability"}, matrix_rows(prior.probs)));
      return 0;
    }
    JsonWriter json;
    write_preamble(json, "noon", "float");
    json.key("params").begin_object();
    json.key("photons_per_port").value(args.photons_per_port);
    json.key("leak").value(leak);
    json.key("prior_only").value(1);
    json.end_object();
    write_notes(json, {});
    write_matrix(json, prior.probs);
    json.end_object();
    emit(json.str());
    return 0;
  }

  if (args.clicks.empty())
    throw std::invalid_argument("noon: provide --clicks C1,C2 or --prior-only");
  auto [c1, c2] = parse_click_pair(args.clicks);
  DetectorBank bank = args.bank.bank();
  JointPosterior post = joint_retrodict(bank, bank, prior, c1, c2);

  if (format == OutputFormat::Csv) {
    emit(render_csv({"n1", "n2", "probability"}, matrix_rows(post.probs)));
    return 0;
  }

  JsonWriter json;
  write_preamble(json, "noon", "float");
  json.key("params").begin_object();
  json.key("photons_per_port").value(args.photons_per_port);
  json.key("leak").value(leak);
  json.key("detectors").value(args.bank.detectors);
  json.key("eta").value(args.bank.eta);
  json.key("epsilon").value(args.bank.epsilon);
  json.key("clicks1").value(c1);
  json.key("clicks2").value(c2);
  json.end_object();
  write_notes(json, {});
  write_matrix(json, post.probs);
  json.key("evidence").value(post.evidence);
  JointMode mode = joint_mode(post);
  json.key("mode").begin_object();
  json.key("n1").value(mode.n1);
  json.key("n2").value(mode.n2);
  json.key("mass").value(mode.mass);
  json.end_object();
  json.end_object();
  emit(json.str());
  return 0;
}

// ---- squeezed --------------------------------------------------------

struct SqueezedArgs {
  double gain = std::nan("");
  BankFlags bank;
  int clicks = 0;
  std::string sweep;
  std::string format = "json";
};

struct SweepRange {
  double lo = 0.0, hi = 0.0, step = 0.0;
  int count = 0;
};

SweepRange parse_sweep(const std::string& text) {
  auto first = text.find(':');
  auto second = text.find(':', first == std::string::npos ? 0 : first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw std::invalid_argument("sweep: expected 'g1:g2:step'");
  SweepRange range;
  range.lo = std::stod(text.substr(0, first));
  range.hi = std::stod(text.substr(first + 1, second - first - 1));
  range.step = std::stod(text.substr(second + 1));
  if (!(range.step > 0.0)) throw std::invalid_argument("sweep: step must be > 0");
  if (range.hi < range.lo) throw std::invalid_argument("sweep: g2 < g1");
  range.count = static_cast<int>(std::floor((range.hi - range.lo) / range.step + 1e-9)) + 1;
  return range;
}

int cmd_squeezed(const SqueezedArgs& args) {
  OutputFormat format = parse_format(args.format);
  DetectorBank bank = args.bank.bank();

  if (!args.sweep.empty()) {
    SweepRange range = parse_sweep(args.sweep);
    std::vector<double> gains;
    for (int i = 0; i < range.count; ++i) gains.push_back(range.lo + i * range.step);

    std::vector<std::vector<double>> tables;
    std::vector<PhotonPrior> priors;
    for (double g : gains) {
      PhotonPrior prior = make_squeezed_prior(g);
      Posterior post = retrodict(bank, prior, args.clicks);
      post.probs.resize(trimmed_size(post.probs));
      tables.push_back(std::move(post.probs));
      priors.push_back(std::move(prior));
    }

    if (format == OutputFormat::Csv) {
      std::vector<std::vector<std::string>> rows;
      for (std::size_t i = 0; i < gains.size(); ++i)
        for (std::size_t n = 0; n < tables[i].size(); ++n)
          rows.push_back({format_probability(gains[i]), std::to_string(n),
                          format_probability(tables[i][n])});
      emit(render_csv({"gain", "index", "probability"}, rows));
      return 0;
    }

    JsonWriter json;
    write_preamble(json, "squeezed", "float");
    json.key("params").begin_object();
    json.key("sweep").value(args.sweep);
    json.key("detectors").value(args.bank.detectors);
    json.key("eta").value(args.bank.eta);
    json.key("epsilon").value(args.bank.epsilon);
    json.key("clicks").value(args.clicks);
    json.end_object();
    write_notes(json, {});
    json.key("sweep").begin_array();
    for (std::size_t i = 0; i < gains.size(); ++i) {
      json.begin_object();
      json.key("gain").value(gains[i]);
      json.key("n_max").value(priors[i].n_max);
      json.key("values").begin_array();
      for (double p : tables[i]) json.value(p);
      json.end_array();
      write_summary(json, summarize(tables[i]));
      json.end_object();
    }
    json.end_array();
    json.end_object();
    emit(json.str());
    return 0;
  }

  if (std::isnan(args.gain))
    throw std::invalid_argument("squeezed: provide --gain or --sweep");
  PhotonPrior prior = make_squeezed_prior(args.gain);
  Posterior post = retrodict(bank, prior, args.clicks);
  std::size_t size = trimmed_size(post.probs);

  if (format == OutputFormat::Csv) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t n = 0; n < size; ++n)
      rows.push_back({std::to_string(n), format_probability(post.probs[n])});
    emit(render_csv({"index", "probability"}, rows));
    return 0;
  }

  JsonWriter json;
  write_preamble(json, "squeezed", "float");
  json.key("params").begin_object();
  json.key("gain").value(args.gain);
  json.key("detectors").value(args.bank.detectors);
  json.key("eta").value(args.bank.eta);
  json.key("epsilon").value(args.bank.epsilon);
  json.key("clicks").value(args.clicks);
  json.key("n_max").value(prior.n_max);
  json.end_object();
  write_notes(json, {});
  json.key("values").begin_array();
  for (std::size_t n = 0; n < size; ++n) json.value(post.probs[n]);
  json.end_array();
  json.key("evidence").value(std::exp(post.log_evidence));
  json.key("log_evidence").value(post.log_evidence);
  write_summary(json, summarize(post.probs));
  json.end_object();
  emit(json.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"click-count statistics for multiplexed single-photon detection"};
  app.require_subcommand(1);

  PmfArgs pmf_args;
  CLI::App* pmf = app.add_subcommand("pmf", "click distribution for a photon number");
  add_bank_flags(pmf, pmf_args.bank);
  pmf->add_option("--photons", pmf_args.photons, "input photon number")->required();
  pmf->add_flag("--exact", pmf_args.exact, "exact rational backend");
  pmf->add_option("--format", pmf_args.format, "json|csv");

  RetrodictArgs retro_args;
  CLI::App* retro =
      app.add_subcommand("retrodict", "photon-number posterior for observed clicks");
  add_bank_flags(retro, retro_args.bank);
  retro->add_option("--clicks", retro_args.clicks, "observed click count")->required();
  retro->add_option("--prior", retro_args.prior_spec,
                    "poisson:mu=, thermal:mu=, squeezed:g=, custom:w0,w1,...")
      ->required();
  retro->add_option("--tail-tol", retro_args.tail_tol, "prior truncation tail mass");
  retro->add_flag("--exact", retro_args.exact, "exact rational backend");
  retro->add_option("--format", retro_args.format, "json|csv");

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "seeded Monte Carlo click histogram");
  add_bank_flags(sim, sim_args.bank);
  sim->add_option("--photons", sim_args.photons, "input photon number")->required();
  sim->add_option("--trials", sim_args.trials, "number of windows")->required();
  sim->add_option("--seed", sim_args.seed, "64-bit seed")->required();
  sim->add_option("--format", sim_args.format, "json|csv");

  NoonArgs noon_args;
  CLI::App* noon =
      app.add_subcommand("noon", "two-arm heralding prior and joint posterior");
  noon->add_option("--photons-per-port", noon_args.photons_per_port,
                   "photons entering each port of the first coupler")
      ->required();
  noon->add_option("--detectors", noon_args.bank.detectors,
                   "detectors per station");
  noon->add_option("--eta", noon_args.bank.eta, "quantum efficiency");
  noon->add_option("--epsilon", noon_args.bank.epsilon, "false-click probability");
  noon->add_option("--clicks", noon_args.clicks, "observed clicks 'C1,C2'");
  noon->add_flag("--prior-only", noon_args.prior_only, "emit the joint prior matrix");
  noon->add_option("--format", noon_args.format, "json|csv");

  SqueezedArgs sq_args;
  CLI::App* squeezed =
      app.add_subcommand("squeezed", "posterior for a squeezed source of gain g");
  squeezed->add_option("--gain", sq_args.gain, "squeezing gain");
  add_bank_flags(squeezed, sq_args.bank);
  squeezed->add_option("--clicks", sq_args.clicks, "observed click count")->required();
  squeezed->add_option("--sweep", sq_args.sweep, "gain sweep 'g1:g2:step'");
  squeezed->add_option("--format", sq_args.format, "json|csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help path
    std::cerr << render_error(e.what(), 2);
    return 2;
  }

  try {
    if (pmf->parsed()) return cmd_pmf(pmf_args);
    if (retro->parsed()) return cmd_retrodict(retro_args);
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (noon->parsed()) return cmd_noon(noon_args);
    if (squeezed->parsed()) return cmd_squeezed(sq_args);
  } catch (const ImpossibleObservation& e) {
    std::cerr << render_error(e.what(), 3);
    return 3;
  } catch (const std::exception& e) {
    std::cerr << render_error(e.what(), 2);
    return 2;
  }
  return 2;
}
