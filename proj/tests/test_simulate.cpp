#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "clickstat/fockoptics.hpp"
#include "clickstat/numeric.hpp"
#include "clickstat/simulate.hpp"

using namespace clickstat;

namespace {

void check_within_five_se(const EmpiricalPmf& empirical,
                          const std::vector<double>& analytic) {
  for (std::size_t c = 0; c < analytic.size(); ++c) {
    double se = std::sqrt(analytic[c] * (1.0 - analytic[c]) /
                          static_cast<double>(empirical.trials));
    double slack = 5.0 * se + (analytic[c] == 0.0 ? 0.0 : 1e-15);
    CHECK(std::abs(empirical.frequency(static_cast<int>(c)) - analytic[c]) <= slack);
  }
}

}  // namespace

TEST_CASE("generator reference sequence") {
  // splitmix64 with seed 1234567 (public test vectors)
  SplitMix64 rng{1234567};
  CHECK(rng.next() == 6457827717110365317ull);
  CHECK(rng.next() == 3203168211198807973ull);
  CHECK(rng.next() == 9817491932198370423ull);
  SplitMix64 unit{42};
  for (int i = 0; i < 1000; ++i) {
    double u = unit.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform_below is in range and unbiased enough to balance") {
  SplitMix64 rng{7};
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 100000; ++i) {
    std::uint32_t v = rng.uniform_below(5);
    REQUIRE(v < 5);
    ++hits[v];
  }
  for (int h : hits) CHECK(std::abs(h - 20000) < 5 * std::sqrt(100000 * 0.2 * 0.8));
}

TEST_CASE("same seed reproduces the same histogram") {
  TrialConfig config{{4, 0.7, 0.02}, 3, 50000, 99};
  EmpiricalPmf a = estimate_pmf(config);
  EmpiricalPmf b = estimate_pmf(config);
  CHECK(a.counts == b.counts);
  config.seed = 100;
  EmpiricalPmf c = estimate_pmf(config);
  CHECK(a.counts != c.counts);
}

TEST_CASE("parallel histogram equals the serial reference at any width") {
  TrialConfig config{{8, 0.6, 0.01}, 5, 40000, 2024};
  EmpiricalPmf serial = estimate_pmf_serial(config);
#ifdef _OPENMP
  for (int threads : {1, 2, 3, 7}) {
    omp_set_num_threads(threads);
    EmpiricalPmf parallel = estimate_pmf(config);
    CHECK(parallel.counts == serial.counts);
  }
  omp_set_num_threads(omp_get_num_procs());
#else
  EmpiricalPmf parallel = estimate_pmf(config);
  CHECK(parallel.counts == serial.counts);
#endif
}

TEST_CASE("two photons on two ideal detectors collide half the time") {
  TrialConfig config{{2, 1.0, 0.0}, 2, 200000, 5};
  EmpiricalPmf empirical = estimate_pmf(config);
  check_within_five_se(empirical, {0.0, 0.5, 0.5});
  CHECK(empirical.counts[0] == 0);
}

TEST_CASE("histograms agree with the analytic model within five sigma") {
  for (auto& [d, eta, eps, n] :
       std::vector<std::tuple<int, double, double, int>>{{4, 0.75, 5e-6, 3},
                                                         {8, 0.6, 0.01, 5},
                                                         {3, 0.9, 0.2, 2}}) {
    DetectorBank bank{d, eta, eps};
    TrialConfig config{bank, n, 200000, 31337};
    EmpiricalPmf empirical = estimate_pmf(config);
    check_within_five_se(empirical, pmf_noisy(bank, n).probs);
    double p = chi_square_gof(empirical, pmf_noisy(bank, n).probs);
    CHECK(p > 1e-4);
  }
}

TEST_CASE("chi-square pipeline sanity") {
  // dof 2: p = exp(-x/2); dof 1: p = erfc(sqrt(x/2))
  CHECK(chi_square_pvalue(3.0, 2) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
  CHECK(chi_square_pvalue(2.0, 1) ==
        doctest::Approx(std::erfc(std::sqrt(1.0))).epsilon(1e-12));
  CHECK(chi_square_pvalue(0.0, 3) == 1.0);
  CHECK(gamma_q(2.5, 0.0) == 1.0);
  CHECK_THROWS_AS(gamma_q(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_q(1.0, -1.0), std::invalid_argument);

  // pooling: expected counts below the cutoff merge instead of exploding
  EmpiricalPmf tiny;
  tiny.counts = {99000, 997, 3, 0};
  tiny.trials = 100000;
  double p = chi_square_gof(tiny, {0.99, 0.0099, 0.00009, 0.00001});
  CHECK(p > 1e-6);
  CHECK(p <= 1.0);
}

TEST_CASE("degenerate banks produce degenerate histograms") {
  TrialConfig dark{{3, 0.0, 1.0}, 5, 1000, 1};
  EmpiricalPmf always = estimate_pmf(dark);
  CHECK(always.counts[3] == 1000);
  TrialConfig blind{{3, 0.0, 0.0}, 5, 1000, 1};
  EmpiricalPmf never = estimate_pmf(blind);
  CHECK(never.counts[0] == 1000);
  CHECK_THROWS_AS(estimate_pmf(TrialConfig{{2, 0.5, 0.0}, 1, 0, 1}),
                  std::invalid_argument);
}

TEST_CASE("one window consumes one stream deterministically") {
  DetectorBank bank{4, 0.8, 0.01};
  SplitMix64 a = trial_stream(11, 0);
  SplitMix64 b = trial_stream(11, 0);
  CHECK(simulate_window(bank, 3, a) == simulate_window(bank, 3, b));
  CHECK(a.state == b.state);
}

TEST_CASE("heralding windows agree with the joint prior at ideal detectors") {
  // leak 1/2, |1,1> input: the (0,0) cell is exactly 1/4
  DetectorBank ideal{1, 1.0, 0.0};
  EmpiricalJointPmf joint = estimate_noon_joint(ideal, ideal, 1, 0.5, 200000, 77);
  double se = std::sqrt(0.25 * 0.75 / 200000.0);
  CHECK(std::abs(joint.frequency(0, 0) - 0.25) <= 5 * se);

  // with one ideal detector per arm the joint click pmf is the prior
  // folded onto click = min(n, 1)
  JointPrior prior = noon_joint_prior(1, 0.5);
  double want11 = 0.0;
  for (int n1 = 1; n1 <= 2; ++n1)
    for (int n2 = 1; n2 <= 2; ++n2) want11 += prior.probs[n1][n2];
  double se11 = std::sqrt(want11 * (1 - want11) / 200000.0);
  CHECK(std::abs(joint.frequency(1, 1) - want11) <= 5 * se11);
}

TEST_CASE("heralding simulation is deterministic and thread independent") {
  DetectorBank bank{2, 0.7, 0.01};
  EmpiricalJointPmf a = estimate_noon_joint(bank, bank, 2, 0.5, 30000, 9);
  EmpiricalJointPmf b = estimate_noon_joint(bank, bank, 2, 0.5, 30000, 9);
  CHECK(a.counts == b.counts);
#ifdef _OPENMP
  omp_set_num_threads(3);
  EmpiricalJointPmf c = estimate_noon_joint(bank, bank, 2, 0.5, 30000, 9);
  CHECK(a.counts == c.counts);
  omp_set_num_threads(omp_get_num_procs());
#endif
}
