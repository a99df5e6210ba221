#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "clickstat/combinatorics.hpp"
#include "clickstat/fockoptics.hpp"
#include "clickstat/retrodict.hpp"
#include "fock_oracle.hpp"

using namespace clickstat;

TEST_CASE("two photons on a balanced coupler never split") {
  ExactTwoModeAmplitudes exact = beamsplitter_fock_exact(1, 1, make_rational(1, 2));
  CHECK(exact.amps[1].square == 0);
  CHECK(exact.amps[1].sign == 0);
  CHECK(exact.amps[0].square == make_rational(1, 2));
  CHECK(exact.amps[2].square == make_rational(1, 2));

  TwoModeAmplitudes floats = beamsplitter_fock(1, 1, 0.5);
  CHECK(floats.amps[1] == 0.0);
}

TEST_CASE("single photon splits by the transmission") {
  ExactTwoModeAmplitudes exact = beamsplitter_fock_exact(1, 0, make_rational(1, 2));
  CHECK(exact.amps[0].square == make_rational(1, 2));
  CHECK(exact.amps[1].square == make_rational(1, 2));
  ExactTwoModeAmplitudes uneven = beamsplitter_fock_exact(1, 0, make_rational(1, 3));
  CHECK(uneven.amps[1].square == make_rational(1, 3));  // amps[u]: u in the first port
  CHECK(uneven.amps[0].square == make_rational(2, 3));
}

TEST_CASE("three against three on a balanced coupler") {
  ExactTwoModeAmplitudes exact = beamsplitter_fock_exact(3, 3, make_rational(1, 2));
  std::vector<Rational> squares;
  for (const auto& a : exact.amps) squares.push_back(a.square);
  CHECK(squares == std::vector<Rational>{make_rational(5, 16), 0, make_rational(3, 16),
                                         0, make_rational(3, 16), 0,
                                         make_rational(5, 16)});
}

TEST_CASE("amplitude squares always sum to one") {
  for (int m = 0; m <= 5; ++m)
    for (int n = 0; n <= 5; ++n)
      for (auto T : {make_rational(1, 3), make_rational(1, 2), make_rational(3, 4)}) {
        ExactTwoModeAmplitudes exact = beamsplitter_fock_exact(m, n, T);
        Rational sum = 0;
        for (const auto& a : exact.amps) sum += a.square;
        CHECK(sum == 1);
      }
}

TEST_CASE("amplitudes match the operator-expansion oracle in both conventions") {
  for (int m = 0; m <= 4; ++m)
    for (int n = 0; n <= 4; ++n)
      for (double T : {0.3, 0.5, 0.75}) {
        TwoModeAmplitudes got = beamsplitter_fock(m, n, T);
        auto real_conv = fock_oracle::two_mode_amps(m, n, T, false);
        auto ir_conv = fock_oracle::two_mode_amps(m, n, T, true);
        for (int u = 0; u <= m + n; ++u) {
          CHECK(got.amps[u] == doctest::Approx(real_conv[u].real()).epsilon(1e-12));
          CHECK(real_conv[u].imag() == 0.0);
          // squared amplitudes are convention independent
          CHECK(std::norm(ir_conv[u]) ==
                doctest::Approx(got.amps[u] * got.amps[u]).epsilon(1e-12));
        }
      }
}

TEST_CASE("float amplitudes track the exact ones") {
  for (int m = 0; m <= 5; ++m)
    for (int n = 0; n <= 5; ++n) {
      TwoModeAmplitudes f = beamsplitter_fock(m, n, 0.5);
      ExactTwoModeAmplitudes e = beamsplitter_fock_exact(m, n, make_rational(1, 2));
      for (int u = 0; u <= m + n; ++u)
        CHECK(f.amps[u] == doctest::Approx(e.amps[u].value()).epsilon(1e-12));
    }
}

TEST_CASE("heralding prior matches the four-mode oracle") {
  for (int p : {1, 2, 3, 4})
    for (double leak : {0.3, 0.5, 1.0}) {
      JointPrior got = noon_joint_prior(p, leak);
      auto real_conv = fock_oracle::noon_prior(p, leak, false);
      auto ir_conv = fock_oracle::noon_prior(p, leak, true);
      REQUIRE(got.t_max == 2 * p);
      for (int n1 = 0; n1 <= 2 * p; ++n1)
        for (int n2 = 0; n2 <= 2 * p; ++n2) {
          CHECK(got.probs[n1][n2] ==
                doctest::Approx(real_conv[n1][n2]).epsilon(1e-12));
          CHECK(got.probs[n1][n2] == doctest::Approx(ir_conv[n1][n2]).epsilon(1e-12));
        }
    }
}

TEST_CASE("heralding prior pinned values") {
  ExactJointPrior prior = noon_joint_prior_exact(3, make_rational(1, 2));
  CHECK(prior.probs[1][1] == make_rational(3, 64));
  CHECK(prior.probs[1][2] == make_rational(3, 64));
  CHECK(prior.probs[2][1] == make_rational(3, 64));

  ExactJointPrior tight = noon_joint_prior_exact(1, make_rational(1, 2));
  CHECK(tight.probs[0][0] == make_rational(1, 4));

  // perfect leak toward the detectors: photons bunch, diagonal is empty
  ExactJointPrior full = noon_joint_prior_exact(1, 1);
  CHECK(full.probs[2][0] == make_rational(1, 2));
  CHECK(full.probs[0][2] == make_rational(1, 2));
  CHECK(full.probs[0][0] == 0);
  CHECK(full.probs[1][1] == 0);
}

TEST_CASE("heralding prior is symmetric and normalized") {
  for (int p : {1, 2, 3}) {
    ExactJointPrior prior = noon_joint_prior_exact(p, make_rational(2, 5));
    Rational sum = 0;
    for (int n1 = 0; n1 <= prior.t_max; ++n1)
      for (int n2 = 0; n2 <= prior.t_max; ++n2) {
        sum += prior.probs[n1][n2];
        CHECK(prior.probs[n1][n2] == prior.probs[n2][n1]);
      }
    CHECK(sum == 1);
  }
}

TEST_CASE("heralding marginal is the thinned arm occupation") {
  const int p = 3;
  const Rational leak = make_rational(1, 2);
  ExactJointPrior prior = noon_joint_prior_exact(p, leak);
  ExactTwoModeAmplitudes coupler = beamsplitter_fock_exact(p, p, make_rational(1, 2));
  for (int n1 = 0; n1 <= 2 * p; ++n1) {
    Rational marginal = 0;
    for (int n2 = 0; n2 <= 2 * p; ++n2) marginal += prior.probs[n1][n2];
    Rational want = 0;
    for (int arm = n1; arm <= 2 * p; ++arm)
      want += coupler.amps[arm].square * binom_pmf(n1, arm, leak);
    CHECK(marginal == want);
  }
}

TEST_CASE("ideal single detectors cannot rank the smallest herald candidates") {
  ExactJointPrior prior = noon_joint_prior_exact(3, make_rational(1, 2));
  ExactBank bank{1, 1, 0};
  ExactJointPosterior post = joint_retrodict_exact(bank, bank, prior, 1, 1);
  CHECK(post.probs[1][1] == post.probs[1][2]);
  CHECK(post.probs[1][2] == post.probs[2][1]);
  CHECK(post.probs[0][1] == 0);
  CHECK(post.probs[1][0] == 0);

  // losses break the tie upward: more photons explain a click better
  DetectorBank lossy{1, 0.75, 0.0};
  JointPosterior fpost =
      joint_retrodict(lossy, lossy, noon_joint_prior(3, 0.5), 1, 1);
  CHECK(fpost.probs[1][2] > fpost.probs[1][1]);
  CHECK(fpost.probs[2][1] > fpost.probs[1][1]);
}

TEST_CASE("joint evidence over all click pairs is a distribution") {
  JointPrior prior = noon_joint_prior(2, 0.5);
  DetectorBank bank1{2, 0.7, 0.01};
  DetectorBank bank2{3, 0.6, 0.02};
  double mass = 0.0;
  for (int c1 = 0; c1 <= 2; ++c1)
    for (int c2 = 0; c2 <= 3; ++c2)
      mass += joint_retrodict(bank1, bank2, prior, c1, c2).evidence;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("product priors factor the joint posterior") {
  // independent arms must behave like two independent inversions
  PhotonPrior arm1 = make_custom_prior({1.0, 2.0, 1.0});
  PhotonPrior arm2 = make_custom_prior({2.0, 1.0, 3.0});
  JointPrior prior;
  prior.t_max = 2;
  prior.probs.assign(3, std::vector<double>(3, 0.0));
  for (int n1 = 0; n1 <= 2; ++n1)
    for (int n2 = 0; n2 <= 2; ++n2)
      prior.probs[n1][n2] = arm1.weights[n1] * arm2.weights[n2];

  DetectorBank bank1{2, 0.8, 0.01};
  DetectorBank bank2{2, 0.6, 0.05};
  JointPosterior joint = joint_retrodict(bank1, bank2, prior, 1, 2);
  Posterior solo1 = retrodict(bank1, arm1, 1);
  Posterior solo2 = retrodict(bank2, arm2, 2);
  for (int n1 = 0; n1 <= 2; ++n1)
    for (int n2 = 0; n2 <= 2; ++n2)
      CHECK(joint.probs[n1][n2] ==
            doctest::Approx(solo1.probs[n1] * solo2.probs[n2]).epsilon(1e-12));
}

TEST_CASE("joint mode ties break lexicographically") {
  JointPosterior post;
  post.probs = {{0.0, 0.25}, {0.25, 0.5}};
  JointMode mode = joint_mode(post);
  CHECK(mode.n1 == 1);
  CHECK(mode.n2 == 1);
  post.probs = {{0.5, 0.5}, {0.0, 0.0}};
  mode = joint_mode(post);
  CHECK(mode.n1 == 0);
  CHECK(mode.n2 == 0);
}

TEST_CASE("impossible joint observations are rejected") {
  JointPrior prior = noon_joint_prior(1, 0.5);
  DetectorBank ideal{1, 1.0, 0.0};
  CHECK_THROWS_AS(joint_retrodict(ideal, ideal, prior, 2, 0), std::exception);
  ExactJointPrior eprior = noon_joint_prior_exact(1, 1);
  ExactBank ebank{1, 1, 0};
  // perfect leak: both photons always reach one arm, (1,1) cannot happen
  CHECK_THROWS_AS(joint_retrodict_exact(ebank, ebank, eprior, 1, 1),
                  ImpossibleObservation);
}
