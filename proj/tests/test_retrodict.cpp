#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "clickstat/combinatorics.hpp"
#include "clickstat/likelihood.hpp"
#include "clickstat/retrodict.hpp"

using namespace clickstat;

TEST_CASE("no clicks on an ideal bank pins the vacuum") {
  DetectorBank bank{4, 1.0, 0.0};
  Posterior post = retrodict(bank, make_poisson_prior(2.0), 0);
  CHECK(post.probs[0] == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t n = 1; n < post.probs.size(); ++n) CHECK(post.probs[n] == 0.0);
}

TEST_CASE("flat prior reproduces the likelihood shape") {
  DetectorBank bank{5, 0.7, 0.02};
  PhotonPrior flat = make_custom_prior(std::vector<double>(13, 1.0));
  Posterior post = retrodict(bank, flat, 3);
  std::vector<double> like;
  for (int n = 0; n <= 12; ++n) like.push_back(pmf_noisy(bank, n).probs[3]);
  double norm = 0.0;
  for (double l : like) norm += l;
  for (int n = 0; n <= 12; ++n)
    CHECK(post.probs[n] == doctest::Approx(like[n] / norm).epsilon(1e-12));
}

TEST_CASE("poisson closed form matches the generic path on ideal banks") {
  for (int d : {1, 4, 7})
    for (double mu : {0.5, 2.0}) {
      DetectorBank bank{d, 1.0, 0.0};
      PhotonPrior prior = make_poisson_prior(mu, 1e-15);
      for (int c = 0; c <= std::min(d, 4); ++c) {
        Posterior post = retrodict(bank, prior, c);
        for (int n = c; n <= std::min(prior.n_max, 30); ++n) {
          double want = retrodict_poisson_ideal(d, mu, c, n);
          CHECK(post.probs[n] == doctest::Approx(want).epsilon(1e-12));
        }
      }
    }
}

TEST_CASE("poisson closed form is a distribution over photon number") {
  for (int c : {0, 1, 3}) {
    double mass = 0.0;
    for (int n = 0; n <= 120; ++n) mass += retrodict_poisson_ideal(4, 2.0, c, n);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  // zero-mean source: only the vacuum exists
  CHECK(retrodict_poisson_ideal(4, 0.0, 0, 0) == 1.0);
  CHECK(retrodict_poisson_ideal(4, 0.0, 0, 2) == 0.0);
  CHECK_THROWS_AS(retrodict_poisson_ideal(4, 0.0, 1, 1), ImpossibleObservation);
}

TEST_CASE("thermal closed form equals exact inversion on the same window") {
  // Window-renormalized closed form and the generic exact posterior are
  // the same rational number, term by term.
  const int window = 25;
  for (int d : {1, 2, 4, 8})
    for (const Rational& mu : {Rational(1), make_rational(1, 2)})
      for (int c = 0; c <= std::min(d, 3); ++c) {
        ExactBank bank{d, 1, 0};
        ExactPrior prior = exact_thermal_prior(mu, window);
        ExactPosterior post = retrodict_exact(bank, prior, c);
        std::vector<Rational> closed(window + 1, Rational(0));
        Rational norm = 0;
        for (int n = c; n <= window; ++n) {
          closed[n] = retrodict_thermal_ideal_exact(d, mu, c, n);
          norm += closed[n];
        }
        for (int n = 0; n <= window; ++n)
          CHECK(post.probs[n] == closed[n] / norm);
      }
}

TEST_CASE("thermal closed form float backend tracks the exact one") {
  for (int n = 1; n <= 40; ++n)
    CHECK(retrodict_thermal_ideal(2, 1.0, 1, n) ==
          doctest::Approx(to_double(retrodict_thermal_ideal_exact(2, 1, 1, n)))
              .epsilon(1e-13));
  // single detector, mean one: P(N | click) = 2^-N
  for (int n = 1; n <= 20; ++n)
    CHECK(retrodict_thermal_ideal(1, 1.0, 1, n) ==
          doctest::Approx(std::pow(2.0, -n)).epsilon(1e-13));
}

TEST_CASE("printed form of the thermal posterior normalizes to C!, not 1") {
  // The closed form with a leading C! attached sums to exactly C!.
  // Exact partial sums plus a geometric tail bound decide the limit:
  // S(N,C) <= C^N / C!  gives  sum_{N>M} term(N) <= (Cx)^(M+1) / (C! x^C (1-Cx)).
  const Rational x = make_rational(1, 8);  // mu = 1, four detectors
  const int M = 40;
  StirlingTable stirling(M, 4);
  for (int c = 2; c <= 3; ++c) {
    Rational prefix = 1;
    for (int j = 1; j <= c; ++j) prefix *= 1 - j * x;
    Rational partial = 0;
    for (int n = c; n <= M; ++n)
      partial += Rational(stirling.at(n, c)) * rational_pow(x, n - c) * prefix;
    Rational tail_bound = rational_pow(c * x, M + 1) /
                          (Rational(factorial(c)) * rational_pow(x, c) * (1 - c * x));
    // the correct form tends to 1 ...
    CHECK(partial < 1);
    CHECK(1 - partial <= tail_bound);
    // ... so the printed form tends to C!, far from a distribution
    Rational printed_partial = Rational(factorial(c)) * partial;
    CHECK(printed_partial > factorial(c) - factorial(c) * tail_bound);
    CHECK(printed_partial < factorial(c));
    CHECK(Rational(factorial(c)) != 1);
  }
}

TEST_CASE("posterior summary") {
  Posterior post;
  post.probs = {0.2, 0.4, 0.4};
  PosteriorSummary s = posterior_summary(post);
  CHECK(s.mode == 1);  // tie breaks toward smaller N
  CHECK(s.mass_at_mode == 0.4);
  CHECK(s.mean == doctest::Approx(1.2));
}

TEST_CASE("custom prior scaling does not move the posterior") {
  DetectorBank bank{3, 0.8, 0.01};
  Posterior a = retrodict(bank, make_custom_prior({1.0, 2.0, 3.0, 1.0}), 2);
  Posterior b = retrodict(bank, make_custom_prior({2.0, 4.0, 6.0, 2.0}), 2);
  for (std::size_t n = 0; n < a.probs.size(); ++n) CHECK(a.probs[n] == b.probs[n]);
}

TEST_CASE("evidence over all click counts is a distribution") {
  DetectorBank bank{4, 0.65, 0.03};
  PhotonPrior prior = make_poisson_prior(1.7);
  double mass = 0.0;
  for (int c = 0; c <= 4; ++c)
    mass += std::exp(retrodict(bank, prior, c).log_evidence);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("impossible observations are rejected") {
  DetectorBank bank{2, 1.0, 0.0};
  PhotonPrior vacuum = make_custom_prior({1.0});
  CHECK_THROWS_AS(retrodict(bank, vacuum, 1), ImpossibleObservation);
  ExactBank exact{2, 1, 0};
  ExactPrior evacuum = exact_custom_prior({Rational(1)});
  CHECK_THROWS_AS(retrodict_exact(exact, evacuum, 1), ImpossibleObservation);
}

TEST_CASE("float inversion tracks exact inversion on a noisy bank") {
  DetectorBank bank{6, 0.6, 0.01};
  ExactBank exact{6, rational_from_double(0.6), rational_from_double(0.01)};
  PhotonPrior prior = make_poisson_prior(2.0, 1e-13);
  ExactPrior eprior = exact_poisson_prior(rational_from_double(2.0), prior.n_max);
  for (int c = 0; c <= 6; ++c) {
    Posterior f = retrodict(bank, prior, c);
    ExactPosterior e = retrodict_exact(exact, eprior, c);
    for (int n = 0; n <= prior.n_max; ++n) {
      double want = to_double(e.probs[n]);
      if (want == 0.0)
        CHECK(f.probs[n] == 0.0);
      else
        CHECK(f.probs[n] == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("likelihood evaluator agrees with the direct model at small n") {
  for (int d : {1, 4, 16})
    for (int c = 0; c <= std::min(d, 3); ++c) {
      DetectorBank bank{d, 0.6, 0.01};
      LikelihoodEvaluator evaluator(bank, c);
      for (int n = 0; n <= 40; ++n) {
        double want = pmf_noisy(bank, n).probs[c];
        double got = std::exp(evaluator.log_prob(n));
        if (want == 0.0)
          CHECK(got == 0.0);
        else
          CHECK(got == doctest::Approx(want).epsilon(1e-10));
      }
    }
}

TEST_CASE("likelihood routes agree across the crossover") {
  // Exact lossy oracle straddling table_limit: both routes must match it.
  DetectorBank bank{4, 0.75, 0.0};
  Rational eta = make_rational(3, 4);
  for (int c : {1, 3}) {
    LikelihoodEvaluator evaluator(bank, c);
    const int limit = evaluator.table_limit();
    REQUIRE(limit >= 2);
    for (int n : {limit - 2, limit - 1, limit, limit + 1, limit + 50}) {
      Rational want = pmf_lossy_exact(4, n, eta).probs[c];
      double got = std::exp(evaluator.log_prob(n));
      CHECK(got == doctest::Approx(to_double(want)).epsilon(1e-9));
    }
  }
}

TEST_CASE("likelihood envelope really bounds the column") {
  DetectorBank bank{8, 0.6, 0.01};
  LikelihoodEvaluator evaluator(bank, 3);
  for (int n = 3; n <= 2000; n += 97)
    CHECK(evaluator.log_prob(n) <=
          evaluator.envelope_log_k() + n * evaluator.envelope_log_base() + 1e-9);
  CHECK(evaluator.envelope_log_base() < 0.0);
}

TEST_CASE("parallel and serial likelihood fills are identical") {
  DetectorBank bank{16, 0.75, 1e-4};
  std::vector<double> par = log_likelihood_column(bank, 2, 6000);
  std::vector<double> ser = log_likelihood_column_serial(bank, 2, 6000);
  CHECK(par == ser);
}

TEST_CASE("dark-only bank has an n-independent likelihood") {
  DetectorBank bank{5, 0.0, 0.2};
  LikelihoodEvaluator evaluator(bank, 2);
  double expect = std::log(to_double(
      binom_pmf(2, 5, make_rational(1, 5))));
  for (int n : {0, 10, 1000, 100000})
    CHECK(evaluator.log_prob(n) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("huge prior windows stop early but keep the head exact") {
  // gain 6 thermal window is over a million entries; the envelope stops
  // the evidence sum long before that without moving the head mass
  PhotonPrior big = make_squeezed_prior(6.0);
  REQUIRE(big.n_max > 200000);
  DetectorBank bank{4, 0.75, 0.0};
  Posterior post = retrodict(bank, big, 1);
  PhotonPrior small = make_squeezed_prior(6.0, 1e-8);
  Posterior head = retrodict(bank, small, 1);
  for (int n = 0; n <= 40; ++n)
    CHECK(post.probs[n] == doctest::Approx(head.probs[n]).epsilon(1e-7));
  double mass = 0.0;
  for (double p : post.probs) mass += p;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}
