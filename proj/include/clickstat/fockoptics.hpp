#pragma once

#include <vector>

#include "clickstat/bignum.hpp"
#include "clickstat/clickmodel.hpp"

namespace clickstat {

/// sign * sqrt(square).  Beam-splitter amplitudes of Fock states are
/// square roots of rationals up to sign, so probabilities stay exact.
struct SignedSqrt {
  int sign = 0;         // -1, 0, +1
  Rational square = 0;  // sign == 0 iff square == 0

  double value() const;
};

/// Output of |m, n> through a lossless two-port coupler; amps[u] is the
/// amplitude of |u, total - u>.
struct TwoModeAmplitudes {
  int total = 0;
  std::vector<double> amps;
};

struct ExactTwoModeAmplitudes {
  int total = 0;
  std::vector<SignedSqrt> amps;
};

/// Real orthogonal convention: a1 -> t a1' + r a2', a2 -> -r a1' + t a2'
/// with t = sqrt(transmission).  Squared amplitudes are convention
/// independent (checked against an i*r convention in the tests).
TwoModeAmplitudes beamsplitter_fock(int m, int n, double transmission);
ExactTwoModeAmplitudes beamsplitter_fock_exact(int m, int n,
                                               const Rational& transmission);

/// Joint distribution of photon numbers leaked toward the two detector
/// stations when |p, p> passes the first 50:50 coupler and each output
/// arm leaks through a splitter of the given transmissivity.
struct JointPrior {
  int t_max = 0;  // 2p
  std::vector<std::vector<double>> probs;  // (t_max+1) x (t_max+1)
};

struct ExactJointPrior {
  int t_max = 0;
  std::vector<std::vector<Rational>> probs;
};

JointPrior noon_joint_prior(int photons_per_port, double leak_transmissivity);
ExactJointPrior noon_joint_prior_exact(int photons_per_port,
                                       const Rational& leak_transmissivity);

/// P(N1, N2 | C1, C2) for two independent banks watching the two arms.
struct JointPosterior {
  int clicks1 = 0;
  int clicks2 = 0;
  std::vector<std::vector<double>> probs;
  double evidence = 0.0;
};

struct ExactJointPosterior {
  int clicks1 = 0;
  int clicks2 = 0;
  std::vector<std::vector<Rational>> probs;
  Rational evidence = 0;
};

JointPosterior joint_retrodict(const DetectorBank& bank1, const DetectorBank& bank2,
                               const JointPrior& prior, int clicks1, int clicks2);
ExactJointPosterior joint_retrodict_exact(const ExactBank& bank1,
                                          const ExactBank& bank2,
                                          const ExactJointPrior& prior, int clicks1,
                                          int clicks2);

/// argmax cell of a joint posterior, ties toward lexicographically
/// smaller (N1, N2).
struct JointMode {
  int n1 = 0;
  int n2 = 0;
  double mass = 0.0;
};
JointMode joint_mode(const JointPosterior& posterior);

}  // namespace clickstat
