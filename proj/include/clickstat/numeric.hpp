#pragma once

#include <limits>
#include <span>

namespace clickstat {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; handles -inf operands.
double log_add_exp(double a, double b);

/// log(sum exp(v)) with a max shift and compensated summation, so the
/// result does not depend on how callers chunk their accumulation.
double log_sum_exp(std::span<const double> values);

/// Streaming variant for block-wise accumulation (used by the evidence
/// loop, which must stop early without a second pass).
class StreamingLogSumExp {
 public:
  void add(double log_term);
  double value() const;  // kNegInf when nothing positive was added

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;  // sum of exp(term - max_)
  double carry_ = 0.0;
};

double log_factorial(int n);
double log_binomial(int n, int k);  // -inf for k < 0 or k > n

/// log of the binomial pmf C(n,m) xi^m (1-xi)^(n-m).
/// xi == 0 and xi == 1 degenerate to point masses at m = 0 and m = n.
double log_binom_pmf(int m, int n, double xi);

/// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_pvalue(double chi2, int dof);

}  // namespace clickstat
