// Scalar statistics used by the experiment suite: regularized incomplete
// beta, Student-t CDF and the pooled (equal-variance) two-sample t-test.
#pragma once

#include <cstddef>
#include <span>

namespace camr {

/// I_x(a, b), evaluated by the Lentz continued fraction to ~1e-15 relative
/// accuracy. Requires x in [0, 1] and a, b > 0.
double regularized_incomplete_beta(double x, double a, double b);

/// CDF of Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

struct TTestResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;  // two-tailed
  double mean_a = 0.0;
  double mean_b = 0.0;
  double sd_a = 0.0;  // sample standard deviations
  double sd_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Equal-variance two-sample t-test with dof = n_a + n_b - 2.
/// Degenerate cases: equal means give t = 0, p = 1 even at zero pooled
/// variance; unequal means at zero pooled variance give p = 0.
/// Throws std::invalid_argument when a sample is empty or n_a + n_b < 3.
TTestResult pooled_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace camr
