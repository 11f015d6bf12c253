#pragma once

#include <span>

namespace saxe {

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
};

/// One-sample Student t-test of `xs` against `null_mean`, df = n - 1.
/// Zero sample variance gives p = 1 when the mean equals the null value and
/// p = 0 otherwise. Requires n >= 2.
TTestResult one_sample_t_test(std::span<const double> xs, double null_mean);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `df`.
double student_t_two_sided_p(double t, double df);

double normal_cdf(double z);

struct MannWhitneyResult {
  double u = 0.0;  // U statistic of the first sample
  double z = 0.0;
  double p_value = 1.0;  // two-sided, normal approximation
};

/// Mann-Whitney U with midranks for ties, the standard tie-corrected
/// variance, and a 0.5 continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

}  // namespace saxe
