#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polforge/errors.hpp"

namespace polforge::stats {

double mean(std::span<const double> xs);
/// Unbiased (n-1) sample variance.
double sample_variance(std::span<const double> xs);

struct TTestResult {
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double t = 0.0;
  double p_one_tailed = 0.0;
};

/// One-sample one-tailed t-test of H0: mean = 0 against mean > 0.
/// Throws DomainError for n < 2 or zero variance.
TTestResult t_test_one_tailed(std::span<const double> samples);

/// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction,
/// absolute error well below 1e-8 over the tested range.
double regularized_incomplete_beta(double a, double b, double x);

/// Upper tail P(T > t) of Student's t with df degrees of freedom.
double student_t_upper_tail(double t, double df);

/// Empirical tau-quantile (smallest order statistic covering tau mass).
double quantile(std::vector<double> values, double tau);

struct Histogram {
  std::vector<double> edges;        // size bins+1
  std::vector<std::int64_t> counts; // size bins
};

/// Freedman-Diaconis binning; degenerates to a single bin for constant data.
Histogram fd_histogram(std::span<const double> xs);

}  // namespace polforge::stats
