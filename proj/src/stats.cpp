#include "polforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polforge::stats {

double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("sample variance needs at least 2 values");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta needs positive parameters");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_upper_tail(double t, double df) {
  if (!(df > 0.0)) throw DomainError("degrees of freedom must be positive");
  const double x = df / (df + t * t);
  const double half_tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
  return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

TTestResult t_test_one_tailed(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("t-test needs at least 2 samples");
  TTestResult r;
  r.n = static_cast<int>(samples.size());
  r.mean = mean(samples);
  const double var = sample_variance(samples);
  if (!(var > 0.0)) throw DomainError("t-test is degenerate for zero-variance samples");
  r.stddev = std::sqrt(var);
  r.t = r.mean * std::sqrt(static_cast<double>(r.n)) / r.stddev;
  r.p_one_tailed = student_t_upper_tail(r.t, static_cast<double>(r.n - 1));
  return r;
}

double quantile(std::vector<double> values, double tau) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(tau * static_cast<double>(values.size())));
  return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
}

Histogram fd_histogram(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("histogram of an empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();

  Histogram h;
  if (hi == lo) {
    h.edges = {lo, lo + 1.0};
    h.counts = {static_cast<std::int64_t>(xs.size())};
    return h;
  }

  const double q1 = sorted[sorted.size() / 4];
  const double q3 = sorted[(3 * sorted.size()) / 4];
  double width = 2.0 * (q3 - q1) / std::cbrt(static_cast<double>(xs.size()));
  if (!(width > 0.0)) width = (hi - lo) / std::sqrt(static_cast<double>(xs.size()));
  const int bins = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));

  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) {
    h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / bins;
  }
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double x : xs) {
    int b = static_cast<int>(static_cast<double>(bins) * (x - lo) / (hi - lo));
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

}  // namespace polforge::stats
