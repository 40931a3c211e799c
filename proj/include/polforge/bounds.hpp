#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "polforge/rng.hpp"
#include "polforge/errors.hpp"

namespace polforge::bounds {

/// Cost distribution over proofs: built-in positive right-skewed families
/// plus a point mass and an empirical sample mode.
struct CostDistributionSpec {
  enum class Kind : std::uint8_t { Lognormal = 0, Gamma = 1, PointMass = 2, Empirical = 3 };

  Kind kind = Kind::PointMass;
  double log_mu = 0.0;    // lognormal
  double log_sigma = 1.0;
  double shape = 1.0;     // gamma
  double scale = 1.0;
  double value = 1.0;     // point mass
  std::vector<double> samples;  // empirical

  static CostDistributionSpec lognormal(double mu, double sigma);
  static CostDistributionSpec gamma(double shape, double scale);
  static CostDistributionSpec point_mass(double value);
  static CostDistributionSpec empirical(std::vector<double> samples);

  double mean() const;
  double variance() const;
  double sample(Rng& rng) const;
  std::string name() const;
  void validate() const;
};

struct StabilityResult {
  double zeta = 0.0;
  double a = 0.0;
  bool unbounded = false;
};

/// a = sqrt(3*var_f); zeta = var_p / (e*(1-c) + a)^2.
StabilityResult stability_zeta(double var_p, double e, double c, double var_f);

struct QueryBoundResult {
  double p = 0.0;        // tail bound on drawing a c-cheap proof per query
  double n = 0.0;        // query lower bound, +inf when p == 0
  bool unbounded = false;
  bool vacuous = false;  // p >= 1: the Markov bound carries no information
};

/// p = var / ((1-c)^2 e^2); n = log(1/3) / log(1-p).
QueryBoundResult query_lower_bound(double var, double e, double c);

struct TailBlock {
  int block = 0;
  double empirical_p = 0.0;
  double bound_p = 0.0;
};

struct TailValidation {
  double empirical_p = 0.0;
  double bound_p = 0.0;
  double standard_error = 0.0;
  bool holds = false;
  std::vector<TailBlock> blocks;
};

/// Samples the cost distribution and checks the Markov tail bound
/// P(C <= c*E) <= Var/((1-c)^2 E^2) empirically. holds is true when the
/// empirical fraction stays within 3 standard errors of the bound.
TailValidation mc_validate_tail(const CostDistributionSpec& dist, double c, std::int64_t trials,
                                Rng& rng, int report_blocks = 10);

/// Scaling factor for the angle-bounding acceptance rule: alpha = sin(theta)
/// guarantees that |g - g'| < alpha*min(|g|,|g'|) implies angle(g,g') <=
/// theta, for theta in (0, pi/2).
double alpha_for_angle(double theta);

}  // namespace polforge::bounds
