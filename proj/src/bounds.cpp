#include "polforge/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "polforge/stats.hpp"

namespace polforge::bounds {

CostDistributionSpec CostDistributionSpec::lognormal(double mu, double sigma) {
  CostDistributionSpec d;
  d.kind = Kind::Lognormal;
  d.log_mu = mu;
  d.log_sigma = sigma;
  return d;
}

CostDistributionSpec CostDistributionSpec::gamma(double shape, double scale) {
  CostDistributionSpec d;
  d.kind = Kind::Gamma;
  d.shape = shape;
  d.scale = scale;
  return d;
}

CostDistributionSpec CostDistributionSpec::point_mass(double value) {
  CostDistributionSpec d;
  d.kind = Kind::PointMass;
  d.value = value;
  return d;
}

CostDistributionSpec CostDistributionSpec::empirical(std::vector<double> samples) {
  CostDistributionSpec d;
  d.kind = Kind::Empirical;
  d.samples = std::move(samples);
  return d;
}

void CostDistributionSpec::validate() const {
  switch (kind) {
    case Kind::Lognormal:
      if (!(log_sigma > 0.0)) throw DomainError("lognormal sigma must be positive");
      break;
    case Kind::Gamma:
      if (!(shape > 0.0) || !(scale > 0.0)) throw DomainError("gamma parameters must be positive");
      break;
    case Kind::PointMass:
      if (!(value > 0.0)) throw DomainError("point mass must be positive");
      break;
    case Kind::Empirical:
      if (samples.size() < 2) throw DomainError("empirical distribution needs at least 2 samples");
      break;
  }
  if (!(mean() > 0.0)) throw DomainError("cost distribution must have positive mean");
  if (variance() < 0.0) throw DomainError("cost distribution variance must be nonnegative");
}

double CostDistributionSpec::mean() const {
  switch (kind) {
    case Kind::Lognormal: return std::exp(log_mu + 0.5 * log_sigma * log_sigma);
    case Kind::Gamma: return shape * scale;
    case Kind::PointMass: return value;
    case Kind::Empirical: return stats::mean(samples);
  }
  return 0.0;
}

double CostDistributionSpec::variance() const {
  switch (kind) {
    case Kind::Lognormal: {
      const double s2 = log_sigma * log_sigma;
      return (std::exp(s2) - 1.0) * std::exp(2.0 * log_mu + s2);
    }
    case Kind::Gamma: return shape * scale * scale;
    case Kind::PointMass: return 0.0;
    case Kind::Empirical: return stats::sample_variance(samples);
  }
  return 0.0;
}

namespace {

// Marsaglia-Tsang gamma sampler (shape boosted below 1).
double sample_gamma(double shape, double scale, Rng& rng) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return sample_gamma(shape + 1.0, scale, rng) * std::pow(u <= 0.0 ? 1e-300 : u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

}  // namespace

double CostDistributionSpec::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Lognormal: return std::exp(log_mu + log_sigma * rng.normal());
    case Kind::Gamma: return sample_gamma(shape, scale, rng);
    case Kind::PointMass: return value;
    case Kind::Empirical:
      return samples[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(samples.size()) - 1))];
  }
  return 0.0;
}

std::string CostDistributionSpec::name() const {
  switch (kind) {
    case Kind::Lognormal: return "lognormal";
    case Kind::Gamma: return "gamma";
    case Kind::PointMass: return "point-mass";
    case Kind::Empirical: return "empirical";
  }
  return "?";
}

StabilityResult stability_zeta(double var_p, double e, double c, double var_f) {
  if (!(e > 0.0)) throw DomainError("expected cost must be positive");
  if (var_p < 0.0 || var_f < 0.0) throw DomainError("variances must be nonnegative");
  if (!(c >= 0.0 && c < 1.0)) throw DomainError("c must lie in [0, 1)");

  StabilityResult r;
  r.a = std::sqrt(3.0 * var_f);
  const double denom = e * (1.0 - c) + r.a;
  if (denom <= 0.0) {
    r.unbounded = true;
    r.zeta = std::numeric_limits<double>::infinity();
    return r;
  }
  r.zeta = var_p / (denom * denom);
  return r;
}

QueryBoundResult query_lower_bound(double var, double e, double c) {
  if (!(e > 0.0)) throw DomainError("expected cost must be positive");
  if (var < 0.0) throw DomainError("variance must be nonnegative");
  if (!(c >= 0.0 && c < 1.0)) throw DomainError("c must lie in [0, 1)");

  QueryBoundResult r;
  r.p = var / ((1.0 - c) * (1.0 - c) * e * e);
  if (r.p >= 1.0) {
    r.vacuous = true;
    r.n = 0.0;
    return r;
  }
  if (r.p == 0.0) {
    r.unbounded = true;
    r.n = std::numeric_limits<double>::infinity();
    return r;
  }
  r.n = std::log(1.0 / 3.0) / std::log1p(-r.p);
  return r;
}

TailValidation mc_validate_tail(const CostDistributionSpec& dist, double c, std::int64_t trials,
                                Rng& rng, int report_blocks) {
  dist.validate();
  if (!(c >= 0.0 && c < 1.0)) throw DomainError("c must lie in [0, 1)");
  if (trials < 10000) throw DomainError("mc_validate_tail needs at least 1e4 trials");
  if (report_blocks < 1) throw DomainError("need at least one report block");

  const double e = dist.mean();
  const double cutoff = c * e;

  TailValidation out;
  out.bound_p = dist.variance() / ((1.0 - c) * (1.0 - c) * e * e);

  std::int64_t hits = 0;
  const std::int64_t block_size = (trials + report_blocks - 1) / report_blocks;
  std::int64_t block_hits = 0;
  std::int64_t block_n = 0;
  int block_id = 0;
  for (std::int64_t i = 0; i < trials; ++i) {
    const bool hit = dist.sample(rng) <= cutoff;
    hits += hit ? 1 : 0;
    block_hits += hit ? 1 : 0;
    ++block_n;
    if (block_n == block_size || i + 1 == trials) {
      out.blocks.push_back(TailBlock{block_id++,
                                     static_cast<double>(block_hits) / static_cast<double>(block_n),
                                     out.bound_p});
      block_hits = 0;
      block_n = 0;
    }
  }
  out.empirical_p = static_cast<double>(hits) / static_cast<double>(trials);
  out.standard_error =
      std::sqrt(out.empirical_p * (1.0 - out.empirical_p) / static_cast<double>(trials));
  out.holds = out.empirical_p <= out.bound_p + 3.0 * out.standard_error;
  return out;
}

double alpha_for_angle(double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2.0)) {
    throw DomainError("alpha_for_angle covers theta in (0, pi/2); supply alpha directly otherwise");
  }
  return std::sin(theta);
}

}  // namespace polforge::bounds
