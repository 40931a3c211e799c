#include "polforge/noise.hpp"

#include <cmath>

namespace polforge {

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::IsotropicGaussian: return "isotropic-gaussian";
    case NoiseKind::AnisotropicAlongUpdate: return "anisotropic-along-update";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "none") return NoiseKind::None;
  if (s == "isotropic-gaussian") return NoiseKind::IsotropicGaussian;
  if (s == "anisotropic-along-update") return NoiseKind::AnisotropicAlongUpdate;
  throw ConfigError("unknown noise kind: " + s);
}

Vector NoiseModel::sample(const Vector& update, Rng& rng) const {
  const Eigen::Index n = update.size();
  if (!active()) return Vector::Zero(n);

  const double unorm = update.norm();
  const double sigma = relative ? scale * unorm / std::sqrt(static_cast<double>(n)) : scale;
  if (sigma == 0.0) return Vector::Zero(n);

  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();

  if (kind == NoiseKind::IsotropicGaussian || unorm == 0.0) {
    return sigma * z;
  }

  // Anisotropic: variance sigma^2*ratio along the update direction,
  // sigma^2 orthogonal to it.
  const Vector e = update / unorm;
  const double along = e.dot(z);
  const double sigma_par = sigma * std::sqrt(anisotropy_ratio);
  return sigma * z + (sigma_par - sigma) * along * e;
}

}  // namespace polforge
