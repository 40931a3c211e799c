#pragma once

#include <cstdint>
#include <string>

#include "polforge/rng.hpp"
#include "polforge/types.hpp"

namespace polforge {

enum class NoiseKind : std::uint8_t { None = 0, IsotropicGaussian = 1, AnisotropicAlongUpdate = 2 };

std::string to_string(NoiseKind k);
NoiseKind noise_kind_from_string(const std::string& s);

/// Simulated reproduction noise injected after each SGD step. With
/// relative=true the per-coordinate standard deviation is scale*|u|/sqrt(n),
/// so the expected norm of the perturbation is roughly scale times the norm
/// of the update u. The anisotropic kind scales variance along the update
/// direction by anisotropy_ratio (<= 1: less variance along the update than
/// orthogonal to it).
struct NoiseModel {
  NoiseKind kind = NoiseKind::None;
  double scale = 0.0;
  double anisotropy_ratio = 1.0;
  bool relative = true;

  void validate() const {
    if (scale < 0.0) throw ConfigError("noise scale must be nonnegative");
    if (anisotropy_ratio <= 0.0 || anisotropy_ratio > 1.0) {
      throw ConfigError("anisotropy_ratio must be in (0, 1]");
    }
  }

  bool active() const { return kind != NoiseKind::None && scale > 0.0; }

  /// Draw one perturbation for a step whose weight update was `update`.
  /// Returns the zero vector for kind=None. Consumes no randomness when
  /// inactive so ledgers and rng streams stay aligned across noise settings.
  Vector sample(const Vector& update, Rng& rng) const;
};

}  // namespace polforge
