#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "polforge/errors.hpp"

namespace polforge {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IntVector = Eigen::VectorXi;
using Index = std::int64_t;

enum class Activation : std::uint8_t { Tanh = 0, Relu = 1 };

inline std::string to_string(Activation a) {
  return a == Activation::Tanh ? "tanh" : "relu";
}

/// Dense feed-forward architecture: layer sizes [in, hidden..., out] plus the
/// hidden activation. Every layer carries a weight matrix and a bias vector.
struct Architecture {
  std::vector<int> layer_sizes;
  Activation activation = Activation::Tanh;

  bool operator==(const Architecture&) const = default;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int layer_count() const { return static_cast<int>(layer_sizes.size()) - 1; }

  Index parameter_count() const {
    Index n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
      n += static_cast<Index>(layer_sizes[l]) * layer_sizes[l + 1] + layer_sizes[l + 1];
    }
    return n;
  }

  void validate() const {
    if (layer_sizes.size() < 2) throw ConfigError("architecture needs at least input and output layers");
    for (int s : layer_sizes) {
      if (s < 1) throw ConfigError("architecture layer sizes must be positive");
    }
  }
};

/// A point in weight space: the flat parameter vector in canonical layer
/// order (per layer: row-major weight matrix, then bias).
struct ModelState {
  Vector weights;
  Architecture arch;

  void validate() const {
    arch.validate();
    if (weights.size() != arch.parameter_count()) {
      throw ShapeError("weight vector length " + std::to_string(weights.size()) +
                       " does not match architecture parameter count " +
                       std::to_string(arch.parameter_count()));
    }
    if (!weights.allFinite()) throw ShapeError("weights contain NaN or Inf");
  }
};

/// A minibatch: dataset row ids plus the gathered features and labels.
struct Batch {
  std::vector<Index> indices;
  Matrix features;  // rows x input_dim
  IntVector labels;

  Index rows() const { return static_cast<Index>(indices.size()); }

  void validate() const {
    if (features.rows() != static_cast<Eigen::Index>(indices.size()) ||
        labels.size() != static_cast<Eigen::Index>(indices.size())) {
      throw ShapeError("batch indices, features and labels must have equal leading length");
    }
  }
};

enum class Optimizer : std::uint8_t { PlainSgd = 0 };

/// Per-step training metadata logged into the proof.
struct StepMetadata {
  double learning_rate = 0.0;
  std::int32_t batch_size = 0;
  Optimizer optimizer = Optimizer::PlainSgd;
  std::uint64_t seed = 0;
  std::int64_t step_index = 0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  }
};

}  // namespace polforge
