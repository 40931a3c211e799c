#pragma once

#include <cstdint>
#include <vector>

#include "polforge/cost_ledger.hpp"
#include "polforge/dataset.hpp"
#include "polforge/noise.hpp"
#include "polforge/rng.hpp"
#include "polforge/types.hpp"

namespace polforge::tinytrain {

/// Glorot-style random initialization (per-layer std init_std/sqrt(fan_in)).
ModelState init_model(const Architecture& arch, std::uint64_t seed, double init_std = 1.0);

/// Mean cross-entropy of the batch under softmax outputs. Ledger: 1 forward.
double forward(const ModelState& model, const Batch& batch, CostLedger& ledger);

/// Gradient of the mean cross-entropy w.r.t. the flat weights.
/// Ledger: 1 forward + 1 backward (3 FP total). Optionally reports the loss.
Vector backward(const ModelState& model, const Batch& batch, CostLedger& ledger,
                double* loss_out = nullptr);

/// Gradient of the mean cross-entropy w.r.t. the batch features, flattened
/// row-major. Ledger: 1 forward + 1 input-grad.
Matrix input_gradient(const ModelState& model, const Batch& batch, CostLedger& ledger);

/// One plain-SGD move: w <- w - lr * grad.
void sgd_step_inplace(Vector& weights, const Vector& grad, double lr);

/// k plain-SGD steps from `model`, one batch per step, one noise draw per
/// step. Deterministic given the model, batches, metadata and rng state.
ModelState update_k(const ModelState& model, const std::vector<Batch>& batches,
                    const StepMetadata& meta, int k, const NoiseModel& noise, Rng& noise_rng,
                    CostLedger& ledger);

/// Linear blend (1-t)*a + t*b. Ledger: 1 interpolate.
ModelState interpolate(const ModelState& a, const ModelState& b, double t, CostLedger& ledger);

struct TrainConfig {
  Architecture arch;
  int epochs = 1;
  int batch_size = 1;
  double lr = 0.1;
  double lr_decay = 1.0;  // per-epoch multiplier
  double init_std = 1.0;
  std::uint64_t init_seed = 1;
  std::uint64_t shuffle_seed = 2;
  std::uint64_t noise_seed = 3;
  NoiseModel noise;

  void validate() const;
};

struct TrainResult {
  Architecture arch;
  std::vector<Vector> trajectory;            // T+1 states, index = step
  std::vector<std::vector<Index>> schedule;  // per-step batch row ids
  std::vector<StepMetadata> metadata;        // per-step
  CostLedger ledger;

  std::int64_t total_steps() const { return static_cast<std::int64_t>(schedule.size()); }
  ModelState state_at(std::int64_t t) const { return ModelState{trajectory.at(static_cast<std::size_t>(t)), arch}; }
  ModelState final_state() const { return ModelState{trajectory.back(), arch}; }
};

std::int64_t steps_per_epoch(Index rows, int batch_size);

/// Full SGD run over the dataset: seeded init, seeded per-epoch shuffles,
/// per-step noise injection. Stores every step's weights.
TrainResult train(const TrainConfig& config, const Dataset& data);

}  // namespace polforge::tinytrain
