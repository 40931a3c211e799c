#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polforge/proofchain.hpp"

namespace polforge::verifier {

enum class Metric : std::uint8_t { L1 = 0, L2 = 1, Linf = 2, CosineDistance = 3 };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

double distance(Metric m, const Vector& a, const Vector& b);
double distance(Metric m, const ModelState& a, const ModelState& b);

/// Norm used to rank updates: the lp norm for lp metrics, l2 for the cosine
/// metric (which induces no norm).
double metric_norm(Metric m, const Vector& v);

struct ThresholdMode {
  enum class Kind : std::uint8_t { Static = 0, Adaptive = 1, PerStep = 2 };
  Kind kind = Kind::Static;
  double delta = 0.0;                 // Static
  double alpha = 0.0;                 // Adaptive: accept iff d < alpha*min(|g|,|g'|)
  std::vector<double> per_step;       // PerStep: one threshold per verified checkpoint

  static ThresholdMode static_delta(double delta) { return {Kind::Static, delta, 0.0, {}}; }
  static ThresholdMode adaptive(double alpha) { return {Kind::Adaptive, 0.0, alpha, {}}; }
  static ThresholdMode per_step_list(std::vector<double> deltas) {
    return {Kind::PerStep, 0.0, 0.0, std::move(deltas)};
  }
};

struct VerificationPolicy {
  Metric metric = Metric::L2;
  ThresholdMode threshold = ThresholdMode::static_delta(1e-3);
  int q = 0;  // 0 = verify every checkpoint, otherwise top-q per epoch
  NoiseModel noise;
  std::uint64_t noise_seed = 0;
};

struct StepVerdict {
  std::int64_t step = 0;
  double proof_update_norm = 0.0;       // |g_t|
  double reproduced_update_norm = 0.0;  // |g'_t|
  double distance = 0.0;                // d(W_{t+k}, W'_{t+k})
  double threshold_used = 0.0;
  bool accept = false;
};

struct Violation {
  std::int64_t step = 0;
  std::string message;
};

struct VerificationReport {
  std::vector<StepVerdict> verdicts;
  std::vector<double> normalized_errors;  // per verdict, filled when rd > 0 was supplied
  std::optional<double> reference_distance;
  std::vector<Violation> violations;
  bool valid = false;
  double init_final_distance = 0.0;  // d(W_0, W_T), informational
  CostLedger ledger;

  double max_distance() const;
  double max_normalized_error() const;
  double acceptance_rate() const;
};

/// Replay k steps from the checkpoint at t using the committed batches,
/// logged metadata and the verifier's own noise model.
ModelState reproduce_update(const proofchain::Proof& proof, std::int64_t t,
                            const DatasetProvider& provider, const VerificationPolicy& policy,
                            Rng& noise_rng, CostLedger& ledger);

/// Pure decision rule on one verified transition. `ordinal` indexes the
/// verified checkpoint sequence (used by per-step threshold lists).
StepVerdict verify_step(std::int64_t step, double dist, double proof_update_norm,
                        double reproduced_update_norm, const VerificationPolicy& policy,
                        std::size_t ordinal);

/// The q checkpoint transitions of `epoch` with the largest update norm under
/// the policy metric; ties break toward the lower step index.
std::vector<std::int64_t> select_top_q(const proofchain::Proof& proof, std::int64_t epoch, int q,
                                       Metric metric);

VerificationReport verify(const proofchain::Proof& proof, const VerificationPolicy& policy,
                          const DatasetProvider& provider, std::optional<double> rd = std::nullopt);

struct ReferenceDistanceResult {
  double rd = 0.0;
  bool degenerate = false;  // zero deviation: normalization undefined
  std::vector<double> pairwise;
};

/// Mean pairwise final-weight distance across `trials` training runs that
/// differ only in their noise seeds.
ReferenceDistanceResult reference_distance(const tinytrain::TrainConfig& config,
                                           const Dataset& data, int trials, Metric metric,
                                           std::uint64_t seed_base);

/// Sampler for noisy reproductions of an update: returns (g, g') pairs.
using UpdateSampler = std::function<std::pair<Vector, Vector>()>;

/// Empirical tau-quantile of d(g, g') over `trials` draws: the smallest
/// threshold that accepts at least a tau fraction of the sampled
/// reproductions. Monotone nondecreasing in tau by construction.
double estimate_min_threshold(const UpdateSampler& sampler, Metric metric, double tau, int trials);

}  // namespace polforge::verifier
