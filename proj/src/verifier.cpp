#include "polforge/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polforge::verifier {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::L1: return "l1";
    case Metric::L2: return "l2";
    case Metric::Linf: return "linf";
    case Metric::CosineDistance: return "cosine-distance";
  }
  return "?";
}

Metric metric_from_string(const std::string& s) {
  if (s == "l1") return Metric::L1;
  if (s == "l2") return Metric::L2;
  if (s == "linf") return Metric::Linf;
  if (s == "cosine-distance" || s == "cosine") return Metric::CosineDistance;
  throw ConfigError("unknown metric: " + s);
}

double distance(Metric m, const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ShapeError("distance operands differ in length");
  switch (m) {
    case Metric::L1: return (a - b).lpNorm<1>();
    case Metric::L2: return (a - b).norm();
    case Metric::Linf: return (a - b).lpNorm<Eigen::Infinity>();
    case Metric::CosineDistance: {
      const double na = a.norm();
      const double nb = b.norm();
      if (na == 0.0 && nb == 0.0) return 0.0;
      if (na == 0.0 || nb == 0.0) return 1.0;
      return 1.0 - a.dot(b) / (na * nb);
    }
  }
  return 0.0;
}

double distance(Metric m, const ModelState& a, const ModelState& b) {
  if (a.arch != b.arch) throw ShapeError("distance operands have different architectures");
  return distance(m, a.weights, b.weights);
}

double metric_norm(Metric m, const Vector& v) {
  switch (m) {
    case Metric::L1: return v.lpNorm<1>();
    case Metric::Linf: return v.lpNorm<Eigen::Infinity>();
    case Metric::L2:
    case Metric::CosineDistance: return v.norm();
  }
  return 0.0;
}

double VerificationReport::max_distance() const {
  double mx = 0.0;
  for (const auto& v : verdicts) mx = std::max(mx, v.distance);
  return mx;
}

double VerificationReport::max_normalized_error() const {
  double mx = 0.0;
  for (double e : normalized_errors) mx = std::max(mx, e);
  return mx;
}

double VerificationReport::acceptance_rate() const {
  if (verdicts.empty()) return 0.0;
  std::size_t acc = 0;
  for (const auto& v : verdicts) acc += v.accept ? 1 : 0;
  return static_cast<double>(acc) / static_cast<double>(verdicts.size());
}

ModelState reproduce_update(const proofchain::Proof& proof, std::int64_t t,
                            const DatasetProvider& provider, const VerificationPolicy& policy,
                            Rng& noise_rng, CostLedger& ledger) {
  if (t < 0 || t + proof.k > proof.total_steps || t % proof.k != 0) {
    throw ProofError("reproduce_update needs a checkpoint step with k committed steps after it");
  }
  ModelState current = proof.state_at(t);
  for (std::int64_t u = t; u < t + proof.k; ++u) {
    const Batch batch = proofchain::fetch_and_check_batch(proof, u, provider);
    const auto& meta = proof.records[static_cast<std::size_t>(u)].metadata;
    const Vector grad = tinytrain::backward(current, batch, ledger);
    const Vector update = -meta.learning_rate * grad;
    current.weights += update;
    if (policy.noise.active()) {
      current.weights += policy.noise.sample(update, noise_rng);
      ledger.add(OpKind::WeightAdd);
    }
  }
  return current;
}

StepVerdict verify_step(std::int64_t step, double dist, double proof_update_norm,
                        double reproduced_update_norm, const VerificationPolicy& policy,
                        std::size_t ordinal) {
  StepVerdict v;
  v.step = step;
  v.distance = dist;
  v.proof_update_norm = proof_update_norm;
  v.reproduced_update_norm = reproduced_update_norm;

  switch (policy.threshold.kind) {
    case ThresholdMode::Kind::Static:
      if (!(policy.threshold.delta > 0.0)) throw ConfigError("static threshold delta must be positive");
      v.threshold_used = policy.threshold.delta;
      break;
    case ThresholdMode::Kind::Adaptive:
      if (!(policy.threshold.alpha > 0.0)) throw ConfigError("adaptive threshold alpha must be positive");
      v.threshold_used = policy.threshold.alpha * std::min(proof_update_norm, reproduced_update_norm);
      break;
    case ThresholdMode::Kind::PerStep:
      if (ordinal >= policy.threshold.per_step.size()) {
        throw ConfigError("per-step threshold list shorter than the verified checkpoint count");
      }
      v.threshold_used = policy.threshold.per_step[ordinal];
      break;
  }
  v.accept = dist < v.threshold_used;
  return v;
}

namespace {

// Update norms of every checkpoint transition in an epoch, in step order.
std::vector<std::pair<std::int64_t, double>> epoch_transition_norms(const proofchain::Proof& proof,
                                                                    std::int64_t epoch,
                                                                    Metric metric) {
  const std::int64_t s = proof.steps_per_epoch;
  std::vector<std::pair<std::int64_t, double>> norms;
  for (std::int64_t t = epoch * s; t < (epoch + 1) * s; t += proof.k) {
    const Vector g = proof.checkpoint_at(t + proof.k) - proof.checkpoint_at(t);
    norms.emplace_back(t, metric_norm(metric, g));
  }
  return norms;
}

}  // namespace

std::vector<std::int64_t> select_top_q(const proofchain::Proof& proof, std::int64_t epoch, int q,
                                       Metric metric) {
  if (epoch < 0 || epoch >= proof.epochs()) throw ConfigError("epoch out of range");
  if (q < 1) throw ConfigError("top-q selection needs q >= 1");
  auto norms = epoch_transition_norms(proof, epoch, metric);
  if (q > static_cast<int>(norms.size())) {
    throw ConfigError("q exceeds the number of checkpoint transitions per epoch");
  }
  std::stable_sort(norms.begin(), norms.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::int64_t> steps;
  steps.reserve(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) steps.push_back(norms[static_cast<std::size_t>(i)].first);
  std::sort(steps.begin(), steps.end());
  return steps;
}

VerificationReport verify(const proofchain::Proof& proof, const VerificationPolicy& policy,
                          const DatasetProvider& provider, std::optional<double> rd) {
  proof.validate();
  policy.noise.validate();
  if (policy.q < 0) throw ConfigError("q must be nonnegative");

  std::vector<std::int64_t> steps;
  if (policy.q == 0) {
    for (std::int64_t t = 0; t < proof.total_steps; t += proof.k) steps.push_back(t);
  } else {
    for (std::int64_t e = 0; e < proof.epochs(); ++e) {
      const auto selected = select_top_q(proof, e, policy.q, policy.metric);
      steps.insert(steps.end(), selected.begin(), selected.end());
    }
  }
  if (policy.threshold.kind == ThresholdMode::Kind::PerStep &&
      policy.threshold.per_step.size() != steps.size()) {
    throw ConfigError("per-step threshold list must match the number of verified checkpoints (" +
                      std::to_string(steps.size()) + ")");
  }

  VerificationReport report;
  report.reference_distance = rd;
  report.init_final_distance =
      distance(policy.metric, proof.checkpoint_at(0), proof.final_weights);

  Rng noise_master(policy.noise_seed);
  for (std::size_t ordinal = 0; ordinal < steps.size(); ++ordinal) {
    const std::int64_t t = steps[ordinal];
    ModelState reproduced{Vector(), proof.arch};
    try {
      Rng step_rng = noise_master.fork(static_cast<std::uint64_t>(t));
      reproduced = reproduce_update(proof, t, provider, policy, step_rng, report.ledger);
    } catch (const CommitmentError& e) {
      report.violations.push_back(Violation{e.step(), e.what()});
      continue;
    }
    const Vector& from = proof.checkpoint_at(t);
    const Vector& logged = proof.checkpoint_at(t + proof.k);
    const double dist = distance(policy.metric, logged, reproduced.weights);
    const double ng = metric_norm(policy.metric, logged - from);
    const double ngp = metric_norm(policy.metric, reproduced.weights - from);
    report.verdicts.push_back(verify_step(t, dist, ng, ngp, policy, ordinal));
    if (rd.has_value() && *rd > 0.0) {
      report.normalized_errors.push_back(dist / *rd);
    }
  }

  report.valid = report.violations.empty() &&
                 std::all_of(report.verdicts.begin(), report.verdicts.end(),
                             [](const StepVerdict& v) { return v.accept; });
  return report;
}

ReferenceDistanceResult reference_distance(const tinytrain::TrainConfig& config,
                                           const Dataset& data, int trials, Metric metric,
                                           std::uint64_t seed_base) {
  if (trials < 2) throw ConfigError("reference_distance needs at least 2 trials");
  std::vector<Vector> finals;
  finals.reserve(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    tinytrain::TrainConfig c = config;
    c.noise_seed = splitmix64(seed_base + static_cast<std::uint64_t>(i));
    finals.push_back(tinytrain::train(c, data).trajectory.back());
  }
  ReferenceDistanceResult out;
  for (std::size_t i = 0; i < finals.size(); ++i) {
    for (std::size_t j = i + 1; j < finals.size(); ++j) {
      out.pairwise.push_back(distance(metric, finals[i], finals[j]));
    }
  }
  out.rd = std::accumulate(out.pairwise.begin(), out.pairwise.end(), 0.0) /
           static_cast<double>(out.pairwise.size());
  out.degenerate = !(out.rd > 0.0);
  return out;
}

double estimate_min_threshold(const UpdateSampler& sampler, Metric metric, double tau, int trials) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  if (trials < 1) throw ConfigError("estimate_min_threshold needs trials >= 1");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    const auto [g, gp] = sampler();
    dists.push_back(distance(metric, g, gp));
  }
  std::sort(dists.begin(), dists.end());
  const auto rank = static_cast<std::size_t>(std::ceil(tau * trials));
  return dists[std::min(dists.size() - 1, rank == 0 ? 0 : rank - 1)];
}

}  // namespace polforge::verifier
