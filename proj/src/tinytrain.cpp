#include "polforge/tinytrain.hpp"

#include <cmath>

namespace polforge::tinytrain {

namespace {

struct LayerSpan {
  Eigen::Index w_offset;
  Eigen::Index b_offset;
  int in;
  int out;
};

std::vector<LayerSpan> layer_spans(const Architecture& arch) {
  std::vector<LayerSpan> spans;
  Eigen::Index off = 0;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    const int in = arch.layer_sizes[l];
    const int out = arch.layer_sizes[l + 1];
    spans.push_back({off, off + static_cast<Eigen::Index>(in) * out, in, out});
    off += static_cast<Eigen::Index>(in) * out + out;
  }
  return spans;
}

using ConstWeightMap = Eigen::Map<const RowMajorMatrix>;
using WeightMap = Eigen::Map<RowMajorMatrix>;

ConstWeightMap layer_weights(const Vector& w, const LayerSpan& s) {
  return ConstWeightMap(w.data() + s.w_offset, s.out, s.in);
}

Eigen::Map<const Vector> layer_bias(const Vector& w, const LayerSpan& s) {
  return Eigen::Map<const Vector>(w.data() + s.b_offset, s.out);
}

void apply_activation(Matrix& z, Activation act) {
  if (act == Activation::Tanh) {
    z = z.array().tanh();
  } else {
    z = z.cwiseMax(0.0);
  }
}

// Forward pass keeping post-activation values for backprop.
struct ForwardTrace {
  std::vector<Matrix> activations;  // activations[0] = input, last = logits
  double loss = 0.0;
};

ForwardTrace run_forward(const ModelState& model, const Batch& batch) {
  const auto spans = layer_spans(model.arch);
  ForwardTrace tr;
  tr.activations.reserve(spans.size() + 1);
  tr.activations.push_back(batch.features);
  for (std::size_t l = 0; l < spans.size(); ++l) {
    const auto& s = spans[l];
    Matrix z = tr.activations.back() * layer_weights(model.weights, s).transpose();
    z.rowwise() += layer_bias(model.weights, s).transpose();
    if (l + 1 < spans.size()) apply_activation(z, model.arch.activation);
    tr.activations.push_back(std::move(z));
  }

  const Matrix& logits = tr.activations.back();
  const Eigen::Index rows = logits.rows();
  double loss = 0.0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mx = logits.row(r).maxCoeff();
    const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
    loss += lse - logits(r, batch.labels[r]);
  }
  tr.loss = loss / static_cast<double>(rows);
  return tr;
}

// Softmax-minus-onehot scaled by 1/batch, the gradient of the mean loss at
// the logits.
Matrix logit_gradient(const Matrix& logits, const IntVector& labels) {
  Matrix d(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    Eigen::ArrayXd e = (logits.row(r).array() - mx).exp();
    d.row(r) = (e / e.sum()).matrix();
    d(r, labels[r]) -= 1.0;
  }
  d /= static_cast<double>(logits.rows());
  return d;
}

void check_batch(const ModelState& model, const Batch& batch) {
  model.validate();
  batch.validate();
  if (batch.features.cols() != model.arch.input_dim()) {
    throw ShapeError("batch feature dim " + std::to_string(batch.features.cols()) +
                     " does not match architecture input dim " +
                     std::to_string(model.arch.input_dim()));
  }
  if (batch.rows() < 1) throw ShapeError("empty batch");
  if (batch.labels.size() > 0 &&
      (batch.labels.minCoeff() < 0 || batch.labels.maxCoeff() >= model.arch.output_dim())) {
    throw ShapeError("batch label out of range for architecture output dim");
  }
}

// Backprop from dLogits to either weight space or input space.
Vector backprop_weights(const ModelState& model, const ForwardTrace& tr, Matrix d_layer) {
  const auto spans = layer_spans(model.arch);
  Vector grad = Vector::Zero(model.weights.size());
  for (std::size_t l = spans.size(); l-- > 0;) {
    const auto& s = spans[l];
    const Matrix& a_prev = tr.activations[l];
    WeightMap gw(grad.data() + s.w_offset, s.out, s.in);
    gw = d_layer.transpose() * a_prev;
    Eigen::Map<Vector>(grad.data() + s.b_offset, s.out) = d_layer.colwise().sum().transpose();
    if (l > 0) {
      Matrix d_prev = d_layer * layer_weights(model.weights, s);
      const Matrix& a = tr.activations[l];
      if (model.arch.activation == Activation::Tanh) {
        d_prev.array() *= 1.0 - a.array().square();
      } else {
        d_prev.array() *= (a.array() > 0.0).cast<double>();
      }
      d_layer = std::move(d_prev);
    }
  }
  return grad;
}

}  // namespace

ModelState init_model(const Architecture& arch, std::uint64_t seed, double init_std) {
  arch.validate();
  Rng rng(seed);
  const auto spans = layer_spans(arch);
  Vector w(arch.parameter_count());
  for (const auto& s : spans) {
    const double sd = init_std / std::sqrt(static_cast<double>(s.in));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(s.in) * s.out; ++i) {
      w[s.w_offset + i] = sd * rng.normal();
    }
    for (int i = 0; i < s.out; ++i) w[s.b_offset + i] = 0.0;
  }
  return ModelState{std::move(w), arch};
}

double forward(const ModelState& model, const Batch& batch, CostLedger& ledger) {
  check_batch(model, batch);
  const ForwardTrace tr = run_forward(model, batch);
  ledger.add(OpKind::Forward);
  return tr.loss;
}

Vector backward(const ModelState& model, const Batch& batch, CostLedger& ledger, double* loss_out) {
  check_batch(model, batch);
  const ForwardTrace tr = run_forward(model, batch);
  ledger.add(OpKind::Forward);
  Vector grad = backprop_weights(model, tr, logit_gradient(tr.activations.back(), batch.labels));
  ledger.add(OpKind::Backward);
  if (loss_out != nullptr) *loss_out = tr.loss;
  return grad;
}

Matrix input_gradient(const ModelState& model, const Batch& batch, CostLedger& ledger) {
  check_batch(model, batch);
  const ForwardTrace tr = run_forward(model, batch);
  ledger.add(OpKind::Forward);

  const auto spans = layer_spans(model.arch);
  Matrix d_layer = logit_gradient(tr.activations.back(), batch.labels);
  for (std::size_t l = spans.size(); l-- > 0;) {
    const auto& s = spans[l];
    Matrix d_prev = d_layer * layer_weights(model.weights, s);
    if (l > 0) {
      const Matrix& a = tr.activations[l];
      if (model.arch.activation == Activation::Tanh) {
        d_prev.array() *= 1.0 - a.array().square();
      } else {
        d_prev.array() *= (a.array() > 0.0).cast<double>();
      }
    }
    d_layer = std::move(d_prev);
  }
  ledger.add(OpKind::InputGrad);
  return d_layer;  // B x input_dim
}

void sgd_step_inplace(Vector& weights, const Vector& grad, double lr) {
  weights.noalias() -= lr * grad;
}

ModelState update_k(const ModelState& model, const std::vector<Batch>& batches,
                    const StepMetadata& meta, int k, const NoiseModel& noise, Rng& noise_rng,
                    CostLedger& ledger) {
  if (k <= 0) throw ConfigError("update_k requires k >= 1");
  if (static_cast<int>(batches.size()) != k) {
    throw ConfigError("update_k needs exactly k batches, got " + std::to_string(batches.size()));
  }
  meta.validate();
  noise.validate();

  ModelState current = model;
  for (int i = 0; i < k; ++i) {
    const Vector grad = backward(current, batches[static_cast<std::size_t>(i)], ledger);
    const Vector update = -meta.learning_rate * grad;
    current.weights += update;
    if (noise.active()) {
      current.weights += noise.sample(update, noise_rng);
      ledger.add(OpKind::WeightAdd);
    }
  }
  return current;
}

ModelState interpolate(const ModelState& a, const ModelState& b, double t, CostLedger& ledger) {
  if (a.arch != b.arch) throw ShapeError("interpolate endpoints have different architectures");
  if (a.weights.size() != b.weights.size()) throw ShapeError("interpolate endpoints differ in length");
  if (t < 0.0 || t > 1.0) throw ConfigError("interpolation parameter t must lie in [0, 1]");
  ModelState out{(1.0 - t) * a.weights + t * b.weights, a.arch};
  ledger.add(OpKind::Interpolate);
  return out;
}

void TrainConfig::validate() const {
  arch.validate();
  noise.validate();
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(lr_decay > 0.0)) throw ConfigError("lr_decay must be positive");
}

std::int64_t steps_per_epoch(Index rows, int batch_size) {
  return (rows + batch_size - 1) / batch_size;
}

TrainResult train(const TrainConfig& config, const Dataset& data) {
  config.validate();
  if (data.rows() == 0) throw ConfigError("cannot train on an empty dataset");
  if (data.dim() != config.arch.input_dim()) {
    throw ShapeError("dataset dim does not match architecture input dim");
  }

  TrainResult result;
  result.arch = config.arch;

  ModelState model = init_model(config.arch, config.init_seed, config.init_std);
  result.trajectory.push_back(model.weights);

  Rng shuffle_master(config.shuffle_seed);
  Rng noise_rng(config.noise_seed);

  const std::int64_t s = steps_per_epoch(data.rows(), config.batch_size);
  std::int64_t t = 0;
  double lr = config.lr;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng epoch_rng = shuffle_master.fork(static_cast<std::uint64_t>(epoch));
    const std::vector<std::int64_t> perm = epoch_rng.permutation(data.rows());
    for (std::int64_t b = 0; b < s; ++b) {
      const std::int64_t lo = b * config.batch_size;
      const std::int64_t hi = std::min<std::int64_t>(lo + config.batch_size, data.rows());
      std::vector<Index> idx(perm.begin() + lo, perm.begin() + hi);
      const Batch batch = data.gather(idx);

      const Vector grad = backward(model, batch, result.ledger);
      const Vector update = -lr * grad;
      model.weights += update;
      if (config.noise.active()) {
        model.weights += config.noise.sample(update, noise_rng);
        result.ledger.add(OpKind::WeightAdd);
      }

      result.trajectory.push_back(model.weights);
      result.schedule.push_back(std::move(idx));
      result.metadata.push_back(StepMetadata{lr, static_cast<std::int32_t>(hi - lo),
                                             Optimizer::PlainSgd, config.shuffle_seed, t});
      ++t;
    }
    lr *= config.lr_decay;
  }
  return result;
}

}  // namespace polforge::tinytrain
