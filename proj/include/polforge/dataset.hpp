#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "polforge/rng.hpp"
#include "polforge/types.hpp"

namespace polforge {

/// Synthetic Gaussian-blob classification task.
struct DatasetSpec {
  int classes = 2;
  int points_per_class = 50;
  int dim = 2;
  double center_std = 3.0;  // spread of class centers
  double point_std = 1.0;   // spread of points around their center

  void validate() const {
    if (classes < 2) throw ConfigError("dataset needs at least 2 classes");
    if (points_per_class < 1) throw ConfigError("dataset needs at least 1 point per class");
    if (dim < 2) throw ConfigError("dataset input dimension must be >= 2");
  }
};

struct DataRow {
  Vector features;
  int label = 0;
};

/// Labeled dataset with rows addressable by index.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix features, IntVector labels);

  Index rows() const { return features_.rows(); }
  int dim() const { return static_cast<int>(features_.cols()); }
  int classes() const { return classes_; }

  const Matrix& features() const { return features_; }
  const IntVector& labels() const { return labels_; }

  DataRow row(Index i) const;
  Batch gather(const std::vector<Index>& indices) const;

 private:
  Matrix features_;
  IntVector labels_;
  int classes_ = 0;
};

/// Deterministic for a fixed seed: two calls with equal arguments produce
/// bit-identical datasets.
Dataset gen_dataset(std::uint64_t seed, const DatasetSpec& spec);

/// Prover-side row store queried at verification time.
class DatasetProvider {
 public:
  virtual ~DatasetProvider() = default;
  virtual std::optional<DataRow> row(Index i) const = 0;
};

class InMemoryProvider final : public DatasetProvider {
 public:
  explicit InMemoryProvider(const Dataset& data) : data_(&data) {}
  std::optional<DataRow> row(Index i) const override {
    if (i < 0 || i >= data_->rows()) return std::nullopt;
    return data_->row(i);
  }

 private:
  const Dataset* data_;
};

/// Mutable copy of a dataset used to model a tampered or lossy store.
class MutableStoreProvider final : public DatasetProvider {
 public:
  explicit MutableStoreProvider(const Dataset& data);

  std::optional<DataRow> row(Index i) const override;

  /// Flip one bit of the binary64 encoding of features(row, col).
  void flip_feature_bit(Index row, int col, int bit);
  void flip_label_bit(Index row, int bit);
  void drop_row(Index row);

 private:
  Matrix features_;
  IntVector labels_;
  std::vector<bool> missing_;
};

}  // namespace polforge
