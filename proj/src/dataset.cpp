#include "polforge/dataset.hpp"

#include <cstring>

namespace polforge {

Dataset::Dataset(Matrix features, IntVector labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() != labels_.size()) {
    throw ShapeError("dataset features and labels disagree on row count");
  }
  classes_ = labels_.size() == 0 ? 0 : labels_.maxCoeff() + 1;
}

DataRow Dataset::row(Index i) const {
  if (i < 0 || i >= rows()) throw ReferenceError("dataset row " + std::to_string(i) + " out of range");
  return DataRow{features_.row(i).transpose(), labels_[i]};
}

Batch Dataset::gather(const std::vector<Index>& indices) const {
  Batch b;
  b.indices = indices;
  b.features.resize(static_cast<Eigen::Index>(indices.size()), features_.cols());
  b.labels.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const Index i = indices[r];
    if (i < 0 || i >= rows()) {
      throw ReferenceError("batch index " + std::to_string(i) + " out of range");
    }
    b.features.row(static_cast<Eigen::Index>(r)) = features_.row(i);
    b.labels[static_cast<Eigen::Index>(r)] = labels_[i];
  }
  return b;
}

Dataset gen_dataset(std::uint64_t seed, const DatasetSpec& spec) {
  spec.validate();
  Rng rng(seed);

  Matrix centers(spec.classes, spec.dim);
  for (int c = 0; c < spec.classes; ++c) {
    for (int d = 0; d < spec.dim; ++d) centers(c, d) = spec.center_std * rng.normal();
  }

  const Index n = static_cast<Index>(spec.classes) * spec.points_per_class;
  Matrix features(n, spec.dim);
  IntVector labels(n);
  for (int c = 0; c < spec.classes; ++c) {
    for (int j = 0; j < spec.points_per_class; ++j) {
      const Index r = static_cast<Index>(c) * spec.points_per_class + j;
      for (int d = 0; d < spec.dim; ++d) {
        features(r, d) = centers(c, d) + spec.point_std * rng.normal();
      }
      labels[r] = c;
    }
  }
  return Dataset(std::move(features), std::move(labels));
}

MutableStoreProvider::MutableStoreProvider(const Dataset& data)
    : features_(data.features()), labels_(data.labels()),
      missing_(static_cast<std::size_t>(data.rows()), false) {}

std::optional<DataRow> MutableStoreProvider::row(Index i) const {
  if (i < 0 || i >= features_.rows() || missing_[static_cast<std::size_t>(i)]) return std::nullopt;
  return DataRow{features_.row(i).transpose(), labels_[i]};
}

void MutableStoreProvider::flip_feature_bit(Index row, int col, int bit) {
  double v = features_(row, col);
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof(u));
  u ^= (1ULL << (bit & 63));
  std::memcpy(&v, &u, sizeof(v));
  features_(row, col) = v;
}

void MutableStoreProvider::flip_label_bit(Index row, int bit) {
  labels_[row] ^= (1 << (bit & 31));
}

void MutableStoreProvider::drop_row(Index row) {
  missing_[static_cast<std::size_t>(row)] = true;
}

}  // namespace polforge
