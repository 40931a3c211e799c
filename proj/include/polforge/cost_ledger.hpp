#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace polforge {

/// Instrumented operation kinds. Costs are expressed in forward-pass (FP)
/// units: one forward propagation of a batch is the basic unit, one backward
/// propagation costs 2 FP, interpolating or adding two full weight vectors
/// costs 1 FP. LsqSolve counts full-length dot products inside the small
/// least-squares solver (1 FP each); InputGrad is a backward pass extended to
/// the inputs (2 FP).
enum class OpKind : int {
  Forward = 0,
  Backward = 1,
  Interpolate = 2,
  WeightAdd = 3,
  LsqSolve = 4,
  InputGrad = 5,
};

inline constexpr int kOpKindCount = 6;

inline double unit_cost(OpKind k) {
  switch (k) {
    case OpKind::Forward: return 1.0;
    case OpKind::Backward: return 2.0;
    case OpKind::Interpolate: return 1.0;
    case OpKind::WeightAdd: return 1.0;
    case OpKind::LsqSolve: return 1.0;
    case OpKind::InputGrad: return 2.0;
  }
  return 0.0;
}

inline const char* op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::Forward: return "forward";
    case OpKind::Backward: return "backward";
    case OpKind::Interpolate: return "interpolate";
    case OpKind::WeightAdd: return "weight-add";
    case OpKind::LsqSolve: return "lsq-solve";
    case OpKind::InputGrad: return "input-grad";
  }
  return "?";
}

/// Forward-pass unit accounting. fp_units is accumulated alongside the
/// per-op counters; consistent() cross-checks the two so any code path that
/// forgets one side is caught by the harness assertions.
class CostLedger {
 public:
  void add(OpKind k, std::uint64_t count = 1) {
    counts_[static_cast<std::size_t>(k)] += count;
    fp_ += unit_cost(k) * static_cast<double>(count);
  }

  double fp_units() const { return fp_; }

  std::uint64_t count(OpKind k) const { return counts_[static_cast<std::size_t>(k)]; }

  void merge(const CostLedger& other) {
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    fp_ += other.fp_;
  }

  bool consistent() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      sum += unit_cost(static_cast<OpKind>(i)) * static_cast<double>(counts_[i]);
    }
    return std::abs(sum - fp_) <= 1e-9 * (1.0 + std::abs(sum));
  }

  std::string summary() const {
    std::string s = "fp_units=" + std::to_string(fp_);
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (counts_[i] == 0) continue;
      s += " ";
      s += op_kind_name(static_cast<OpKind>(i));
      s += "=" + std::to_string(counts_[i]);
    }
    return s;
  }

 private:
  std::array<std::uint64_t, kOpKindCount> counts_{};
  double fp_ = 0.0;
};

}  // namespace polforge
