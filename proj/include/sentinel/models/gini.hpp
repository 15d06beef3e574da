#pragma once

#include <span>
#include <vector>

#include "sentinel/core/error.hpp"

namespace sentinel::models {

/// 1 - sum_k p_k^2 from per-class counts over `total` samples.
inline double gini_from_counts(std::span<const std::size_t> counts, std::size_t total) {
  if (total == 0) throw ValidationError("gini impurity of an empty set is undefined");
  const double n = static_cast<double>(total);
  double sq = 0.0;
  for (auto c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
  return 1.0 - sq / (n * n);
}

inline double gini_impurity(std::span<const int> labels) {
  if (labels.empty()) throw ValidationError("gini impurity of an empty set is undefined");
  std::vector<std::size_t> counts;
  for (int y : labels) {
    if (y < 0) throw ValidationError("class ids must be non-negative");
    if (static_cast<std::size_t>(y) >= counts.size()) counts.resize(static_cast<std::size_t>(y) + 1, 0);
    ++counts[static_cast<std::size_t>(y)];
  }
  return gini_from_counts(counts, labels.size());
}

}  // namespace sentinel::models
