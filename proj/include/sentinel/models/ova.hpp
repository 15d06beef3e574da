#pragma once

#include <span>
#include <vector>

#include "sentinel/models/labeled_matrix.hpp"

namespace sentinel::models {

/// One-vs-all reduction. `fit_binary(data, signs)` trains a learner on
/// signs[i] in {-1, +1} and returns an object with
/// `double decision_value(std::span<const double>) const`.
///
/// With two classes a single learner (class 1 vs class 0) is trained and the
/// second hyperplane is implied by sign.
template <class FitBinary>
auto ova_fit(const LabeledMatrix& data, FitBinary&& fit_binary) {
  const int k = data.classes();
  if (k < 2) throw ValidationError("one-vs-all needs at least two classes");
  std::vector<std::size_t> support(static_cast<std::size_t>(k), 0);
  for (int y : data.labels()) ++support[static_cast<std::size_t>(y)];
  for (int c = 0; c < k; ++c)
    if (support[static_cast<std::size_t>(c)] == 0)
      throw ValidationError("class " + std::to_string(c) + " has no training samples");

  using Learner = decltype(fit_binary(data, std::vector<int>{}));
  std::vector<Learner> learners;
  auto signs_for = [&](int positive) {
    std::vector<int> s(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) s[i] = data.label(i) == positive ? 1 : -1;
    return s;
  };
  if (k == 2) {
    learners.push_back(fit_binary(data, signs_for(1)));
  } else {
    for (int c = 0; c < k; ++c) learners.push_back(fit_binary(data, signs_for(c)));
  }
  return learners;
}

/// Per-class confidences; for the binary case (-f, f).
template <class Learner>
std::vector<double> ova_confidences(const std::vector<Learner>& learners, std::span<const double> x) {
  if (learners.size() == 1) {
    const double f = learners.front().decision_value(x);
    return {-f, f};
  }
  std::vector<double> out;
  out.reserve(learners.size());
  for (const auto& l : learners) out.push_back(l.decision_value(x));
  return out;
}

/// Binary: class 1 iff f(x) > 0. Otherwise argmax confidence, lowest id on ties.
template <class Learner>
int ova_predict(const std::vector<Learner>& learners, std::span<const double> x) {
  if (learners.size() == 1) return learners.front().decision_value(x) > 0.0 ? 1 : 0;
  const auto conf = ova_confidences(learners, x);
  return argmax_lowest(std::span<const double>(conf));
}

}  // namespace sentinel::models
