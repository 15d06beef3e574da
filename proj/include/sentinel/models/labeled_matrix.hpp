#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/core/error.hpp"
#include "sentinel/tabular/table.hpp"

namespace sentinel::models {

/// Dense row-major feature matrix with integer class labels 0..K-1.
class LabeledMatrix {
 public:
  LabeledMatrix() = default;

  LabeledMatrix(std::size_t rows, std::size_t dims, std::vector<double> features, std::vector<int> labels,
                std::vector<std::string> feature_names = {}, std::optional<int> num_classes = std::nullopt)
      : n_(rows), d_(dims), x_(std::move(features)), y_(std::move(labels)), names_(std::move(feature_names)) {
    if (n_ == 0) throw ValidationError("labeled matrix needs at least one row");
    if (x_.size() != n_ * d_) throw ValidationError("feature grid size does not match rows x dims");
    if (y_.size() != n_) throw ValidationError("label count does not match rows");
    if (names_.empty())
      for (std::size_t j = 0; j < d_; ++j) names_.push_back("x" + std::to_string(j));
    if (names_.size() != d_) throw ValidationError("feature name count does not match dims");
    for (double v : x_)
      if (!std::isfinite(v)) throw ValidationError("features must be finite");
    int max_label = 0;
    for (int v : y_) {
      if (v < 0) throw ValidationError("labels must be non-negative class ids");
      max_label = std::max(max_label, v);
    }
    classes_ = num_classes.value_or(max_label + 1);
    if (classes_ <= max_label) throw ValidationError("label exceeds declared class count");
  }

  /// Convenience: rows given as nested vectors.
  static LabeledMatrix from_rows(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                                 std::vector<std::string> names = {}, std::optional<int> num_classes = std::nullopt) {
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * d);
    for (const auto& r : rows) {
      if (r.size() != d) throw ValidationError("ragged feature rows");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return LabeledMatrix(rows.size(), d, std::move(flat), std::move(labels), std::move(names), num_classes);
  }

  /// Features are every column except `label`; the label column must hold
  /// non-negative integers. The table must have no missing cells.
  static LabeledMatrix from_table(const tabular::Table& t, std::string_view label) {
    const auto lc = t.require_column(label);
    if (t.missing_cells() != 0) throw ValidationError("cannot build a labeled matrix from a table with missing cells");
    std::vector<std::string> names;
    for (std::size_t c = 0; c < t.cols(); ++c)
      if (c != lc) names.push_back(t.column(c).name);
    std::vector<double> x;
    x.reserve(t.rows() * names.size());
    std::vector<int> y;
    y.reserve(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (std::size_t c = 0; c < t.cols(); ++c)
        if (c != lc) x.push_back(t.column(c).values[r]);
      const double v = t.column(lc).values[r];
      if (v < 0 || v != std::floor(v) || v > 1e6)
        throw ValidationError("label column '" + std::string(label) + "' must hold class ids", {std::string(label)});
      y.push_back(static_cast<int>(v));
    }
    const std::size_t d = names.size();
    return LabeledMatrix(t.rows(), d, std::move(x), std::move(y), std::move(names));
  }

  std::size_t rows() const noexcept { return n_; }
  std::size_t dims() const noexcept { return d_; }
  int classes() const noexcept { return classes_; }
  std::span<const double> row(std::size_t i) const { return {x_.data() + i * d_, d_}; }
  double at(std::size_t i, std::size_t j) const { return x_[i * d_ + j]; }
  int label(std::size_t i) const { return y_[i]; }
  const std::vector<int>& labels() const noexcept { return y_; }
  const std::vector<double>& features() const noexcept { return x_; }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }

  LabeledMatrix select(std::span<const std::size_t> idx) const {
    std::vector<double> x;
    x.reserve(idx.size() * d_);
    std::vector<int> y;
    y.reserve(idx.size());
    for (auto i : idx) {
      auto r = row(i);
      x.insert(x.end(), r.begin(), r.end());
      y.push_back(y_[i]);
    }
    return LabeledMatrix(idx.size(), d_, std::move(x), std::move(y), names_, classes_);
  }

  /// FNV-1a over shape, features and labels; identifies the training data.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t len) {
      const auto* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < len; ++i) h = (h ^ b[i]) * 0x100000001b3ULL;
    };
    mix(&n_, sizeof n_);
    mix(&d_, sizeof d_);
    mix(x_.data(), x_.size() * sizeof(double));
    mix(y_.data(), y_.size() * sizeof(int));
    return h;
  }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> x_;
  std::vector<int> y_;
  std::vector<std::string> names_;
  int classes_ = 0;
};

/// Metadata every fitted model carries.
struct ModelInfo {
  std::vector<std::string> feature_names;
  int classes = 2;
  std::uint64_t fingerprint = 0;

  static ModelInfo of(const LabeledMatrix& m) { return {m.feature_names(), m.classes(), m.fingerprint()}; }
  std::size_t dims() const { return feature_names.size(); }
  bool operator==(const ModelInfo&) const = default;
};

inline void check_dims(const ModelInfo& info, std::span<const double> x) {
  if (x.size() != info.dims())
    throw ValidationError("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                          std::to_string(info.dims()));
}

/// Index of the largest value; ties resolve to the lowest index.
template <class T>
int argmax_lowest(std::span<const T> values) {
  int best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  return best;
}

}  // namespace sentinel::models
