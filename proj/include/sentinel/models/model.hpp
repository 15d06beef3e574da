#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <variant>

#include "sentinel/models/forest.hpp"
#include "sentinel/models/sgd.hpp"
#include "sentinel/models/svm.hpp"
#include "sentinel/models/tree.hpp"

namespace sentinel::models {

using TrainedModel = std::variant<TreeModel, ForestModel, LinearSgdModel, SvmModel>;

inline const char* kind_name(const TreeModel&) { return "tree"; }
inline const char* kind_name(const ForestModel&) { return "forest"; }
inline const char* kind_name(const LinearSgdModel&) { return "sgd"; }
inline const char* kind_name(const SvmModel&) { return "svm"; }
inline std::string kind_name(const TrainedModel& m) {
  return std::visit([](const auto& v) { return std::string(kind_name(v)); }, m);
}

inline const ModelInfo& info(const TrainedModel& m) {
  return std::visit([](const auto& v) -> const ModelInfo& { return v.info; }, m);
}

inline int predict(const TrainedModel& m, std::span<const double> x) {
  return std::visit([&](const auto& v) { return v.predict(x); }, m);
}

/// Model-specific confidence of the predicted class. The kinds are not
/// comparable with each other and none of them is a calibrated probability.
struct Confidence {
  double value = 0.0;
  std::string kind;  // leaf_frequency | vote_fraction | margin
  bool operator==(const Confidence&) const = default;
};

inline Confidence confidence(const TrainedModel& m, std::span<const double> x) {
  struct Visitor {
    std::span<const double> x;
    Confidence operator()(const TreeModel& t) const {
      const auto& leaf = t.leaf_for(x);
      std::size_t total = 0;
      for (auto c : leaf.counts) total += c;
      return {total ? static_cast<double>(leaf.counts[static_cast<std::size_t>(leaf.label)]) / static_cast<double>(total)
                    : 0.0,
              "leaf_frequency"};
    }
    Confidence operator()(const ForestModel& f) const {
      const auto v = f.votes(x);
      const auto best = argmax_lowest(std::span<const std::size_t>(v));
      return {static_cast<double>(v[static_cast<std::size_t>(best)]) / static_cast<double>(f.trees.size()),
              "vote_fraction"};
    }
    Confidence operator()(const LinearSgdModel& s) const { return {s.decision_value(x), "margin"}; }
    Confidence operator()(const SvmModel& s) const { return {s.decision_value(x), "margin"}; }
  };
  return std::visit(Visitor{x}, m);
}

inline std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

/// kind + format version + training-data fingerprint.
inline std::string model_id(const TrainedModel& m) {
  return kind_name(m) + "-v1-" + fingerprint_hex(info(m).fingerprint);
}

}  // namespace sentinel::models
