#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sentinel/tabular/cleaning.hpp"
#include "sentinel/tabular/load.hpp"
#include "sentinel/tabular/split.hpp"

namespace sentinel::pipeline {

enum class Task { cervical, breast };

inline const char* to_string(Task t) { return t == Task::cervical ? "cervical" : "breast"; }

inline std::optional<Task> parse_task(std::string_view s) {
  if (s == "cervical") return Task::cervical;
  if (s == "breast") return Task::breast;
  return std::nullopt;
}

enum class ModelKind { tree, forest, sgd, svm };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::tree: return "tree";
    case ModelKind::forest: return "forest";
    case ModelKind::sgd: return "sgd";
    case ModelKind::svm: return "svm";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view s) {
  if (s == "tree") return ModelKind::tree;
  if (s == "forest") return ModelKind::forest;
  if (s == "sgd") return ModelKind::sgd;
  if (s == "svm") return ModelKind::svm;
  return std::nullopt;
}

/// Reference figures for a full-size reproduction run.
struct GoldenTargets {
  std::size_t raw_rows = 0;
  std::size_t raw_cols = 0;
  std::size_t rows_out = 0;
  std::optional<std::size_t> duplicates_removed;
  double class_balance = 0.0;
  double class_balance_tolerance = 0.001;
  std::optional<double> min_train_accuracy;
  std::optional<double> min_test_accuracy;
  std::optional<double> max_train_test_gap;  // train >= test - gap
};

/// Everything that defines how one dataset is cleaned, split and modelled.
struct TaskProfile {
  Task task = Task::cervical;
  std::string label;
  tabular::LoadOptions load;
  tabular::CleaningConfig cleaning;
  tabular::SplitSpec split;
  bool standardize = false;
  ModelKind model = ModelKind::tree;
  /// Rows drawn (stratified) from the training split to fit the model;
  /// 0 uses the whole split.
  std::size_t train_subsample = 0;
  std::string dataset_file;
  std::string source_note;
  GoldenTargets golden;
};

inline TaskProfile cervical_profile() {
  TaskProfile p;
  p.task = Task::cervical;
  p.label = "Dx:Cancer";
  p.load.name = "cervical";
  p.cleaning.max_missing_fraction = 0.5;
  p.cleaning.protect_columns = {p.label};
  p.split = {0.75, 42, p.label};
  p.standardize = false;
  p.model = ModelKind::tree;
  p.dataset_file = "risk_factors_cervical_cancer.csv";
  p.source_note =
      "Cervical cancer (risk factors) data set, UCI Machine Learning Repository / Kaggle, "
      "858 rows x 36 columns, missing values encoded as '?'. Save it as risk_factors_cervical_cancer.csv.";
  p.golden.raw_rows = 858;
  p.golden.raw_cols = 36;
  p.golden.rows_out = 688;
  p.golden.class_balance = 0.0255;
  p.golden.min_train_accuracy = 1.0;
  p.golden.min_test_accuracy = 0.97;
  return p;
}

inline TaskProfile breast_profile() {
  TaskProfile p;
  p.task = Task::breast;
  p.label = "cancer";
  p.load.name = "breast";
  // 9 encodes "unknown" in these coded columns of the risk-factor export
  for (const char* c : {"menopaus", "density", "race", "Hispanic", "bmi", "agefirst", "nrelbc", "brstproc",
                        "lastmamm", "surgmeno", "hrt"})
    p.load.column_missing_codes[c] = {"9"};
  p.cleaning.exclude_columns = {"training"};
  p.cleaning.max_missing_fraction = 0.5;
  p.cleaning.protect_columns = {p.label};
  p.split = {0.5, 42, p.label};
  p.standardize = true;
  p.model = ModelKind::svm;
  p.train_subsample = 4000;
  p.dataset_file = "bcsc_risk_factors.csv";
  p.source_note =
      "Breast Cancer Surveillance Consortium risk-factor data set (16 columns: menopaus, agegrp, density, race, "
      "Hispanic, bmi, agefirst, nrelbc, brstproc, lastmamm, surgmeno, hrt, invasive, cancer, training, count). "
      "Request it from the BCSC data resources page under their terms of use and save it as CSV named "
      "bcsc_risk_factors.csv.";
  p.golden.raw_rows = 462563;
  p.golden.raw_cols = 16;
  p.golden.rows_out = 15203;
  p.golden.duplicates_removed = 14655;
  p.golden.class_balance = 0.043;
  p.golden.min_test_accuracy = 0.957;
  p.golden.max_train_test_gap = 0.01;
  return p;
}

inline TaskProfile profile_for(Task t) { return t == Task::cervical ? cervical_profile() : breast_profile(); }

/// Replicates every row `count` times and drops the count column. Offered as
/// an alternative reading of aggregated rows; the reproduction keeps
/// `count` as an ordinary feature.
inline tabular::Table expand_by_count(const tabular::Table& t, std::string_view count_column) {
  const auto cc = t.require_column(count_column);
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto v = t.cell(r, cc);
    if (!v || *v < 0 || *v != std::floor(*v)) throw ValidationError("count column must hold non-negative integers");
    for (std::size_t i = 0; i < static_cast<std::size_t>(*v); ++i) idx.push_back(r);
  }
  return tabular::drop_column_indices(t.select_rows(idx), {cc});
}

}  // namespace sentinel::pipeline
