#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/metrics/metrics.hpp"
#include "sentinel/models/persist.hpp"
#include "sentinel/pipeline/bundle.hpp"
#include "sentinel/pipeline/tasks.hpp"
#include "sentinel/tabular/scaling.hpp"
#include "sentinel/tabular/split.hpp"
#include "sentinel/tabular/stats.hpp"

namespace sentinel::pipeline {

struct ModelSpec {
  ModelKind kind = ModelKind::tree;
  models::TreeParams tree;
  models::ForestParams forest;
  models::SgdParams sgd;
  models::SvmParams svm;
};

inline models::TrainedModel train_model(const models::LabeledMatrix& data, const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::tree: return models::fit_tree(data, spec.tree);
    case ModelKind::forest: return models::fit_forest(data, spec.forest);
    case ModelKind::sgd: return models::fit_sgd(data, spec.sgd);
    case ModelKind::svm: return models::fit_svc(data, spec.svm);
  }
  throw InvariantError("unknown model kind");
}

inline std::vector<int> predict_all(const models::TrainedModel& m, const models::LabeledMatrix& data) {
  std::vector<int> out(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = models::predict(m, data.row(i));
  return out;
}

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunOptions {
  std::optional<ModelKind> model;  // profile default when empty
  ModelSpec spec;                  // hyperparameters; kind is overridden
  std::uint64_t seed = 42;
  bool check_golden = true;
  std::optional<std::size_t> train_subsample;
  bool expand_by_count = false;
};

struct RunResult {
  Task task = Task::cervical;
  std::size_t raw_rows = 0;
  std::size_t raw_cols = 0;
  tabular::CleaningReport cleaning;
  tabular::Table cleaned;
  std::vector<tabular::ColumnSummary> summary;
  double class_balance = 0.0;
  std::optional<tabular::StandardizationParams> scaler;
  models::TrainedModel model;
  metrics::EvalReport eval;
  FormSchema schema;
  std::vector<Check> checks;
  std::size_t fit_rows = 0;
  std::uint64_t seed = 42;
  double clean_seconds = 0.0;
  double train_seconds = 0.0;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const Check* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }
};

/// Cleans `raw` with the profile's fixed order, splits, optionally scales
/// (fitted on the training split), trains and evaluates on both splits.
inline RunResult run_task(const TaskProfile& profile, const tabular::Table& raw, const RunOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  RunResult res;
  res.task = profile.task;
  res.raw_rows = raw.rows();
  res.raw_cols = raw.cols();
  res.seed = opts.seed;

  const auto t0 = clock::now();
  tabular::Table input = opts.expand_by_count ? expand_by_count(raw, "count") : raw;
  auto [cleaned, report] = tabular::clean(input, profile.cleaning);
  res.cleaning = report;
  res.cleaned = cleaned.with_label(profile.label);
  res.summary = tabular::describe(res.cleaned);
  res.class_balance = tabular::class_balance(res.cleaned, profile.label);
  res.clean_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  tabular::SplitSpec split = profile.split;
  split.seed = opts.seed;
  auto [train, test] = tabular::split(res.cleaned, split);
  res.schema = derive_schema(profile.task, train, profile.label);
  if (profile.standardize) {
    auto [scaled_train, params] = tabular::standardize(train);
    res.scaler = params;
    std::vector<tabular::Column> cols;
    for (std::size_t c = 0; c < test.cols(); ++c) {
      auto col = test.column(c);
      if (const auto* sc = params.find(col.name))
        for (auto& v : col.values) v = (v - sc->mean) / sc->std;
      cols.push_back(std::move(col));
    }
    test = tabular::Table(test.name(), std::move(cols), test.provenance(), profile.label);
    train = std::move(scaled_train);
  }

  const auto train_m = models::LabeledMatrix::from_table(train, profile.label);
  const auto test_m = models::LabeledMatrix::from_table(test, profile.label);
  const int classes = std::max(train_m.classes(), test_m.classes());

  const std::size_t subsample = opts.train_subsample.value_or(profile.train_subsample);
  tabular::Table fit_table = train;
  if (subsample > 0 && subsample < train.rows()) {
    const double frac = (static_cast<double>(subsample) + 0.5) / static_cast<double>(train.rows());
    const auto idx = tabular::split_indices(train, {frac, opts.seed, profile.label});
    fit_table = train.select_rows(idx.train, train.name() + ".fit");
  }
  const auto fit_base = models::LabeledMatrix::from_table(fit_table, profile.label);
  const models::LabeledMatrix fit_m(fit_base.rows(), fit_base.dims(), fit_base.features(), fit_base.labels(),
                                    fit_base.feature_names(), std::max(classes, fit_base.classes()));
  res.fit_rows = fit_m.rows();

  ModelSpec spec = opts.spec;
  spec.kind = opts.model.value_or(profile.model);
  spec.forest.seed = spec.sgd.seed = spec.svm.seed = opts.seed;
  const auto t1 = clock::now();
  res.model = train_model(fit_m, spec);
  res.train_seconds = std::chrono::duration<double>(clock::now() - t1).count();

  res.eval = metrics::evaluate(train_m.labels(), predict_all(res.model, train_m), test_m.labels(),
                               predict_all(res.model, test_m));

  if (opts.check_golden) {
    const auto& g = profile.golden;
    auto add = [&](std::string name, bool ok, std::string detail) {
      res.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    add("raw_shape", res.raw_rows == g.raw_rows && res.raw_cols == g.raw_cols,
        std::to_string(res.raw_rows) + "x" + std::to_string(res.raw_cols) + " (expected " +
            std::to_string(g.raw_rows) + "x" + std::to_string(g.raw_cols) + ")");
    add("rows_out", report.rows_out == g.rows_out,
        std::to_string(report.rows_out) + " (expected " + std::to_string(g.rows_out) + ")");
    if (g.duplicates_removed)
      add("duplicates_removed", report.duplicates_removed == *g.duplicates_removed,
          std::to_string(report.duplicates_removed) + " (expected " + std::to_string(*g.duplicates_removed) + ")");
    add("class_balance", std::abs(res.class_balance - g.class_balance) <= g.class_balance_tolerance,
        format_fixed(res.class_balance, 4) + " (expected " + format_fixed(g.class_balance, 4) + " +/- " +
            format_exact(g.class_balance_tolerance) + ")");
    const double tr = res.eval.train_accuracy(), te = res.eval.test_accuracy();
    if (g.min_train_accuracy)
      add("train_accuracy", tr >= *g.min_train_accuracy,
          format_fixed(tr, 4) + " (required >= " + format_fixed(*g.min_train_accuracy, 4) + ")");
    if (g.min_test_accuracy)
      add("test_accuracy", te >= *g.min_test_accuracy,
          format_fixed(te, 4) + " (required >= " + format_fixed(*g.min_test_accuracy, 4) + ")");
    if (g.max_train_test_gap)
      add("train_vs_test", tr >= te - *g.max_train_test_gap,
          "train " + format_fixed(tr, 4) + " vs test " + format_fixed(te, 4));
  }
  return res;
}

/// Writes reports, the model file and a deployable bundle into `dir`.
/// Every artifact except run.log is a deterministic function of the inputs.
inline void write_artifacts(const RunResult& res, const TaskProfile& profile, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw IoError("cannot write '" + (dir / name).string() + "'");
    return os;
  };
  {
    auto os = open("cleaning_report.csv");
    tabular::write_report_csv(os, res.cleaning);
  }
  {
    auto os = open("cleaning_report.log");
    tabular::write_report_log(os, res.cleaning);
  }
  {
    auto os = open("describe.csv");
    tabular::write_describe_csv(os, res.summary);
  }
  {
    auto os = open("correlation.csv");
    tabular::write_correlation_csv(os, tabular::correlation_matrix(res.cleaned));
  }
  {
    auto os = open("eval_report.csv");
    metrics::write_eval_csv(os, res.eval);
  }
  {
    auto os = open("eval_report.txt");
    os << "train accuracy: " << format_fixed(res.eval.train_accuracy(), 4) << '\n'
       << "test accuracy:  " << format_fixed(res.eval.test_accuracy(), 4) << "\n\n"
       << "confusion matrix (test)\n";
    metrics::write_confusion_text(os, res.eval.test_cm);
    os << "\nclassification report (test)\n";
    metrics::write_report_text(os, res.eval.test);
  }
  {
    auto os = open("checks.csv");
    os << "check,passed,detail\n";
    for (const auto& c : res.checks) csv::write_record(os, {c.name, c.passed ? "true" : "false", c.detail});
  }
  models::save_model_file((dir / "model.txt").string(), res.model);
  TaskBundle bundle{res.task, profile.label, res.seed, "model.txt", res.scaler, res.schema};
  save_bundle(dir / "bundle.json", bundle, models::model_id(res.model));
  {
    auto os = open("run.log");
    os << "task: " << to_string(res.task) << "\nseed: " << res.seed << "\nmodel: " << models::model_id(res.model)
       << "\nfit rows: " << res.fit_rows << "\nclean seconds: " << format_fixed(res.clean_seconds, 3)
       << "\ntrain seconds: " << format_fixed(res.train_seconds, 3) << '\n';
  }
}

}  // namespace sentinel::pipeline
