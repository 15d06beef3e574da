#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "sentinel/core/csv.hpp"
#include "sentinel/core/error.hpp"
#include "sentinel/core/numfmt.hpp"

namespace sentinel::metrics {

/// counts[i][j] = samples of true class classes[i] predicted as classes[j].
struct ConfusionMatrix {
  std::vector<int> classes;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t size() const { return classes.size(); }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts)
      for (auto c : row) t += c;
    return t;
  }
  std::size_t row_sum(std::size_t i) const {
    std::size_t s = 0;
    for (auto c : counts[i]) s += c;
    return s;
  }
  std::size_t col_sum(std::size_t j) const {
    std::size_t s = 0;
    for (const auto& row : counts) s += row[j];
    return s;
  }
  std::size_t trace() const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i][i];
    return s;
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Every class id seen in either sequence gets a row and a column, sorted
/// ascending.
inline ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    throw ValidationError("y_true and y_pred differ in length (" + std::to_string(y_true.size()) + " vs " +
                          std::to_string(y_pred.size()) + ")");
  if (y_true.empty()) throw ValidationError("confusion matrix needs at least one sample");
  std::set<int> ids(y_true.begin(), y_true.end());
  ids.insert(y_pred.begin(), y_pred.end());
  ConfusionMatrix cm;
  cm.classes.assign(ids.begin(), ids.end());
  cm.counts.assign(cm.classes.size(), std::vector<std::size_t>(cm.classes.size(), 0));
  auto pos = [&](int c) {
    return static_cast<std::size_t>(std::lower_bound(cm.classes.begin(), cm.classes.end(), c) - cm.classes.begin());
  };
  for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts[pos(y_true[i])][pos(y_pred[i])];
  return cm;
}

inline double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw ValidationError("accuracy of an empty confusion matrix is undefined");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

struct ClassScores {
  int cls = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct Averages {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

/// Per-class precision / recall / F1 with macro and support-weighted
/// averages. Zero denominators yield 0 and set `zero_division`.
struct ClassificationReport {
  std::vector<ClassScores> per_class;
  Averages macro;
  Averages weighted;
  double accuracy = 0.0;
  bool zero_division = false;
};

inline ClassificationReport classification_report(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw ValidationError("classification report of an empty confusion matrix is undefined");
  ClassificationReport rep;
  rep.accuracy = accuracy(cm);
  const double k = static_cast<double>(cm.size());
  for (std::size_t i = 0; i < cm.size(); ++i) {
    ClassScores s;
    s.cls = cm.classes[i];
    s.support = cm.row_sum(i);
    const auto tp = static_cast<double>(cm.counts[i][i]);
    const auto predicted = cm.col_sum(i);
    if (predicted == 0) rep.zero_division = true;
    else s.precision = tp / static_cast<double>(predicted);
    if (s.support == 0) rep.zero_division = true;
    else s.recall = tp / static_cast<double>(s.support);
    if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    rep.macro.precision += s.precision / k;
    rep.macro.recall += s.recall / k;
    rep.macro.f1 += s.f1 / k;
    const double w = static_cast<double>(s.support) / static_cast<double>(total);
    rep.weighted.precision += w * s.precision;
    rep.weighted.recall += w * s.recall;
    rep.weighted.f1 += w * s.f1;
    rep.per_class.push_back(s);
  }
  rep.macro.support = rep.weighted.support = total;
  return rep;
}

/// Train/test evaluation pair.
struct EvalReport {
  ConfusionMatrix train_cm;
  ConfusionMatrix test_cm;
  ClassificationReport train;
  ClassificationReport test;
  double train_accuracy() const { return train.accuracy; }
  double test_accuracy() const { return test.accuracy; }
};

inline EvalReport evaluate(std::span<const int> train_true, std::span<const int> train_pred,
                           std::span<const int> test_true, std::span<const int> test_pred) {
  EvalReport r;
  r.train_cm = confusion(train_true, train_pred);
  r.test_cm = confusion(test_true, test_pred);
  r.train = classification_report(r.train_cm);
  r.test = classification_report(r.test_cm);
  return r;
}

/// One row per class plus accuracy and averages.
inline void write_report_csv(std::ostream& os, const ClassificationReport& rep, const std::string& split = "test") {
  os << "split,class,precision,recall,f1,support\n";
  for (const auto& s : rep.per_class)
    csv::write_record(os, {split, std::to_string(s.cls), format_exact(s.precision), format_exact(s.recall),
                           format_exact(s.f1), std::to_string(s.support)});
  csv::write_record(os, {split, "accuracy", "", "", format_exact(rep.accuracy), std::to_string(rep.macro.support)});
  csv::write_record(os, {split, "macro avg", format_exact(rep.macro.precision), format_exact(rep.macro.recall),
                         format_exact(rep.macro.f1), std::to_string(rep.macro.support)});
  csv::write_record(os, {split, "weighted avg", format_exact(rep.weighted.precision),
                         format_exact(rep.weighted.recall), format_exact(rep.weighted.f1),
                         std::to_string(rep.weighted.support)});
}

inline void write_eval_csv(std::ostream& os, const EvalReport& r) {
  write_report_csv(os, r.train, "train");
  std::ostringstream tail;
  write_report_csv(tail, r.test, "test");
  const auto s = tail.str();
  os << s.substr(s.find('\n') + 1);
}

/// Aligned text layout in the style of the common "classification report".
inline void write_report_text(std::ostream& os, const ClassificationReport& rep) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%14s %10s %10s %10s %10s\n\n", "", "precision", "recall", "f1-score", "support");
  os << buf;
  for (const auto& s : rep.per_class) {
    std::snprintf(buf, sizeof buf, "%14d %10.2f %10.2f %10.2f %10zu\n", s.cls, s.precision, s.recall, s.f1, s.support);
    os << buf;
  }
  os << '\n';
  std::snprintf(buf, sizeof buf, "%14s %10s %10s %10.2f %10zu\n", "accuracy", "", "", rep.accuracy, rep.macro.support);
  os << buf;
  std::snprintf(buf, sizeof buf, "%14s %10.2f %10.2f %10.2f %10zu\n", "macro avg", rep.macro.precision,
                rep.macro.recall, rep.macro.f1, rep.macro.support);
  os << buf;
  std::snprintf(buf, sizeof buf, "%14s %10.2f %10.2f %10.2f %10zu\n", "weighted avg", rep.weighted.precision,
                rep.weighted.recall, rep.weighted.f1, rep.weighted.support);
  os << buf;
  if (rep.zero_division) os << "note: some precision/recall values had a zero denominator and were set to 0\n";
}

inline void write_confusion_text(std::ostream& os, const ConfusionMatrix& cm) {
  os << "true\\pred";
  for (int c : cm.classes) os << '\t' << c;
  os << '\n';
  for (std::size_t i = 0; i < cm.size(); ++i) {
    os << cm.classes[i];
    for (auto v : cm.counts[i]) os << '\t' << v;
    os << '\n';
  }
}

}  // namespace sentinel::metrics
