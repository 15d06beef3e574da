#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sentinel/tabular/table.hpp"

namespace sentinel::tabular {

struct ScaledColumn {
  std::string name;
  double mean = 0.0;
  double std = 1.0;
  bool operator==(const ScaledColumn&) const = default;
};

/// Per-column centering and unit-variance scaling learned from a table.
/// Population (divide-by-n) standard deviation; std > 0 for every entry.
struct StandardizationParams {
  std::string fitted_on;
  std::vector<ScaledColumn> columns;
  std::vector<std::string> skipped;  // constant columns, left unscaled

  const ScaledColumn* find(std::string_view name) const {
    for (const auto& c : columns)
      if (c.name == name) return &c;
    return nullptr;
  }
  bool operator==(const StandardizationParams&) const = default;
};

using Record = std::map<std::string, double>;

/// Standardizes every column except the label and those in `exclude`.
inline std::pair<Table, StandardizationParams> standardize(const Table& t, const std::set<std::string>& exclude = {}) {
  StandardizationParams params;
  params.fitted_on = t.name();
  const auto label = t.label_column();
  std::vector<Column> cols;
  cols.reserve(t.cols());
  for (std::size_t c = 0; c < t.cols(); ++c) {
    Column col = t.column(c);
    if ((label && *label == c) || exclude.count(col.name)) {
      cols.push_back(std::move(col));
      continue;
    }
    for (auto p : col.present)
      if (!p) throw ValidationError("cannot standardize column '" + col.name + "' with missing cells", {col.name});
    const std::size_t n = col.values.size();
    bool constant = true;
    for (std::size_t r = 1; r < n && constant; ++r) constant = col.values[r] == col.values[0];
    if (constant) {
      params.skipped.push_back(col.name);
      cols.push_back(std::move(col));
      continue;
    }
    double mean = 0.0;
    for (double v : col.values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : col.values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    for (double& v : col.values) v = (v - mean) / sd;
    params.columns.push_back({col.name, mean, sd});
    cols.push_back(std::move(col));
  }
  std::optional<std::string> label_name;
  if (label) label_name = t.column(*label).name;
  return {Table(t.name(), std::move(cols), t.provenance(), label_name), std::move(params)};
}

/// Applies learned scaling to an unseen record. Keys not covered by the
/// params pass through untouched.
inline Record apply_standardization(const Record& record, const StandardizationParams& params) {
  Record out = record;
  for (const auto& c : params.columns) {
    auto it = out.find(c.name);
    if (it == out.end()) throw ValidationError("record is missing feature '" + c.name + "'", {c.name});
    it->second = (it->second - c.mean) / c.std;
  }
  return out;
}

inline Record invert_standardization(const Record& record, const StandardizationParams& params) {
  Record out = record;
  for (const auto& c : params.columns) {
    auto it = out.find(c.name);
    if (it == out.end()) throw ValidationError("record is missing feature '" + c.name + "'", {c.name});
    it->second = it->second * c.std + c.mean;
  }
  return out;
}

/// Scales a dense feature vector laid out as `names`.
inline std::vector<double> apply_standardization(std::span<const double> x, const std::vector<std::string>& names,
                                                 const StandardizationParams& params) {
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < names.size() && i < out.size(); ++i)
    if (const auto* c = params.find(names[i])) out[i] = (out[i] - c->mean) / c->std;
  return out;
}

}  // namespace sentinel::tabular
