#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "sentinel/core/csv.hpp"
#include "sentinel/core/numfmt.hpp"
#include "sentinel/tabular/table.hpp"

namespace sentinel::tabular {

struct ColumnSummary {
  std::string name;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

/// Per-column statistics over present cells only. Columns with no present
/// cells report count 0 and NaN for every statistic.
inline std::vector<ColumnSummary> describe(const Table& t) {
  std::vector<ColumnSummary> out;
  out.reserve(t.cols());
  for (std::size_t c = 0; c < t.cols(); ++c) {
    const auto& col = t.column(c);
    ColumnSummary s;
    s.name = col.name;
    double sum = 0.0;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (!col.present[r]) continue;
      ++s.count;
      sum += col.values[r];
      s.min = std::min(s.min, col.values[r]);
      s.max = std::max(s.max, col.values[r]);
    }
    if (s.count == 0) {
      s.mean = s.std = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
    } else {
      s.mean = sum / static_cast<double>(s.count);
      double ss = 0.0;
      for (std::size_t r = 0; r < t.rows(); ++r)
        if (col.present[r]) ss += (col.values[r] - s.mean) * (col.values[r] - s.mean);
      s.std = std::sqrt(ss / static_cast<double>(s.count));
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Mean of a binary label column, i.e. the positive-class prevalence.
inline double class_balance(const Table& t, std::string_view label) {
  const auto& col = t.column(t.require_column(label));
  if (col.values.empty()) throw ValidationError("label column '" + col.name + "' is empty", {col.name});
  double sum = 0.0;
  for (std::size_t r = 0; r < col.values.size(); ++r) {
    if (!col.present[r]) throw ValidationError("label column '" + col.name + "' has missing cells", {col.name});
    const double v = col.values[r];
    if (v != 0.0 && v != 1.0) throw ValidationError("label column '" + col.name + "' is not binary", {col.name});
    sum += v;
  }
  return sum / static_cast<double>(col.values.size());
}

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<double> values;  // row-major m x m
  double at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
};

/// Pearson correlation between all column pairs. A constant column
/// correlates 0 with every other column and 1 with itself.
inline CorrelationMatrix correlation_matrix(const Table& t) {
  if (t.missing_cells() != 0) throw ValidationError("correlation_matrix requires a table without missing cells");
  const std::size_t m = t.cols();
  const std::size_t n = t.rows();
  CorrelationMatrix out{t.column_names(), std::vector<double>(m * m, 0.0)};
  std::vector<std::vector<double>> centered(m);
  std::vector<double> norm(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    const auto& v = t.column(c).values;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean = n ? mean / static_cast<double>(n) : 0.0;
    bool constant = true;
    for (std::size_t r = 1; r < n && constant; ++r) constant = v[r] == v[0];
    centered[c].resize(n);
    for (std::size_t r = 0; r < n; ++r) centered[c][r] = constant ? 0.0 : v[r] - mean;
    for (double x : centered[c]) norm[c] += x * x;
    norm[c] = std::sqrt(norm[c]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    out.values[i * m + i] = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      double r = 0.0;
      if (norm[i] > 0.0 && norm[j] > 0.0) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += centered[i][k] * centered[j][k];
        r = std::clamp(dot / (norm[i] * norm[j]), -1.0, 1.0);
      }
      out.values[i * m + j] = out.values[j * m + i] = r;
    }
  }
  return out;
}

inline void write_describe_csv(std::ostream& os, const std::vector<ColumnSummary>& rows) {
  os << "column,count,mean,std,min,max\n";
  for (const auto& s : rows)
    csv::write_record(os, {s.name, std::to_string(s.count), format_exact(s.mean), format_exact(s.std),
                           format_exact(s.min), format_exact(s.max)});
}

inline void write_describe_log(std::ostream& os, const std::vector<ColumnSummary>& rows) {
  std::size_t width = 6;
  for (const auto& s : rows) width = std::max(width, s.name.size());
  auto pad = [&](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
  os << pad("column", width) << "  count        mean         std         min         max\n";
  for (const auto& s : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%7zu %11.4f %11.4f %11.4f %11.4f", s.count, s.mean, s.std, s.min, s.max);
    os << pad(s.name, width) << buf << '\n';
  }
}

inline void write_correlation_csv(std::ostream& os, const CorrelationMatrix& cm) {
  std::vector<std::string> header{""};
  header.insert(header.end(), cm.names.begin(), cm.names.end());
  csv::write_record(os, header);
  for (std::size_t i = 0; i < cm.names.size(); ++i) {
    std::vector<std::string> row{cm.names[i]};
    for (std::size_t j = 0; j < cm.names.size(); ++j) row.push_back(format_exact(cm.at(i, j)));
    csv::write_record(os, row);
  }
}

}  // namespace sentinel::tabular
