#pragma once

#include <algorithm>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sentinel/core/csv.hpp"
#include "sentinel/tabular/table.hpp"

namespace sentinel::tabular {

enum class DropReason { sparse, zero_variance, excluded_by_config };

inline const char* to_string(DropReason r) {
  switch (r) {
    case DropReason::sparse: return "sparse";
    case DropReason::zero_variance: return "zero_variance";
    case DropReason::excluded_by_config: return "excluded_by_config";
  }
  return "?";
}

struct DroppedColumn {
  std::string name;
  DropReason reason;
  bool operator==(const DroppedColumn&) const = default;
};

/// Row and column accounting for one cleaning step or a whole pipeline.
/// Invariant: rows_out == rows_in - duplicates_removed - missing_rows_removed.
struct CleaningReport {
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  std::size_t duplicates_removed = 0;
  std::size_t missing_rows_removed = 0;
  std::vector<DroppedColumn> columns_dropped;

  static CleaningReport identity(std::size_t rows) { return {rows, rows, 0, 0, {}}; }

  bool balanced() const { return rows_out + duplicates_removed + missing_rows_removed == rows_in; }

  /// Chains a later step onto this one.
  CleaningReport& then(const CleaningReport& next) {
    if (next.rows_in != rows_out) throw InvariantError("cleaning steps do not chain: row counts differ");
    rows_out = next.rows_out;
    duplicates_removed += next.duplicates_removed;
    missing_rows_removed += next.missing_rows_removed;
    columns_dropped.insert(columns_dropped.end(), next.columns_dropped.begin(), next.columns_dropped.end());
    return *this;
  }
};

inline Table drop_column_indices(const Table& t, const std::vector<std::size_t>& drop) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < t.cols(); ++c)
    if (std::find(drop.begin(), drop.end(), c) == drop.end()) keep.push_back(c);
  return t.select_columns(keep);
}

/// Removes the named columns (reason excluded_by_config). Unknown names are
/// reported as not-found so that typos in configuration surface early.
inline std::pair<Table, CleaningReport> drop_columns(const Table& t, const std::vector<std::string>& names) {
  CleaningReport rep = CleaningReport::identity(t.rows());
  std::vector<std::size_t> drop;
  for (const auto& n : names) {
    drop.push_back(t.require_column(n));
    rep.columns_dropped.push_back({n, DropReason::excluded_by_config});
  }
  return {drop_column_indices(t, drop), rep};
}

/// Keeps the first occurrence of each identical full row. Absent cells
/// compare equal to absent cells.
inline std::pair<Table, std::size_t> dedupe(const Table& t) {
  std::unordered_multimap<std::uint64_t, std::size_t> seen;
  seen.reserve(t.rows());
  std::vector<std::size_t> keep;
  keep.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto h = t.row_hash(r);
    auto [lo, hi] = seen.equal_range(h);
    bool dup = false;
    for (auto it = lo; it != hi && !dup; ++it) dup = t.rows_equal(it->second, r);
    if (dup) continue;
    seen.emplace(h, r);
    keep.push_back(r);
  }
  return {t.select_rows(keep), t.rows() - keep.size()};
}

/// Drops every column whose missing fraction exceeds `max_missing_fraction`.
inline std::pair<Table, CleaningReport> drop_sparse_columns(const Table& t, double max_missing_fraction) {
  if (!(max_missing_fraction >= 0.0 && max_missing_fraction <= 1.0))
    throw ValidationError("max_missing_fraction must lie in [0, 1]");
  CleaningReport rep = CleaningReport::identity(t.rows());
  std::vector<std::size_t> drop;
  if (t.rows() > 0) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const double frac = static_cast<double>(t.columns()[c].missing_count) / static_cast<double>(t.rows());
      if (frac > max_missing_fraction) {
        drop.push_back(c);
        rep.columns_dropped.push_back({t.columns()[c].name, DropReason::sparse});
      }
    }
  }
  return {drop_column_indices(t, drop), rep};
}

/// Drops columns whose present cells are all equal. Columns named in
/// `protect` (typically the label) are never dropped.
inline std::pair<Table, CleaningReport> drop_zero_variance(const Table& t, const std::set<std::string>& protect = {}) {
  CleaningReport rep = CleaningReport::identity(t.rows());
  std::vector<std::size_t> drop;
  for (std::size_t c = 0; c < t.cols(); ++c) {
    const auto& col = t.column(c);
    if (protect.count(col.name)) continue;
    bool constant = true;
    std::optional<double> first;
    for (std::size_t r = 0; r < t.rows() && constant; ++r) {
      if (!col.present[r]) continue;
      if (!first) first = col.values[r];
      else if (col.values[r] != *first) constant = false;
    }
    if (constant) {
      drop.push_back(c);
      rep.columns_dropped.push_back({col.name, DropReason::zero_variance});
    }
  }
  return {drop_column_indices(t, drop), rep};
}

inline std::pair<Table, CleaningReport> drop_rows_with_missing(const Table& t) {
  std::vector<std::size_t> keep;
  keep.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    bool complete = true;
    for (std::size_t c = 0; c < t.cols() && complete; ++c) complete = t.column(c).present[r] != 0;
    if (complete) keep.push_back(r);
  }
  CleaningReport rep{t.rows(), keep.size(), 0, t.rows() - keep.size(), {}};
  return {t.select_rows(keep), rep};
}

inline std::pair<Table, CleaningReport> dedupe_with_report(const Table& t) {
  auto [out, removed] = dedupe(t);
  CleaningReport rep{t.rows(), out.rows(), removed, 0, {}};
  return {std::move(out), rep};
}

/// Settings for the fixed cleaning order: configured drops, sparse columns,
/// duplicates, incomplete rows, constant columns.
struct CleaningConfig {
  std::vector<std::string> exclude_columns;
  double max_missing_fraction = 0.5;
  std::set<std::string> protect_columns;
};

inline std::pair<Table, CleaningReport> clean(const Table& raw, const CleaningConfig& cfg) {
  CleaningReport rep = CleaningReport::identity(raw.rows());
  auto [t1, r1] = drop_columns(raw, cfg.exclude_columns);
  rep.then(r1);
  auto [t2, r2] = drop_sparse_columns(t1, cfg.max_missing_fraction);
  rep.then(r2);
  auto [t3, r3] = dedupe_with_report(t2);
  rep.then(r3);
  auto [t4, r4] = drop_rows_with_missing(t3);
  rep.then(r4);
  auto [t5, r5] = drop_zero_variance(t4, cfg.protect_columns);
  rep.then(r5);
  return {std::move(t5), rep};
}

inline void write_report_csv(std::ostream& os, const CleaningReport& rep) {
  os << "metric,value\n";
  os << "rows_in," << rep.rows_in << '\n';
  os << "rows_out," << rep.rows_out << '\n';
  os << "duplicates_removed," << rep.duplicates_removed << '\n';
  os << "missing_rows_removed," << rep.missing_rows_removed << '\n';
  for (const auto& d : rep.columns_dropped)
    csv::write_record(os, {"dropped_column:" + std::string(to_string(d.reason)), d.name});
}

inline void write_report_log(std::ostream& os, const CleaningReport& rep) {
  os << "rows in:              " << rep.rows_in << '\n'
     << "duplicates removed:   " << rep.duplicates_removed << '\n'
     << "missing rows removed: " << rep.missing_rows_removed << '\n'
     << "rows out:             " << rep.rows_out << '\n';
  for (const auto& d : rep.columns_dropped) os << "dropped column [" << to_string(d.reason) << "] " << d.name << '\n';
}

}  // namespace sentinel::tabular
