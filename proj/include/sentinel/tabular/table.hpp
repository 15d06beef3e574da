#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sentinel/core/error.hpp"

namespace sentinel::tabular {

enum class ColumnKind { numeric, binary, label };

inline const char* to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::binary: return "binary";
    case ColumnKind::label: return "label";
  }
  return "?";
}

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::size_t missing_count = 0;
};

/// One column: values plus a presence mask. Absent cells hold 0.0 in
/// `values` so that row hashing and comparison stay canonical.
struct Column {
  std::string name;
  std::vector<double> values;
  std::vector<std::uint8_t> present;
};

using Cell = std::optional<double>;

/// Immutable column-oriented table with a per-cell missingness mask.
/// Every operation in this namespace returns a new Table.
class Table {
 public:
  Table() = default;

  /// Builds a table from columns of equal length. Validates unique names and
  /// finiteness, then derives column kinds and missing counts.
  Table(std::string name, std::vector<Column> columns, std::string provenance = {},
        std::optional<std::string> label = std::nullopt)
      : name_(std::move(name)), provenance_(std::move(provenance)), columns_(std::move(columns)) {
    rows_ = columns_.empty() ? 0 : columns_.front().values.size();
    std::unordered_set<std::string> seen;
    for (auto& col : columns_) {
      if (!seen.insert(col.name).second) throw ValidationError("duplicate column name '" + col.name + "'", {col.name});
      if (col.values.size() != rows_ || col.present.size() != rows_)
        throw InvariantError("column '" + col.name + "' has inconsistent length");
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!col.present[r]) {
          col.values[r] = 0.0;
        } else if (!std::isfinite(col.values[r])) {
          throw ValidationError("non-finite value in column '" + col.name + "'", {col.name});
        }
      }
    }
    meta_.reserve(columns_.size());
    for (const auto& col : columns_) meta_.push_back(derive_meta(col));
    if (label) set_label(*label);
  }

  /// Convenience constructor from a row-major grid of optional cells.
  static Table from_rows(std::string name, const std::vector<std::string>& names,
                         const std::vector<std::vector<Cell>>& rows, std::string provenance = {}) {
    std::vector<Column> cols(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
      cols[c].name = names[c];
      cols[c].values.reserve(rows.size());
      cols[c].present.reserve(rows.size());
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != names.size())
        throw ValidationError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) + " cells, expected " +
                              std::to_string(names.size()));
      for (std::size_t c = 0; c < names.size(); ++c) {
        cols[c].values.push_back(rows[r][c].value_or(0.0));
        cols[c].present.push_back(rows[r][c].has_value() ? 1 : 0);
      }
    }
    return Table(std::move(name), std::move(cols), std::move(provenance));
  }

  const std::string& name() const noexcept { return name_; }
  const std::string& provenance() const noexcept { return provenance_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<ColumnMeta>& columns() const noexcept { return meta_; }
  const Column& column(std::size_t c) const { return columns_.at(c); }

  Cell cell(std::size_t r, std::size_t c) const {
    const auto& col = columns_.at(c);
    if (!col.present.at(r)) return std::nullopt;
    return col.values[r];
  }

  std::optional<std::size_t> find_column(std::string_view name) const {
    for (std::size_t c = 0; c < columns_.size(); ++c)
      if (columns_[c].name == name) return c;
    return std::nullopt;
  }

  std::size_t require_column(std::string_view name) const {
    if (auto c = find_column(name)) return *c;
    throw NotFoundError("column '" + std::string(name) + "' not found in table '" + name_ + "'");
  }

  std::vector<std::string> column_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
  }

  std::size_t missing_cells() const {
    std::size_t n = 0;
    for (const auto& m : meta_) n += m.missing_count;
    return n;
  }

  std::optional<std::size_t> label_column() const {
    for (std::size_t c = 0; c < meta_.size(); ++c)
      if (meta_[c].kind == ColumnKind::label) return c;
    return std::nullopt;
  }

  /// Returns a copy with `label` marked as the (single) label column.
  Table with_label(std::string_view label) const {
    Table t = *this;
    t.set_label(label);
    return t;
  }

  /// New table with the given rows, in the given order (repeats allowed).
  Table select_rows(std::span<const std::size_t> indices, std::string name = {}) const {
    std::vector<Column> cols(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      cols[c].name = columns_[c].name;
      cols[c].values.reserve(indices.size());
      cols[c].present.reserve(indices.size());
      for (auto r : indices) {
        cols[c].values.push_back(columns_[c].values.at(r));
        cols[c].present.push_back(columns_[c].present.at(r));
      }
    }
    return rebuild(std::move(cols), name.empty() ? name_ : std::move(name));
  }

  /// New table keeping only the listed columns, in the listed order.
  Table select_columns(std::span<const std::size_t> keep) const {
    std::vector<Column> cols;
    cols.reserve(keep.size());
    for (auto c : keep) cols.push_back(columns_.at(c));
    return rebuild(std::move(cols), name_);
  }

  /// Row-major copy of one row.
  std::vector<Cell> row(std::size_t r) const {
    std::vector<Cell> out;
    out.reserve(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) out.push_back(cell(r, c));
    return out;
  }

  bool rows_equal(std::size_t a, std::size_t b) const {
    for (const auto& col : columns_)
      if (col.present[a] != col.present[b] || col.values[a] != col.values[b]) return false;
    return true;
  }

  std::uint64_t row_hash(std::size_t r) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& col : columns_) {
      // +0.0 and -0.0 compare equal; hash them identically
      double v = col.values[r] == 0.0 ? 0.0 : col.values[r];
      std::uint64_t bits;
      static_assert(sizeof bits == sizeof v);
      std::memcpy(&bits, &v, sizeof v);
      h = (h ^ col.present[r]) * 0x100000001b3ULL;
      h = (h ^ bits) * 0x100000001b3ULL;
    }
    return h;
  }

 private:
  Table rebuild(std::vector<Column> cols, std::string name) const {
    std::optional<std::string> label;
    if (auto lc = label_column()) label = columns_[*lc].name;
    std::optional<std::string> kept_label;
    if (label)
      for (const auto& c : cols)
        if (c.name == *label) kept_label = label;
    return Table(std::move(name), std::move(cols), provenance_, kept_label);
  }

  static ColumnMeta derive_meta(const Column& col) {
    ColumnMeta m;
    m.name = col.name;
    bool binary = true;
    for (std::size_t r = 0; r < col.values.size(); ++r) {
      if (!col.present[r]) {
        ++m.missing_count;
      } else if (col.values[r] != 0.0 && col.values[r] != 1.0) {
        binary = false;
      }
    }
    m.kind = binary ? ColumnKind::binary : ColumnKind::numeric;
    return m;
  }

  void set_label(std::string_view label) {
    const auto idx = require_column(label);
    for (std::size_t c = 0; c < meta_.size(); ++c) {
      if (meta_[c].kind == ColumnKind::label) meta_[c] = derive_meta(columns_[c]);
    }
    meta_[idx].kind = ColumnKind::label;
  }

  std::string name_;
  std::string provenance_;
  std::vector<Column> columns_;
  std::vector<ColumnMeta> meta_;
  std::size_t rows_ = 0;
};

}  // namespace sentinel::tabular
