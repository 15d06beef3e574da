#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sentinel/core/csv.hpp"
#include "sentinel/core/error.hpp"
#include "sentinel/core/numfmt.hpp"
#include "sentinel/tabular/table.hpp"

namespace sentinel::tabular {

struct LoadOptions {
  /// Cell text (after trimming) treated as absent in every column.
  std::set<std::string> missing_markers{"?", "", "NA"};
  /// Extra per-column sentinel codes, e.g. "9" meaning "unknown".
  std::map<std::string, std::set<std::string>> column_missing_codes;
  std::string name = "table";
  std::string provenance;
};

/// Reads a CSV with a mandatory header row into a Table. Row numbers in
/// errors are 1-based physical lines of the source (header is line 1).
inline Table load_csv(std::istream& in, const LoadOptions& opts = {}) {
  csv::Reader reader(in);
  csv::Record header;
  if (!reader.next(header)) throw ParseError(1, 1, "missing header row");
  for (auto& h : header) h = std::string(csv::trim(h));

  std::vector<Column> cols(header.size());
  std::vector<const std::set<std::string>*> codes(header.size(), nullptr);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw ParseError(1, c + 1, "empty column name");
    cols[c].name = header[c];
    if (auto it = opts.column_missing_codes.find(header[c]); it != opts.column_missing_codes.end())
      codes[c] = &it->second;
  }

  csv::Record rec;
  while (reader.next(rec)) {
    if (rec.size() == 1 && csv::trim(rec[0]).empty() && header.size() > 1) continue;  // blank line
    if (rec.size() != header.size())
      throw ParseError(reader.record_line(), std::min(rec.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(rec.size()));
    for (std::size_t c = 0; c < rec.size(); ++c) {
      const std::string text(csv::trim(rec[c]));
      const bool missing = opts.missing_markers.count(text) > 0 || (codes[c] && codes[c]->count(text) > 0);
      if (missing) {
        cols[c].values.push_back(0.0);
        cols[c].present.push_back(0);
        continue;
      }
      auto v = parse_double(text);
      if (!v) throw CellError(reader.record_line(), c + 1, header[c], text);
      cols[c].values.push_back(*v);
      cols[c].present.push_back(1);
    }
  }
  return Table(opts.name, std::move(cols), opts.provenance);
}

inline Table load_csv_file(const std::string& path, LoadOptions opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  if (opts.provenance.empty()) opts.provenance = path;
  return load_csv(in, opts);
}

/// Writes the table back out as CSV; absent cells become `missing_text`.
inline void write_csv(std::ostream& os, const Table& t, const std::string& missing_text = "") {
  csv::write_record(os, t.column_names());
  std::vector<std::string> fields(t.cols());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      auto v = t.cell(r, c);
      fields[c] = v ? format_exact(*v) : missing_text;
    }
    csv::write_record(os, fields);
  }
}

}  // namespace sentinel::tabular
