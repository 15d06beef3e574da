#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/core/error.hpp"

namespace sentinel::csv {

using Record = std::vector<std::string>;

/// Incremental RFC-4180 reader. Accepts LF or CRLF line endings, quoted
/// fields with embedded separators, newlines and doubled quotes.
class Reader {
 public:
  explicit Reader(std::istream& in, char sep = ',') : in_(in), sep_(sep) {}

  /// Reads the next record. Returns false at end of input. Physical line
  /// numbers are 1-based and refer to the first line of the record.
  bool next(Record& out) {
    out.clear();
    int c = in_.get();
    if (c == EOF) return false;
    ++line_;
    record_line_ = line_;
    // skip a UTF-8 BOM on the very first record
    if (record_line_ == 1 && c == 0xEF) {
      if (in_.get() == 0xBB && in_.get() == 0xBF) {
        c = in_.get();
      } else {
        throw ParseError(record_line_, 1, "invalid byte-order mark");
      }
    }
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    for (;; c = in_.get()) {
      if (quoted) {
        if (c == EOF) throw ParseError(record_line_, out.size() + 1, "unterminated quoted field");
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(static_cast<char>(c));
        }
        continue;
      }
      if (c == EOF || c == '\n') {
        if (!field.empty() && field.back() == '\r' && !after_quote) field.pop_back();
        out.push_back(std::move(field));
        return true;
      }
      if (c == '\r' && after_quote) continue;
      if (c == sep_) {
        out.push_back(std::move(field));
        field.clear();
        after_quote = false;
        continue;
      }
      if (after_quote) throw ParseError(record_line_, out.size() + 1, "characters after closing quote");
      if (c == '"') {
        if (!field.empty()) throw ParseError(record_line_, out.size() + 1, "quote inside unquoted field");
        quoted = true;
        continue;
      }
      field.push_back(static_cast<char>(c));
    }
  }

  std::size_t record_line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  char sep_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

inline bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos || (!s.empty() && (s.front() == ' ' || s.back() == ' '));
}

inline std::string escape(std::string_view s) {
  if (!needs_quotes(s)) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

inline void write_record(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << escape(fields[i]);
  }
  os << '\n';
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace sentinel::csv
