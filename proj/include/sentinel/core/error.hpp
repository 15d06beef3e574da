#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sentinel {

/// Broad failure category. The CLI maps these onto exit codes and the
/// service maps them onto HTTP status codes.
enum class ErrorKind {
  validation,
  io,
  not_found,
  duplicate,
  consent,
  transport,
  unavailable,
  internal,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::duplicate: return "duplicate";
    case ErrorKind::consent: return "consent";
    case ErrorKind::transport: return "transport";
    case ErrorKind::unavailable: return "unavailable";
    case ErrorKind::internal: return "internal";
  }
  return "internal";
}

/// Process exit code for the CLI: 2 bad input, 3 I/O or remote, 70 internal.
inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::validation:
    case ErrorKind::not_found:
    case ErrorKind::duplicate:
    case ErrorKind::consent: return 2;
    case ErrorKind::io:
    case ErrorKind::transport:
    case ErrorKind::unavailable: return 3;
    case ErrorKind::internal: return 70;
  }
  return 70;
}

inline int http_status(ErrorKind k) {
  switch (k) {
    case ErrorKind::validation: return 400;
    case ErrorKind::consent: return 403;
    case ErrorKind::not_found: return 404;
    case ErrorKind::duplicate: return 409;
    case ErrorKind::transport: return 502;
    case ErrorKind::unavailable: return 503;
    case ErrorKind::io:
    case ErrorKind::internal: return 500;
  }
  return 500;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed CSV structure (unterminated quote, ragged row, missing header).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& msg)
      : Error(ErrorKind::validation,
              "parse error at row " + std::to_string(row) + ", column " + std::to_string(col) + ": " + msg),
        row_(row),
        col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// A cell that is neither a number nor a configured missing marker.
class CellError : public Error {
 public:
  CellError(std::size_t row, std::size_t col, std::string column, std::string text)
      : Error(ErrorKind::validation, "non-numeric cell '" + text + "' in column '" + column + "' at row " +
                                         std::to_string(row)),
        row_(row),
        col_(col),
        column_(std::move(column)),
        text_(std::move(text)) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }
  const std::string& column() const noexcept { return column_; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::size_t row_;
  std::size_t col_;
  std::string column_;
  std::string text_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg, std::vector<std::string> fields = {})
      : Error(ErrorKind::validation, msg), fields_(std::move(fields)) {}
  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  std::vector<std::string> fields_;
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& msg) : Error(ErrorKind::not_found, msg) {}
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(const std::string& id) : Error(ErrorKind::duplicate, "duplicate id '" + id + "'"), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class ConsentError : public Error {
 public:
  explicit ConsentError(const std::string& msg) : Error(ErrorKind::consent, msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

/// Remote endpoint unreachable, rate limited or over quota.
class TransportError : public Error {
 public:
  TransportError(const std::string& msg, std::optional<int> retry_after_seconds = std::nullopt)
      : Error(ErrorKind::transport, msg), retry_after_(retry_after_seconds) {}
  std::optional<int> retry_after() const noexcept { return retry_after_; }

 private:
  std::optional<int> retry_after_;
};

class UnavailableError : public Error {
 public:
  explicit UnavailableError(const std::string& msg) : Error(ErrorKind::unavailable, msg) {}
};

/// SGD produced a non-finite weight.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t epoch)
      : Error(ErrorKind::internal, "training diverged (non-finite weights) in epoch " + std::to_string(epoch)),
        epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& msg) : Error(ErrorKind::internal, msg) {}
};

}  // namespace sentinel
