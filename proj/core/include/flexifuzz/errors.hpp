#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flexifuzz {

/// Invalid argument to a library operation (dimension mismatch, bad range, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the dense solver when a pivot falls below the singularity
/// threshold. Carries the zero-based index of the offending pivot.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& msg, std::size_t pivot_index)
      : std::runtime_error(msg), pivot_index_(pivot_index) {}
  std::size_t pivot_index() const noexcept { return pivot_index_; }

 private:
  std::size_t pivot_index_;
};

/// CSV / JSON input that cannot be parsed. Coordinates are 1-based file
/// positions (header counts as row 1).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t row = 0, std::size_t col = 0)
      : std::runtime_error(msg), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// A random split produced a single-class partition.
class SplitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training failed (singular KKT system or residual check failure).
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rank statistic whose correction denominator collapsed.
class DegenerateStatisticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace flexifuzz
