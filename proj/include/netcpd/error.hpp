#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netcpd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line and column of the first
/// offending byte (column 0 when the whole line is at fault).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line, std::size_t column = 0)
      : Error(what + " (line " + std::to_string(line) +
              (column ? ", column " + std::to_string(column) : std::string{}) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A DNMT block that is not symmetric. `time` and `row` are 1-based.
class AsymmetryError : public FormatError {
 public:
  AsymmetryError(std::size_t time, std::size_t row, std::size_t col, std::size_t line)
      : FormatError("asymmetric adjacency block at (t=" + std::to_string(time) +
                        ",row=" + std::to_string(row) + ",col=" + std::to_string(col) + ")",
                    line, col),
        time_(time),
        row_(row) {}

  std::size_t time() const noexcept { return time_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t time_;
  std::size_t row_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Index or parameter outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The data cannot support the requested statistic (all-zero sequence,
/// identical signals, interval too short for the subsampling grid, ...).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace netcpd
