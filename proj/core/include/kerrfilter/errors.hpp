#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace kerrfilter {

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace detail

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual, const std::string& what)
      : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

// The requested state does not fit in the truncated Fock space.
class CutoffTooSmall : public Error {
 public:
  CutoffTooSmall(double edge_population, double leak_tol, int n_max)
      : Error("cutoff too small: edge population " + detail::sci(edge_population) +
              " exceeds leak_tol " + detail::sci(leak_tol) + " at n_max=" +
              std::to_string(n_max)),
        edge_population_(edge_population) {}

  double edge_population() const noexcept { return edge_population_; }

 private:
  double edge_population_;
};

// Scenario validation failure; field() names the offending key.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error("invalid field '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error("parse error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Truncation-edge population grew past the hard abort threshold.
class LeakExceeded : public Error {
 public:
  LeakExceeded(double edge_population, double threshold, double time)
      : Error("edge population " + detail::sci(edge_population) + " exceeded " +
              detail::sci(threshold) + " at t=" + detail::sci(time)),
        edge_population_(edge_population) {}

  double edge_population() const noexcept { return edge_population_; }

 private:
  double edge_population_;
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace kerrfilter
