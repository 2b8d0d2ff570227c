#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gekf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Logarithm requested at or beyond the cut locus.
class BranchError : public Error {
 public:
  using Error::Error;
};

/// Singular, non-finite or non-SPD quantities.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::vector<double> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  /// Step norms |μⁱ| of every iteration up to the failure.
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline void require_dim(long got, long want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
}

}  // namespace gekf
