#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hlab/grid.hpp"

namespace hlab {

class MetricError : public std::runtime_error {
 public:
  MetricError(const std::string& what, Index3 node)
      : std::runtime_error(what), node_(node) {}
  const Index3& node() const { return node_; }

 private:
  Index3 node_;
};

/// Raised by the linear and nonlinear solvers. Carries the diagnostics the
/// caller needs to decide what went wrong.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history, double residual)
      : std::runtime_error(what), history_(std::move(history)), residual_(residual) {}
  const std::vector<double>& history() const { return history_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> history_;
  double residual_;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : std::runtime_error(key_path + ": " + what), key_path_(key_path) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

/// A check was asked to run on data that does not satisfy its hypothesis.
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& what, double measured)
      : std::runtime_error(what), measured_(measured) {}
  double measured() const { return measured_; }

 private:
  double measured_;
};

}  // namespace hlab
