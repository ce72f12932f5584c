#pragma once

#include <stdexcept>
#include <string>

namespace cwls {

/// Invalid user-supplied configuration: unknown names, bad parameters,
/// malformed config files.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad input data, e.g. a non-finite function value at a sample point.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Rejection sampler exhausted its per-point attempt budget.
class SamplingError : public std::runtime_error {
public:
  SamplingError(const std::string& what, double acceptance_rate)
      : std::runtime_error(what), acceptance_rate(acceptance_rate) {}
  double acceptance_rate;
};

/// The scaled design matrix B is numerically rank deficient on the grid.
class FullRankFailure : public std::runtime_error {
public:
  FullRankFailure(const std::string& what, double sigma_min, double sigma_max)
      : std::runtime_error(what), sigma_min(sigma_min), sigma_max(sigma_max) {}
  double sigma_min;
  double sigma_max;
};

/// The least-squares matrix A is numerically rank deficient.
class SolveFailure : public std::runtime_error {
public:
  SolveFailure(const std::string& what, double sigma_min, double sigma_max)
      : std::runtime_error(what), sigma_min(sigma_min), sigma_max(sigma_max) {}
  double sigma_min;
  double sigma_max;
};

}  // namespace cwls
