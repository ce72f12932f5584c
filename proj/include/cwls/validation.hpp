#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cwls {

struct CheckResult {
  std::string label;
  double value = 0.0;
  double threshold = 0.0;
  bool upper_bound = true;  // pass means value <= threshold (else >=)
  bool pass = false;
};

struct ValidationReport {
  std::string suite;
  bool passed = false;
  std::vector<CheckResult> checks;

  std::string to_json() const;
};

/// Statistical/identity suites wrapping the library invariants:
///   orthonormality - QR orthonormality and the discrete phi identities over
///                    randomized (domain, dimension, space, K) configs
///   distributions  - probability-mass identities of the sampling plans
///   recovery       - exact recovery of in-space targets, on and off grid
///   chernoff       - Monte Carlo check of the conditioning tail bound
///   oracle         - solver vs normal equations; index sets vs enumeration
/// All suites are deterministic for a fixed seed.
ValidationReport run_validation(const std::string& suite,
                                std::uint64_t seed = 20260801);

std::vector<std::string> validation_suites();

}  // namespace cwls
