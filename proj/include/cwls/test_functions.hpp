#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>

#include "cwls/discrete_measure.hpp"
#include "cwls/domain.hpp"

namespace cwls {

/// A benchmark target.  For "inspace:seed=S" entries the evaluator is empty
/// until the function is bound to a concrete space (its coefficients live in
/// the orthonormalized basis, which only exists once a factorization does).
struct TargetFunction {
  std::string name;
  int d = 0;
  std::function<double(const Eigen::VectorXd&)> evaluator;
  std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::MatrixXd>&)> batch;
  std::string smoothness;
  bool needs_space = false;
  std::uint64_t in_space_seed = 0;
  Eigen::VectorXd coefficients;  // phi-basis coefficients, in_space only

  double operator()(const Eigen::VectorXd& y) const { return evaluator(y); }

  /// Values at many points (one per row); uses the vectorized path if the
  /// entry provides one.
  Eigen::VectorXd values(const Eigen::Ref<const Eigen::MatrixXd>& points) const;
};

/// Catalog lookup: "f1".."f4" or "inspace:seed=S" (returned unbound).
/// f4 requires d >= 2.
TargetFunction builtin_function(const std::string& name, int d);

/// Random element of the current space: coefficients uniform in [-1,1] per
/// phi, drawn from stream (seed, N) so the target is reproducible and
/// redraws differ across space sizes.
TargetFunction make_in_space(const OrthoFactorization& fact,
                             const TensorLegendreBasis& basis,
                             std::uint64_t seed);

TargetFunction bind_in_space(const TargetFunction& unbound,
                             const OrthoFactorization& fact,
                             const TensorLegendreBasis& basis);

/// Reject pairings whose singularity meets the domain: f2 needs the origin
/// excluded, f4 the whole y1 = y2 = 0 axis.  Probes the indicator; throws
/// ConfigError on a bad pairing.
void enforce_domain_pairing(const TargetFunction& f, const Domain& domain);

}  // namespace cwls
