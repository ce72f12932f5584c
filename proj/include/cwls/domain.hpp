#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "cwls/rng.hpp"

namespace cwls {

/// A compact domain inside [-1,1]^d, represented by its indicator.
/// nominal_fraction is vol(Omega)/vol([-1,1]^d) where a closed form is
/// known (used by sampling-rate checks); otherwise unset.
struct Domain {
  int d = 0;
  std::function<bool(const Eigen::VectorXd&)> indicator;
  std::string name;
  std::optional<double> nominal_fraction;

  bool contains(const Eigen::VectorXd& y) const { return indicator(y); }
};

Domain cube_domain(int d);

/// { y : r_min <= |y|_2 <= r_max }, radii in (0,1], r_min < r_max.
Domain annulus_domain(int d, double r_min, double r_max);

/// { y in (-1,1)^d : y_1 + ... + y_d <= 1 }.
Domain halfspace_cut_cube(int d);

/// { y in (-1,1)^d : y_1^2 + y_2^2 >= r^2 }, requires d >= 2.
Domain cylinder_complement(int d, double r);

/// Lookup by name with a key-value parameter map; names: cube, annulus,
/// halfspace_cut_cube, cylinder_complement.
Domain builtin_domain(const std::string& name, int d,
                      const std::map<std::string, double>& params);

Domain domain_intersect(Domain a, Domain b);
Domain domain_union(Domain a, Domain b);
Domain domain_minus(Domain a, Domain b);

/// Config grammar: "cube", "annulus:rmin=0.25,rmax=1", "halfspace",
/// "cylcomp:r=0.5", and combinators "intersect(a;b)", "union(a;b)",
/// "minus(a;b)".
Domain parse_domain(const std::string& spec, int d);

inline constexpr int kDefaultMaxAttemptsPerPoint = 10000;

/// count i.i.d. draws from the uniform measure on the domain by rejection
/// against the uniform proposal on [-1,1]^d; one point per row.  Throws
/// SamplingError with the empirical acceptance rate if any single point
/// exhausts max_attempts_per_point proposals.
Eigen::MatrixXd sample_uniform(const Domain& domain, int count, RngStream& rng,
                               int max_attempts_per_point = kDefaultMaxAttemptsPerPoint);

}  // namespace cwls
