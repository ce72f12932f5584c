#include "cwls/test_functions.hpp"

#include <cmath>
#include <memory>

#include "cwls/errors.hpp"
#include "cwls/rng.hpp"

namespace cwls {

Eigen::VectorXd TargetFunction::values(
    const Eigen::Ref<const Eigen::MatrixXd>& points) const {
  if (!evaluator && !batch)
    throw ConfigError("target '" + name + "' is unbound; it needs a space");
  if (batch) return batch(points);
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    out(i) = evaluator(points.row(i).transpose());
  return out;
}

TargetFunction builtin_function(const std::string& name, int d) {
  if (d < 1) throw ConfigError("function dimension must be >= 1");
  TargetFunction f;
  f.name = name;
  f.d = d;
  if (name == "f1") {
    f.smoothness = "entire";
    f.evaluator = [d](const Eigen::VectorXd& y) {
      return std::exp(-y.sum() / d);
    };
  } else if (name == "f2") {
    f.smoothness = "not differentiable at the origin";
    f.evaluator = [](const Eigen::VectorXd& y) {
      return 1.0 / y.array().abs().sqrt().sum();
    };
  } else if (name == "f3") {
    f.smoothness = "analytic (Genz product peak)";
    f.evaluator = [d](const Eigen::VectorXd& y) {
      double prod = 1.0;
      for (int i = 1; i <= d; ++i) {
        const double shift = (i % 2 == 1 ? 1.0 : -1.0) / (i + 1);
        const double t = y(i - 1) + shift;
        prod *= (d / 4.0) / (d / 4.0 + t * t);
      }
      return prod;
    };
  } else if (name == "f4") {
    if (d < 2) throw ConfigError("f4 needs d >= 2");
    f.smoothness = "singular on the y1 = y2 = 0 axis";
    f.evaluator = [](const Eigen::VectorXd& y) {
      return 1.0 / (y(0) * y(0) + y(1) * y(1));
    };
  } else if (name.rfind("inspace", 0) == 0) {
    f.needs_space = true;
    f.smoothness = "polynomial, element of the fitted space";
    const auto colon = name.find(':');
    if (colon != std::string::npos) {
      const std::string params = name.substr(colon + 1);
      if (params.rfind("seed=", 0) != 0)
        throw ConfigError("inspace spec '" + name + "' takes seed=<integer>");
      try {
        f.in_space_seed = std::stoull(params.substr(5));
      } catch (const std::invalid_argument&) {
        throw ConfigError("bad seed in '" + name + "'");
      }
    }
  } else {
    throw ConfigError("unknown function '" + name + "'");
  }
  return f;
}

TargetFunction make_in_space(const OrthoFactorization& fact,
                             const TensorLegendreBasis& basis,
                             std::uint64_t seed) {
  const int n = fact.size();
  RngStream rng(seed, static_cast<std::uint64_t>(n));
  Eigen::VectorXd coeffs(n);
  for (int i = 0; i < n; ++i) coeffs(i) = rng.uniform_pm1();

  // c . phi(y) = g . psi(y): the closure only needs the index set and g,
  // not the factorization itself.
  const Eigen::VectorXd g =
      fact.R().triangularView<Eigen::Upper>().solve(coeffs);
  auto set = basis.index_set();
  auto shared_basis = std::make_shared<TensorLegendreBasis>(std::move(set));
  auto shared_g = std::make_shared<Eigen::VectorXd>(g);

  TargetFunction f;
  f.name = "inspace(N=" + std::to_string(n) + ")";
  f.d = basis.dimension();
  f.smoothness = "polynomial, element of the fitted space";
  f.coefficients = coeffs;
  f.in_space_seed = seed;
  f.evaluator = [shared_basis, shared_g](const Eigen::VectorXd& y) {
    return shared_basis->eval_row(y).dot(*shared_g);
  };
  f.batch = [shared_basis, shared_g](const Eigen::Ref<const Eigen::MatrixXd>& pts) {
    constexpr Eigen::Index chunk = 8192;
    Eigen::VectorXd out(pts.rows());
    for (Eigen::Index s = 0; s < pts.rows(); s += chunk) {
      const Eigen::Index e = std::min(pts.rows(), s + chunk);
      out.segment(s, e - s) =
          shared_basis->eval_rows(pts.middleRows(s, e - s)) * (*shared_g);
    }
    return out;
  };
  return f;
}

TargetFunction bind_in_space(const TargetFunction& unbound,
                             const OrthoFactorization& fact,
                             const TensorLegendreBasis& basis) {
  if (!unbound.needs_space)
    throw ConfigError("'" + unbound.name + "' does not need binding");
  return make_in_space(fact, basis, unbound.in_space_seed);
}

void enforce_domain_pairing(const TargetFunction& f, const Domain& domain) {
  if (f.d != domain.d)
    throw ConfigError("function and domain dimensions differ");
  if (f.name == "f2") {
    if (domain.contains(Eigen::VectorXd::Zero(domain.d)))
      throw ConfigError(
          "f2 is singular at the origin, which lies inside '" + domain.name +
          "'; pair it with a domain excluding the origin");
  } else if (f.name == "f4") {
    // Probe a few points of the y1 = y2 = 0 axis.
    for (double t : {0.0, -0.9, -0.5, 0.5, 0.9}) {
      Eigen::VectorXd probe = Eigen::VectorXd::Zero(domain.d);
      for (int k = 2; k < domain.d; ++k) probe(k) = t;
      if (domain.contains(probe))
        throw ConfigError(
            "f4 is singular on the y1 = y2 = 0 axis, which meets '" +
            domain.name + "'; pair it with a domain excluding that axis");
      if (domain.d == 2) break;
    }
  }
}

}  // namespace cwls
