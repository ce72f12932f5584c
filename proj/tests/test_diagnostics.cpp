#include <doctest.h>

#include <cmath>

#include "cwls/diagnostics.hpp"
#include "cwls/errors.hpp"
#include "cwls/sampler.hpp"
#include "cwls/wls.hpp"
#include "oracles.hpp"

using namespace cwls;

TEST_CASE("constant_C is one for orthonormal columns") {
  Eigen::MatrixXd A(5, 2);
  A.setZero();
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;
  CHECK(constant_C(A) == doctest::Approx(1.0).epsilon(1e-14));
  Eigen::MatrixXd col = Eigen::MatrixXd::Zero(4, 1);
  col(2, 0) = 1.0;
  CHECK(constant_C(col) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("constant_C matches a dense eigenvalue oracle") {
  RngStream rng(61, 1);
  Eigen::MatrixXd A(30, 5);
  for (int i = 0; i < A.size(); ++i) A.data()[i] = rng.uniform_pm1();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A.transpose() * A);
  const double expected = 1.0 / std::sqrt(eig.eigenvalues().minCoeff());
  CHECK(constant_C(A) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("error_on_grid endpoints") {
  Eigen::VectorXd f(4);
  f << 1, -2, 3, 0.5;
  CHECK(error_on_grid(f, f) == 0.0);
  CHECK(error_on_grid(f, Eigen::VectorXd::Zero(4)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(error_on_grid(Eigen::VectorXd::Zero(4), f), DataError);
}

TEST_CASE("weighted sup-norm gap") {
  Eigen::VectorXd f(3), p(3), pi(3);
  f << 1, 2, 3;
  p << 1, 2, 3;
  pi << 0.25, 0.5, 0.25;
  CHECK(weighted_supnorm_gap(f, p, pi, 3) == 0.0);

  // N=1 uniform pi: K pi_i = 1, so the norm is max |g|.
  Eigen::VectorXd uniform_pi = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  p << 0, 0, 0;
  CHECK(weighted_supnorm_gap(f, p, uniform_pi, 3) == doctest::Approx(3.0));

  // Worked 3-point distribution.
  Eigen::VectorXd worked(3);
  worked << 5.0 / 12, 1.0 / 6, 5.0 / 12;
  Eigen::VectorXd g(3);
  g << 1, 1, 1;
  const double expected = 1.0 / std::sqrt(3.0 * (1.0 / 6.0));
  CHECK(weighted_supnorm_gap(g, Eigen::VectorXd::Zero(3), worked, 3) ==
        doctest::Approx(expected).epsilon(1e-14));

  // Mass-zero index with a nonzero gap is flagged as infinite.
  Eigen::VectorXd broken_pi(3);
  broken_pi << 0.5, 0.0, 0.5;
  CHECK(std::isinf(weighted_supnorm_gap(g, Eigen::VectorXd::Zero(3), broken_pi, 3)));
}

TEST_CASE("estimate_D is one on the factorization's own grid") {
  const Domain dom = annulus_domain(2, 0.25, 1.0);
  RngStream rng(62, 1);
  const KGrid grid = generate_grid(dom, 600, rng);
  TensorLegendreBasis basis(hyperbolic_cross(2, 7));
  const OrthoFactorization f = assemble_and_factor(grid, basis);
  EvalGrid self;
  self.points = grid.points;
  CHECK(estimate_D(f, basis, self) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("estimate_D on a fresh grid stays near one for a dense K-grid") {
  const Domain dom = cube_domain(1);
  RngStream rng(63, 1);
  const KGrid grid = generate_grid(dom, 200, rng);
  TensorLegendreBasis basis(hyperbolic_cross(1, 4));
  const OrthoFactorization f = assemble_and_factor(grid, basis);
  RngStream eval_rng(63, 2);
  const EvalGrid eval = make_eval_grid(dom, 100000, eval_rng);
  const double d_hat = estimate_D(f, basis, eval);
  CHECK(d_hat >= 0.8);
  CHECK(d_hat <= 1.5);
}

TEST_CASE("bound calculators against a long-double oracle") {
  // Theorem values computed independently at extended precision.
  const long double num = 100.0L * std::log(40000.0L);
  const long double den = 1.5L * std::log(1.5L) - 0.5L;
  CHECK(bound_M_method1(100, 0.01, 0.5) ==
        static_cast<long long>(std::ceil(num / den)));
  CHECK(bound_M_method1(100, 0.01, 0.5) == 9794);

  const long double maw2 = 10.0L * std::log(200.0L) / den;
  CHECK(bound_M_maw2(10, 0.1, 0.5) == static_cast<long long>(std::ceil(maw2)));

  const long double lden = 0.5L * std::log(0.5L) + 0.5L;
  const long double maw1 = 10.0L * std::log(100.0L) / lden;
  CHECK(bound_M_maw1(10, 0.1, 0.5) == static_cast<long long>(std::ceil(maw1)));

  const long double kb = 400.0L * std::log(200.0L) / lden;
  CHECK(bound_K(10, 0.1, 0.5, 400.0) == static_cast<long long>(std::ceil(kb)));

  const long double kt = std::log(400.0L) / den;
  CHECK(bound_k_method2(10, 0.1, 0.5) == static_cast<long long>(std::ceil(kt)));
}

TEST_CASE("nikolskii lambda-rectangle bound") {
  CHECK(nikolskii_lambda_rect(7, 1.0) == doctest::Approx(49.0));
  CHECK(nikolskii_lambda_rect(7, 0.5) == doctest::Approx(98.0));
  double prev = 0.0;
  for (double lambda : {1.0, 0.8, 0.5, 0.25, 0.1}) {
    const double value = nikolskii_lambda_rect(20, lambda);
    CHECK(value >= prev);  // decreasing lambda inflates the bound
    prev = value;
  }
  CHECK_THROWS_AS(nikolskii_lambda_rect(5, 0.0), ConfigError);
  CHECK_THROWS_AS(nikolskii_lambda_rect(5, 1.5), ConfigError);
}

TEST_CASE("bounds are monotone and parameters validated") {
  long long prev = 0;
  for (int n : {1, 2, 5, 20, 100, 500}) {
    const long long m = bound_M_method1(n, 0.01, 0.5);
    CHECK(m >= prev);
    prev = m;
  }
  long long prev_delta = std::numeric_limits<long long>::max();
  for (double delta : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9}) {
    const long long m = bound_M_method1(50, 0.01, delta);
    CHECK(m <= prev_delta);
    prev_delta = m;
  }
  CHECK_THROWS_AS(bound_M_method1(10, 0.0, 0.5), ConfigError);
  CHECK_THROWS_AS(bound_M_method1(10, 0.1, 1.0), ConfigError);
  CHECK(bound_M_method1(100, 0.01, 0.5) == bound_M_method1(100, 0.01, 0.5));
}

TEST_CASE("rate inequality used by the tail bound") {
  for (double delta = 0.01; delta < 1.0; delta += 0.007) {
    const double upper = (1 + delta) * std::log1p(delta) - delta;
    const double lower = (1 - delta) * std::log1p(-delta) + delta;
    CHECK(upper <= lower + 1e-15);
  }
}

TEST_CASE("error_off_grid of an exactly fitted polynomial is tiny") {
  const Domain dom = annulus_domain(2, 0.25, 1.0);
  RngStream rng(64, 1);
  const KGrid grid = generate_grid(dom, 500, rng);
  TensorLegendreBasis basis(hyperbolic_cross(2, 5));
  const OrthoFactorization f = assemble_and_factor(grid, basis);
  RngStream coef_rng(64, 2);
  Eigen::VectorXd c(f.size());
  for (int i = 0; i < c.size(); ++i) c(i) = coef_rng.uniform_pm1();
  // Treat the fitted polynomial itself as the target.
  const Eigen::VectorXd g = f.R().triangularView<Eigen::Upper>().solve(c);
  auto target = [&](const Eigen::VectorXd& y) {
    return basis.eval_row(y).dot(g);
  };
  RngStream eval_rng(64, 3);
  CHECK(error_off_grid(dom, target, f, basis, c, 2000, eval_rng) <= 1e-10);
}

TEST_CASE("report serialization carries bounds and the N_t annotation") {
  const DiagnosticsReport report = make_report(100, 0.5, 0.01, 0.25);
  CHECK(report.theory.at("M_method1") == 9794);
  CHECK(report.theory.count("K_lambda_rect") == 1);
  const std::string json = report_to_json(report);
  CHECK(json.find("M_method1") != std::string::npos);
  CHECK(json.find("N_t") != std::string::npos);
}

TEST_CASE("constant_C flags a singular system as infinite") {
  CHECK(std::isinf(constant_C(Eigen::MatrixXd::Zero(4, 2))));
}
