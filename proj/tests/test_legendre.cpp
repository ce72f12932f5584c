#include <doctest.h>

#include <cmath>

#include "cwls/errors.hpp"
#include "cwls/legendre.hpp"
#include "cwls/rng.hpp"
#include "oracles.hpp"

using namespace cwls;

TEST_CASE("pointwise values against the recurrence oracle") {
  CHECK(legendre_1d(0, 0.37) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(legendre_1d(1, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(legendre_1d(2, 0.0) ==
        doctest::Approx(-std::sqrt(5.0) / 2.0).epsilon(1e-15));
  for (int n : {3, 7, 15}) {
    for (double y : {-0.93, -0.2, 0.11, 0.78}) {
      CHECK(legendre_1d(n, y) ==
            doctest::Approx(std::sqrt(2.0 * n + 1.0) * oracles::legendre_p(n, y))
                .epsilon(1e-13));
    }
  }
}

TEST_CASE("1-D orthonormality under the probability measure via quadrature") {
  std::vector<double> nodes, weights;
  oracles::gauss_legendre(16, nodes, weights);
  for (int n = 0; n <= 10; ++n) {
    for (int m = n; m <= 10; ++m) {
      double ip = 0.0;
      for (std::size_t q = 0; q < nodes.size(); ++q)
        ip += 0.5 * weights[q] * legendre_1d(n, nodes[q]) * legendre_1d(m, nodes[q]);
      CHECK(std::abs(ip - (n == m ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("recurrence stays bounded by sqrt(2n+1) up to degree 200") {
  for (int n : {0, 1, 5, 50, 137, 200}) {
    for (double y = -1.0; y <= 1.0; y += 0.01) {
      CHECK(std::abs(legendre_1d(n, y)) <= std::sqrt(2.0 * n + 1.0) + 1e-12);
    }
  }
}

TEST_CASE("basis row for the trivial space is [1]") {
  TensorLegendreBasis basis(hyperbolic_cross(2, 0));
  const Eigen::VectorXd row = basis.eval_row(Eigen::Vector2d(0.3, -0.8));
  CHECK(row.size() == 1);
  CHECK(row(0) == doctest::Approx(1.0));
}

TEST_CASE("basis row at the corner is the product of normalizations") {
  TensorLegendreBasis basis(hyperbolic_cross(2, 3));
  const Eigen::VectorXd row = basis.eval_row(Eigen::Vector2d(1.0, 1.0));
  const auto& set = basis.index_set();
  for (int j = 0; j < basis.size(); ++j) {
    const double expected = std::sqrt((2.0 * set[j][0] + 1) * (2.0 * set[j][1] + 1));
    CHECK(row(j) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("basis row worked example at (0.5, -0.5)") {
  TensorLegendreBasis basis(hyperbolic_cross(2, 1));
  const Eigen::VectorXd row = basis.eval_row(Eigen::Vector2d(0.5, -0.5));
  CHECK(row(0) == doctest::Approx(1.0));
  CHECK(row(1) == doctest::Approx(-std::sqrt(3.0) / 2.0));
  CHECK(row(2) == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("eval_rows matches eval_row and respects column blocks") {
  TensorLegendreBasis basis(hyperbolic_cross(3, 4));
  RngStream rng(11, 0);
  Eigen::MatrixXd points(40, 3);
  for (int i = 0; i < points.size(); ++i)
    points.data()[i] = rng.uniform_pm1();
  const Eigen::MatrixXd rows = basis.eval_rows(points);
  for (int i = 0; i < points.rows(); ++i) {
    const Eigen::VectorXd row = basis.eval_row(points.row(i).transpose());
    CHECK((rows.row(i).transpose() - row).cwiseAbs().maxCoeff() <= 1e-14);
  }
  const Eigen::MatrixXd block = basis.eval_block(points, 2, 5);
  CHECK((block - rows.middleCols(2, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tensor orthonormality by Monte Carlo within 3 standard errors") {
  TensorLegendreBasis basis(hyperbolic_cross(2, 4));
  RngStream rng(2024, 3);
  const int samples = 200000;
  const int n = basis.size();
  // A few fixed pairs, including diagonals.
  const std::vector<std::pair<int, int>> pairs = {
      {0, 0}, {1, 1}, {n - 1, n - 1}, {0, 1}, {1, 2}, {2, n - 1}};
  std::vector<double> sum(pairs.size(), 0.0), sumsq(pairs.size(), 0.0);
  Eigen::Vector2d y;
  for (int s = 0; s < samples; ++s) {
    y << rng.uniform_pm1(), rng.uniform_pm1();
    const Eigen::VectorXd row = basis.eval_row(y);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double v = row(pairs[p].first) * row(pairs[p].second);
      sum[p] += v;
      sumsq[p] += v * v;
    }
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double mean = sum[p] / samples;
    const double var = sumsq[p] / samples - mean * mean;
    const double se = std::sqrt(var / samples);
    const double expected = pairs[p].first == pairs[p].second ? 1.0 : 0.0;
    CHECK(std::abs(mean - expected) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  TensorLegendreBasis basis(hyperbolic_cross(2, 2));
  CHECK_THROWS_AS(basis.eval_row(Eigen::Vector3d(0, 0, 0)), ConfigError);
}
