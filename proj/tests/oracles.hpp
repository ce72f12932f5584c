// Test-only oracles, independent of the library's implementation paths.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <vector>

namespace oracles {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& nodes,
                           std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

// Plain recurrence for the unnormalized P_n.
inline double legendre_p(int n, double x) {
  double p0 = 1.0;
  if (n == 0) return p0;
  double p1 = x;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// All indices in the box {0..order}^d passing the membership predicate.
template <typename Pred>
std::set<std::vector<int>> enumerate_box(int d, int order, Pred member) {
  std::set<std::vector<int>> out;
  std::vector<int> idx(d, 0);
  for (;;) {
    if (member(idx)) out.insert(idx);
    int pos = 0;
    while (pos < d && ++idx[pos] > order) idx[pos++] = 0;
    if (pos == d) break;
  }
  return out;
}

inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& A,
                                        const Eigen::VectorXd& b) {
  return (A.transpose() * A).ldlt().solve(A.transpose() * b);
}

}  // namespace oracles
