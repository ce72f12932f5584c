#include "cwls/legendre.hpp"

#include <cmath>

#include "cwls/errors.hpp"

namespace cwls {

double legendre_1d(int n, double y) {
  // Three-term recurrence (k+1)P_{k+1} = (2k+1) y P_k - k P_{k-1}.
  double pkm1 = 1.0;
  if (n == 0) return 1.0;
  double pk = y;
  for (int k = 1; k < n; ++k) {
    const double pkp1 = ((2 * k + 1) * y * pk - k * pkm1) / (k + 1);
    pkm1 = pk;
    pk = pkp1;
  }
  return std::sqrt(2.0 * n + 1.0) * pk;
}

TensorLegendreBasis::TensorLegendreBasis(MultiIndexSet index_set)
    : set_(std::move(index_set)) {}

namespace {

// All orthonormal degrees 0..max_deg at each entry of ys; result is
// ys.size() x (max_deg+1).  One simultaneous recurrence per point instead of
// one per basis index keeps row evaluation cheap.
Eigen::MatrixXd legendre_table(const Eigen::Ref<const Eigen::VectorXd>& ys,
                               int max_deg) {
  const Eigen::Index m = ys.size();
  Eigen::MatrixXd table(m, max_deg + 1);
  table.col(0).setOnes();
  if (max_deg >= 1) table.col(1) = ys;
  for (int k = 1; k < max_deg; ++k) {
    table.col(k + 1) =
        ((2 * k + 1) * ys.array() * table.col(k).array() - k * table.col(k - 1).array()) /
        (k + 1);
  }
  for (int k = 0; k <= max_deg; ++k) table.col(k) *= std::sqrt(2.0 * k + 1.0);
  return table;
}

}  // namespace

Eigen::VectorXd TensorLegendreBasis::eval_row(const Eigen::VectorXd& y) const {
  if (y.size() != dimension())
    throw ConfigError("point dimension does not match basis dimension");
  const Eigen::MatrixXd table = legendre_table(y, set_.max_degree());
  Eigen::VectorXd row(size());
  for (int j = 0; j < size(); ++j) {
    const MultiIndex& idx = set_[j];
    double v = 1.0;
    for (int k = 0; k < dimension(); ++k) v *= table(k, idx[k]);
    row(j) = v;
  }
  return row;
}

Eigen::MatrixXd TensorLegendreBasis::eval_block(
    const Eigen::Ref<const Eigen::MatrixXd>& points, int col_begin,
    int col_end) const {
  if (points.cols() != dimension())
    throw ConfigError("point dimension does not match basis dimension");
  const Eigen::Index npts = points.rows();
  const int d = dimension();

  int max_deg = 0;
  for (int j = col_begin; j < col_end; ++j)
    for (int k = 0; k < d; ++k) max_deg = std::max(max_deg, set_[j][k]);

  std::vector<Eigen::MatrixXd> tables(d);
  for (int k = 0; k < d; ++k) tables[k] = legendre_table(points.col(k), max_deg);

  Eigen::MatrixXd block(npts, col_end - col_begin);
  for (int j = col_begin; j < col_end; ++j) {
    const MultiIndex& idx = set_[j];
    auto col = block.col(j - col_begin);
    col = tables[0].col(idx[0]);
    for (int k = 1; k < d; ++k) col.array() *= tables[k].col(idx[k]).array();
  }
  return block;
}

Eigen::MatrixXd TensorLegendreBasis::eval_rows(
    const Eigen::Ref<const Eigen::MatrixXd>& points) const {
  return eval_block(points, 0, size());
}

}  // namespace cwls
