#pragma once

#include <Eigen/Dense>

#include "cwls/multi_index.hpp"

namespace cwls {

/// Degree-n Legendre polynomial at y, normalized to unit L^2 norm under the
/// uniform *probability* measure on [-1,1]: sqrt(2n+1) * P_n(y).
double legendre_1d(int n, double y);

/// Tensor products of orthonormal Legendre polynomials, indexed by a
/// multi-index set in canonical order: psi_j(y) = prod_k L_{n_k^(j)}(y_k).
/// Restricting the arguments to points of an irregular domain inside the
/// cube gives the nonorthogonal starting basis for the discrete
/// orthogonalization.
class TensorLegendreBasis {
public:
  explicit TensorLegendreBasis(MultiIndexSet index_set);

  const MultiIndexSet& index_set() const { return set_; }
  int dimension() const { return set_.dimension(); }
  int size() const { return set_.size(); }

  /// Row (psi_1(y), ..., psi_N(y)).
  Eigen::VectorXd eval_row(const Eigen::VectorXd& y) const;

  /// Rows for many points (points is P x d, one point per row), restricted
  /// to basis columns [col_begin, col_end).
  Eigen::MatrixXd eval_block(const Eigen::Ref<const Eigen::MatrixXd>& points,
                             int col_begin, int col_end) const;

  /// Full P x N matrix of basis rows.
  Eigen::MatrixXd eval_rows(const Eigen::Ref<const Eigen::MatrixXd>& points) const;

private:
  MultiIndexSet set_;
};

}  // namespace cwls
