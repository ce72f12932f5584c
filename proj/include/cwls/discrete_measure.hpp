#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cwls/domain.hpp"
#include "cwls/legendre.hpp"
#include "cwls/rng.hpp"

namespace cwls {

/// The K-point grid Z supporting the discrete orthogonality measure
/// tau = (1/K) sum_i delta(. - z_i).  One point per row.
struct KGrid {
  Eigen::MatrixXd points;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  int size() const { return static_cast<int>(points.rows()); }
  int dimension() const { return static_cast<int>(points.cols()); }
};

KGrid generate_grid(const Domain& domain, int K, RngStream& rng,
                    int max_attempts_per_point = kDefaultMaxAttemptsPerPoint);

/// Reduced QR factorization B = QR of the scaled design matrix
/// B = { psi_j(z_i)/sqrt(K) }, with Q's columns orthonormal and R upper
/// triangular with positive diagonal.  Columns of sqrt(K) Q are the values
/// of the tau-orthonormal basis {phi_i} on the grid.
///
/// Built column-by-column with classical Gram-Schmidt, each new column
/// orthogonalized twice against the existing ones; the positive diagonal
/// makes Q unique, so appending columns never perturbs earlier ones and the
/// adaptive method's per-column distributions stay valid across stages.
class OrthoFactorization {
public:
  OrthoFactorization() = default;

  const Eigen::MatrixXd& Q() const { return q_; }
  const Eigen::MatrixXd& R() const { return r_; }
  int grid_size() const { return static_cast<int>(q_.rows()); }
  int size() const { return static_cast<int>(q_.cols()); }

  double sigma_min() const { return sigma_min_; }
  double sigma_max() const { return sigma_max_; }

  /// (phi_1(y), ..., phi_N(y)) by forward substitution with R^T; at a grid
  /// point z_i this reproduces sqrt(K) * (row i of Q).
  Eigen::VectorXd eval_phi(const TensorLegendreBasis& basis,
                           const Eigen::VectorXd& y) const;

  /// phi rows for many points (P x N).
  Eigen::MatrixXd eval_phi_rows(const TensorLegendreBasis& basis,
                                const Eigen::Ref<const Eigen::MatrixXd>& points) const;

private:
  friend OrthoFactorization extend_factorization(OrthoFactorization f,
                                                 const KGrid& grid,
                                                 const TensorLegendreBasis& basis);

  Eigen::MatrixXd q_;
  Eigen::MatrixXd r_;
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
};

/// Factor the full basis against the grid.  Throws FullRankFailure when B is
/// numerically rank deficient (sigma_min/sigma_max below the gate
/// max(K,N)*eps*16, measured on R).
OrthoFactorization assemble_and_factor(const KGrid& grid,
                                       const TensorLegendreBasis& basis);

/// Append the basis columns beyond f's current size, orthonormalizing them
/// against the existing ones.  The first N_old columns of Q and the leading
/// block of R are bit-identical to f's.  The basis's index set must extend
/// the one f was built from (prefix property of the canonical order).
OrthoFactorization extend_factorization(OrthoFactorization f, const KGrid& grid,
                                        const TensorLegendreBasis& basis);

enum class RankPolicy {
  Regenerate,  // redraw the whole grid, up to max_retries times
  GrowGrid,    // keep the points, append 50% more, refactor
};

struct GridFactorization {
  KGrid grid;
  OrthoFactorization factorization;
  int retries = 0;
};

/// generate_grid + assemble_and_factor with the retry policy applied on
/// FullRankFailure.  Rethrows after max_retries failed attempts.
GridFactorization build_factorization(const Domain& domain, int K,
                                      const TensorLegendreBasis& basis,
                                      RngStream& rng,
                                      RankPolicy policy = RankPolicy::Regenerate,
                                      int max_retries = 3);

}  // namespace cwls
