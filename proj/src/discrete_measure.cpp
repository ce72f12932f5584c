#include "cwls/discrete_measure.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cwls/errors.hpp"

namespace cwls {

namespace {

constexpr int kAssemblyChunk = 8192;

double rank_gate(int K, int N) {
  return 16.0 * std::max(K, N) * std::numeric_limits<double>::epsilon();
}

// Singular values of B via the small factor R (B = QR with Q orthonormal, so
// B and R share singular values up to the orthogonality error of Q).
std::pair<double, double> sigma_range(const Eigen::MatrixXd& r) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  const auto& s = svd.singularValues();
  return {s(s.size() - 1), s(0)};
}

}  // namespace

KGrid generate_grid(const Domain& domain, int K, RngStream& rng,
                    int max_attempts_per_point) {
  if (K < 1) throw ConfigError("grid size K must be >= 1");
  KGrid grid;
  grid.points = sample_uniform(domain, K, rng, max_attempts_per_point);
  grid.seed = rng.seed();
  grid.stream = rng.stream();
  return grid;
}

namespace {

// Append columns [n_old, n_new) of the scaled design matrix to (Q, R) by
// classical Gram-Schmidt with a second orthogonalization pass per column.
void append_columns(Eigen::MatrixXd& q, Eigen::MatrixXd& r, const KGrid& grid,
                    const TensorLegendreBasis& basis, int n_old, int n_new) {
  const int K = grid.size();
  const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(K));

  Eigen::MatrixXd q_grown(K, n_new);
  Eigen::MatrixXd r_grown = Eigen::MatrixXd::Zero(n_new, n_new);
  if (n_old > 0) {
    q_grown.leftCols(n_old) = q.leftCols(n_old);
    r_grown.topLeftCorner(n_old, n_old) = r.topLeftCorner(n_old, n_old);
  }
  q.swap(q_grown);
  r.swap(r_grown);

  for (int chunk = n_old; chunk < n_new; chunk += kAssemblyChunk) {
    const int chunk_end = std::min(n_new, chunk + kAssemblyChunk);
    Eigen::MatrixXd cols =
        basis.eval_block(grid.points, chunk, chunk_end) * inv_sqrt_k;
    for (int j = chunk; j < chunk_end; ++j) {
      Eigen::VectorXd v = cols.col(j - chunk);
      const double column_norm = v.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (j == 0) break;
        const Eigen::VectorXd h = q.leftCols(j).transpose() * v;
        v.noalias() -= q.leftCols(j) * h;
        r.col(j).head(j) += h;
      }
      const double norm = v.norm();
      if (norm <= column_norm * rank_gate(K, n_new)) {
        const auto [smin, smax] = sigma_range(r.topLeftCorner(j, j));
        std::ostringstream msg;
        msg << "design matrix column " << j + 1 << " of " << n_new
            << " is numerically dependent on its predecessors (residual norm "
            << norm << " vs column norm " << column_norm << ")";
        throw FullRankFailure(msg.str(), smin, smax);
      }
      r(j, j) = norm;
      q.col(j) = v / norm;
    }
  }
}

}  // namespace

OrthoFactorization assemble_and_factor(const KGrid& grid,
                                       const TensorLegendreBasis& basis) {
  OrthoFactorization f;
  return extend_factorization(std::move(f), grid, basis);
}

OrthoFactorization extend_factorization(OrthoFactorization f, const KGrid& grid,
                                        const TensorLegendreBasis& basis) {
  const int n_old = f.size();
  const int n_new = basis.size();
  const int K = grid.size();
  if (grid.dimension() != basis.dimension())
    throw ConfigError("grid and basis dimensions differ");
  if (n_new < n_old)
    throw ConfigError("extend_factorization cannot shrink the basis");
  if (n_old > 0 && f.grid_size() != K)
    throw ConfigError("factorization was built for a different grid size");
  if (K < n_new) {
    std::ostringstream msg;
    msg << "grid size K=" << K << " is below the basis size N=" << n_new;
    throw FullRankFailure(msg.str(), 0.0, 0.0);
  }
  if (n_new == n_old) return f;

  append_columns(f.q_, f.r_, grid, basis, n_old, n_new);

  const auto [smin, smax] = sigma_range(f.r_);
  f.sigma_min_ = smin;
  f.sigma_max_ = smax;
  if (smin <= smax * rank_gate(K, n_new)) {
    std::ostringstream msg;
    msg << "design matrix is numerically rank deficient: sigma_min/sigma_max = "
        << smin / smax << " with K=" << K << ", N=" << n_new;
    throw FullRankFailure(msg.str(), smin, smax);
  }
  return f;
}

Eigen::VectorXd OrthoFactorization::eval_phi(const TensorLegendreBasis& basis,
                                             const Eigen::VectorXd& y) const {
  if (basis.size() != size())
    throw ConfigError("basis size does not match factorization size");
  Eigen::VectorXd psi = basis.eval_row(y);
  return r_.transpose().triangularView<Eigen::Lower>().solve(psi);
}

Eigen::MatrixXd OrthoFactorization::eval_phi_rows(
    const TensorLegendreBasis& basis,
    const Eigen::Ref<const Eigen::MatrixXd>& points) const {
  if (basis.size() != size())
    throw ConfigError("basis size does not match factorization size");
  const Eigen::Index npts = points.rows();
  Eigen::MatrixXd phi(npts, size());
  for (Eigen::Index start = 0; start < npts; start += kAssemblyChunk) {
    const Eigen::Index stop = std::min<Eigen::Index>(npts, start + kAssemblyChunk);
    Eigen::MatrixXd psi =
        basis.eval_rows(points.middleRows(start, stop - start));
    // Phi = Psi R^{-1}, i.e. solve X R = Psi.
    r_.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(psi);
    phi.middleRows(start, stop - start) = psi;
  }
  return phi;
}

GridFactorization build_factorization(const Domain& domain, int K,
                                      const TensorLegendreBasis& basis,
                                      RngStream& rng, RankPolicy policy,
                                      int max_retries) {
  GridFactorization result;
  int k_current = K;
  result.grid = generate_grid(domain, k_current, rng);
  for (int attempt = 0;; ++attempt) {
    try {
      result.factorization = assemble_and_factor(result.grid, basis);
      return result;
    } catch (const FullRankFailure&) {
      if (attempt == max_retries) throw;
      ++result.retries;
      if (policy == RankPolicy::Regenerate) {
        result.grid = generate_grid(domain, k_current, rng);
      } else {
        const int extra = std::max(1, k_current / 2);
        Eigen::MatrixXd more = sample_uniform(domain, extra, rng);
        Eigen::MatrixXd grown(k_current + extra, domain.d);
        grown.topRows(k_current) = result.grid.points;
        grown.bottomRows(extra) = more;
        k_current += extra;
        result.grid.points = std::move(grown);
      }
    }
  }
}

}  // namespace cwls
