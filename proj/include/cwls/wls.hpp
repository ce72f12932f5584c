#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cwls/discrete_measure.hpp"
#include "cwls/sampler.hpp"

namespace cwls {

enum class MethodKind { Uniform, Method1, Method2 };

std::string to_string(MethodKind method);
MethodKind method_kind_from_string(const std::string& s);

/// Assembled system and least-squares solution for one fit.  c lives in the
/// phi basis; sigma_min/sigma_max are singular values of A, so
/// kappa() = sigma_max/sigma_min and stability_C() = 1/sigma_min (the grid
/// stability constant, since A^T A has minimal eigenvalue sigma_min^2).
struct WlsFit {
  MethodKind method = MethodKind::Method1;
  std::vector<int> indices;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double residual = 0.0;

  double kappa() const { return sigma_max / sigma_min; }
  double stability_C() const { return 1.0 / sigma_min; }
};

/// Method 1 system: A_{jk} = q_{i_j,k}/sqrt(M pi_{i_j}),
/// b_j = f(z_{i_j})/sqrt(M K pi_{i_j}).  fvals holds f at the drawn indices,
/// in draw order.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_method1(
    const OrthoFactorization& f, const Method1Plan& plan,
    const Eigen::VectorXd& fvals);

/// Method 2 system at the plan's current stage; the per-row denominators use
/// the stage mixture (M_t/N_t) sum_l pi^(l)_{i_j}.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_method2(
    const OrthoFactorization& f, const Method2Plan& plan,
    const Eigen::VectorXd& fvals);

/// Uniform-over-grid baseline (w = 1): A rows are sqrt(K/M) q_{i_j,.} and
/// b_j = f(z_{i_j})/sqrt(M).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_uniform(
    const OrthoFactorization& f, const std::vector<int>& indices,
    const Eigen::VectorXd& fvals);

struct SolveResult {
  Eigen::VectorXd c;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double residual = 0.0;
};

/// Assemble-and-solve conveniences returning the full fit record.
WlsFit fit_method1(const OrthoFactorization& f, const Method1Plan& plan,
                   const Eigen::VectorXd& fvals);
WlsFit fit_method2(const OrthoFactorization& f, const Method2Plan& plan,
                   const Eigen::VectorXd& fvals);
WlsFit fit_uniform(const OrthoFactorization& f, const std::vector<int>& indices,
                   const Eigen::VectorXd& fvals);

/// Compact JSON record of a fit: method, N, M, kappa, residual, seed.
std::string fit_summary_json(const WlsFit& fit, std::uint64_t seed);

/// Least-squares minimizer via SVD of A (never the normal equations).
/// Throws SolveFailure when M < N or A is numerically rank deficient.
SolveResult solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// f-tilde on the whole grid: sqrt(K) Q c.
Eigen::VectorXd evaluate_on_grid(const OrthoFactorization& f,
                                 const Eigen::VectorXd& c);

/// f-tilde(y) = sum_i c_i phi_i(y).
double evaluate_at(const OrthoFactorization& f, const TensorLegendreBasis& basis,
                   const Eigen::VectorXd& c, const Eigen::VectorXd& y);

/// f-tilde at many points (one per row).
Eigen::VectorXd evaluate_many(const OrthoFactorization& f,
                              const TensorLegendreBasis& basis,
                              const Eigen::VectorXd& c,
                              const Eigen::Ref<const Eigen::MatrixXd>& points);

}  // namespace cwls
