#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cwls/discrete_measure.hpp"
#include "cwls/domain.hpp"

namespace cwls {

/// Fresh points for measuring the approximation off the method's own grid;
/// must come from an RNG stream disjoint from the K-grid's.
struct EvalGrid {
  Eigen::MatrixXd points;  // T x d
  int size() const { return static_cast<int>(points.rows()); }
};

EvalGrid make_eval_grid(const Domain& domain, int T, RngStream& rng);

/// Stability constant of an assembled system: 1/sqrt(lambda_min(A^T A)),
/// computed from the singular values of A.
double constant_C(const Eigen::MatrixXd& A);

/// Relative L2 error between two value vectors over the same discrete
/// measure: ||f - g|| / ||f||.  Throws DataError when ||f|| = 0.
double relative_l2_error(const Eigen::VectorXd& fvals,
                         const Eigen::VectorXd& approx_vals);

/// E_tau: relative error over the K-grid.
double error_on_grid(const Eigen::VectorXd& fvals_on_grid,
                     const Eigen::VectorXd& fit_vals_on_grid);

/// E_tau-tilde: relative error over a fresh T-point uniform grid, with the
/// fit evaluated off-grid through the triangular factor.
double error_off_grid(const Domain& domain,
                      const std::function<double(const Eigen::VectorXd&)>& f,
                      const OrthoFactorization& fact,
                      const TensorLegendreBasis& basis, const Eigen::VectorXd& c,
                      int T, RngStream& rng);

/// Weighted sup-norm of g = f - p over the grid: max_i |g(z_i)|/sqrt(K pi_i).
/// Infinite (and flagged via the returned value) when g is nonzero at an
/// index with pi = 0.
double weighted_supnorm_gap(const Eigen::VectorXd& fvals,
                            const Eigen::VectorXd& pvals,
                            const Eigen::VectorXd& pi, int K);

/// Estimate of the norm-transfer constant D: top singular value of the
/// T x N matrix phi_j(t_i)/sqrt(T) over an independent evaluation grid.
double estimate_D(const OrthoFactorization& fact, const TensorLegendreBasis& basis,
                  const EvalGrid& eval_grid);

/// Sample-complexity thresholds, natural logarithms throughout.
/// M >= N log(4N/gamma) / ((1+delta)log(1+delta) - delta).
long long bound_M_method1(int N, double gamma, double delta);
/// M >= N log(N/gamma) / ((1-delta)log(1-delta) + delta).
long long bound_M_maw1(int N, double gamma, double delta);
/// M >= N log(2N/gamma) / ((1+delta)log(1+delta) - delta).
long long bound_M_maw2(int N, double gamma, double delta);
/// K >= nik_sq * log(2N/gamma) / ((1-delta)log(1-delta) + delta),
/// nik_sq being the squared Nikolskii constant of (P, rho).
long long bound_K(int N, double gamma, double delta, double nikolskii_sq);
/// k_t >= log(4N/gamma_t) / ((1+delta)log(1+delta) - delta).  N is the
/// stage dimension N_t (the source is ambiguous; reports annotate this).
long long bound_k_method2(int N_t, double gamma_t, double delta);
/// Squared Nikolskii bound N^2/lambda for domains with the lambda-rectangle
/// property and lower-set polynomial spaces.
double nikolskii_lambda_rect(int N, double lambda);

struct DiagnosticsReport {
  double C = 0.0;
  double kappa = 0.0;
  std::optional<double> E_tau;
  std::optional<double> E_tau_tilde;
  std::optional<double> D_hat;
  double delta = 0.5;
  double gamma = 0.01;
  std::map<std::string, long long> theory;
  std::vector<std::string> notes;
};

/// Bound set for a space of dimension N (optionally with a lambda-rectangle
/// constant for the K bound), annotated with the N_t reading of the adaptive
/// bound.
DiagnosticsReport make_report(int N, double delta, double gamma,
                              std::optional<double> lambda_rect);

std::string report_to_json(const DiagnosticsReport& report);

}  // namespace cwls
