#include "cwls/diagnostics.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "cwls/errors.hpp"
#include "cwls/wls.hpp"

namespace cwls {

EvalGrid make_eval_grid(const Domain& domain, int T, RngStream& rng) {
  if (T < 1) throw ConfigError("evaluation grid size T must be >= 1");
  EvalGrid grid;
  grid.points = sample_uniform(domain, T, rng);
  return grid;
}

double constant_C(const Eigen::MatrixXd& A) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  const double smin = svd.singularValues()(A.cols() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / smin;
}

double relative_l2_error(const Eigen::VectorXd& fvals,
                         const Eigen::VectorXd& approx_vals) {
  if (fvals.size() != approx_vals.size())
    throw ConfigError("value vectors have different lengths");
  const double denom = fvals.norm();
  if (denom == 0.0)
    throw DataError("relative error undefined: f has zero norm on the grid");
  return (fvals - approx_vals).norm() / denom;
}

double error_on_grid(const Eigen::VectorXd& fvals_on_grid,
                     const Eigen::VectorXd& fit_vals_on_grid) {
  return relative_l2_error(fvals_on_grid, fit_vals_on_grid);
}

double error_off_grid(const Domain& domain,
                      const std::function<double(const Eigen::VectorXd&)>& f,
                      const OrthoFactorization& fact,
                      const TensorLegendreBasis& basis, const Eigen::VectorXd& c,
                      int T, RngStream& rng) {
  const EvalGrid grid = make_eval_grid(domain, T, rng);
  Eigen::VectorXd fvals(T);
  for (int i = 0; i < T; ++i) fvals(i) = f(grid.points.row(i).transpose());
  const Eigen::VectorXd approx = evaluate_many(fact, basis, c, grid.points);
  return relative_l2_error(fvals, approx);
}

double weighted_supnorm_gap(const Eigen::VectorXd& fvals,
                            const Eigen::VectorXd& pvals,
                            const Eigen::VectorXd& pi, int K) {
  if (fvals.size() != pvals.size() || fvals.size() != pi.size())
    throw ConfigError("value and probability vectors have different lengths");
  double sup = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    const double g = std::abs(fvals(i) - pvals(i));
    if (pi(i) <= 0.0) {
      if (g > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    sup = std::max(sup, g / std::sqrt(K * pi(i)));
  }
  return sup;
}

double estimate_D(const OrthoFactorization& fact, const TensorLegendreBasis& basis,
                  const EvalGrid& eval_grid) {
  const int T = eval_grid.size();
  const int N = fact.size();
  if (T < N) throw ConfigError("estimate_D needs T >= N evaluation points");
  // lambda_max of (1/T) Phi^T Phi, accumulated in point chunks.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(N, N);
  constexpr int chunk = 8192;
  for (int start = 0; start < T; start += chunk) {
    const int stop = std::min(T, start + chunk);
    const Eigen::MatrixXd phi =
        fact.eval_phi_rows(basis, eval_grid.points.middleRows(start, stop - start));
    gram.noalias() += phi.transpose() * phi;
  }
  gram /= T;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  return std::sqrt(eig.eigenvalues().maxCoeff());
}

namespace {

void check_rates(double gamma, double delta) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ConfigError("gamma must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("delta must lie in (0, 1)");
}

long long ceil_to_int(double x) {
  return static_cast<long long>(std::ceil(x - 1e-12));
}

double upper_rate(double delta) {
  return (1.0 + delta) * std::log1p(delta) - delta;
}

double lower_rate(double delta) {
  return (1.0 - delta) * std::log1p(-delta) + delta;
}

}  // namespace

long long bound_M_method1(int N, double gamma, double delta) {
  check_rates(gamma, delta);
  if (N < 1) throw ConfigError("N must be >= 1");
  return ceil_to_int(N * std::log(4.0 * N / gamma) / upper_rate(delta));
}

long long bound_M_maw1(int N, double gamma, double delta) {
  check_rates(gamma, delta);
  if (N < 1) throw ConfigError("N must be >= 1");
  return ceil_to_int(N * std::log(N / gamma) / lower_rate(delta));
}

long long bound_M_maw2(int N, double gamma, double delta) {
  check_rates(gamma, delta);
  if (N < 1) throw ConfigError("N must be >= 1");
  return ceil_to_int(N * std::log(2.0 * N / gamma) / upper_rate(delta));
}

long long bound_K(int N, double gamma, double delta, double nikolskii_sq) {
  check_rates(gamma, delta);
  if (N < 1) throw ConfigError("N must be >= 1");
  if (!(nikolskii_sq >= 1.0))
    throw ConfigError("squared Nikolskii constant must be >= 1");
  return ceil_to_int(nikolskii_sq * std::log(2.0 * N / gamma) / lower_rate(delta));
}

long long bound_k_method2(int N_t, double gamma_t, double delta) {
  check_rates(gamma_t, delta);
  if (N_t < 1) throw ConfigError("N must be >= 1");
  return ceil_to_int(std::log(4.0 * N_t / gamma_t) / upper_rate(delta));
}

double nikolskii_lambda_rect(int N, double lambda) {
  if (N < 1) throw ConfigError("N must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw ConfigError("lambda must lie in (0, 1]");
  return static_cast<double>(N) * N / lambda;
}

DiagnosticsReport make_report(int N, double delta, double gamma,
                              std::optional<double> lambda_rect) {
  DiagnosticsReport report;
  report.delta = delta;
  report.gamma = gamma;
  report.theory["M_method1"] = bound_M_method1(N, gamma, delta);
  report.theory["M_maw1"] = bound_M_maw1(N, gamma, delta);
  report.theory["M_maw2"] = bound_M_maw2(N, gamma, delta);
  report.theory["k_method2"] = bound_k_method2(N, gamma, delta);
  if (lambda_rect) {
    report.theory["K_lambda_rect"] =
        bound_K(N, gamma, delta, nikolskii_lambda_rect(N, *lambda_rect));
  }
  report.notes.push_back(
      "k_method2 evaluates the stage bound with N_t; the source statement "
      "leaves N unsubscripted");
  return report;
}

std::string report_to_json(const DiagnosticsReport& report) {
  nlohmann::json j;
  j["C"] = report.C;
  j["kappa"] = report.kappa;
  if (report.E_tau) j["E_tau"] = *report.E_tau;
  if (report.E_tau_tilde) j["E_tau_tilde"] = *report.E_tau_tilde;
  if (report.D_hat) j["D_hat"] = *report.D_hat;
  j["delta"] = report.delta;
  j["gamma"] = report.gamma;
  j["theory"] = report.theory;
  j["notes"] = report.notes;
  return j.dump(2);
}

}  // namespace cwls
