#include "cwls/wls.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cwls/errors.hpp"

namespace cwls {

std::string to_string(MethodKind method) {
  switch (method) {
    case MethodKind::Uniform: return "uniform";
    case MethodKind::Method1: return "method1";
    case MethodKind::Method2: return "method2";
  }
  return "?";
}

MethodKind method_kind_from_string(const std::string& s) {
  if (s == "uniform") return MethodKind::Uniform;
  if (s == "method1") return MethodKind::Method1;
  if (s == "method2") return MethodKind::Method2;
  throw ConfigError("unknown method '" + s + "'");
}

namespace {

void check_fvals(const Eigen::VectorXd& fvals, const std::vector<int>& indices) {
  if (fvals.size() != static_cast<Eigen::Index>(indices.size()))
    throw ConfigError("fvals length does not match the number of draws");
  for (Eigen::Index j = 0; j < fvals.size(); ++j) {
    if (!std::isfinite(fvals(j))) {
      std::ostringstream msg;
      msg << "non-finite function value " << fvals(j) << " at grid index "
          << indices[j];
      throw DataError(msg.str());
    }
  }
}

// Shared assembly: rows q_{i_j,.}/sqrt(M s_{i_j}) and f(z_{i_j})/sqrt(M K s_{i_j}),
// where s is the effective per-index sampling probability (pi for Method 1,
// the stage mixture for Method 2, 1/K for the uniform baseline).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_rows(
    const OrthoFactorization& f, const std::vector<int>& indices,
    const Eigen::VectorXd& s, const Eigen::VectorXd& fvals) {
  check_fvals(fvals, indices);
  const int M = static_cast<int>(indices.size());
  const int N = f.size();
  const int K = f.grid_size();
  Eigen::MatrixXd A(M, N);
  Eigen::VectorXd b(M);
  for (int j = 0; j < M; ++j) {
    const int i = indices[j];
    if (i < 0 || i >= K) throw ConfigError("drawn index outside the grid");
    const double mass = s(i);
    if (!(mass > 0.0))
      throw std::logic_error("drawn index has zero sampling mass");
    const double scale = 1.0 / std::sqrt(M * mass);
    A.row(j) = f.Q().row(i) * scale;
    b(j) = fvals(j) * scale / std::sqrt(static_cast<double>(K));
  }
  return {std::move(A), std::move(b)};
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_method1(
    const OrthoFactorization& f, const Method1Plan& plan,
    const Eigen::VectorXd& fvals) {
  return assemble_rows(f, plan.indices, plan.pi, fvals);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_method2(
    const OrthoFactorization& f, const Method2Plan& plan,
    const Eigen::VectorXd& fvals) {
  if (plan.current_N() != f.size())
    throw ConfigError("factorization size does not match the plan's stage");
  // (1/N_t) sum_l pi^(l)_i is the Method 1 mixture of the same factorization.
  const Eigen::VectorXd mixture =
      f.Q().array().square().rowwise().sum() / f.size();
  return assemble_rows(f, plan.indices(), mixture, fvals);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_uniform(
    const OrthoFactorization& f, const std::vector<int>& indices,
    const Eigen::VectorXd& fvals) {
  const Eigen::VectorXd s =
      Eigen::VectorXd::Constant(f.grid_size(), 1.0 / f.grid_size());
  return assemble_rows(f, indices, s, fvals);
}

SolveResult solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index M = A.rows();
  const Eigen::Index N = A.cols();
  if (M < N) {
    std::ostringstream msg;
    msg << "underdetermined system: M=" << M << " < N=" << N;
    throw SolveFailure(msg.str(), 0.0, 0.0);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double smax = sigma(0);
  const double smin = sigma(N - 1);
  const double gate =
      16.0 * std::max(M, N) * std::numeric_limits<double>::epsilon();
  if (!(smin > smax * gate)) {
    std::ostringstream msg;
    msg << "least-squares matrix is numerically rank deficient: sigma spectrum ["
        << smin << ", " << smax << "], ratio " << smin / smax;
    throw SolveFailure(msg.str(), smin, smax);
  }
  SolveResult result;
  result.c = svd.matrixV() *
             (svd.matrixU().transpose() * b).cwiseQuotient(sigma).eval();
  result.sigma_min = smin;
  result.sigma_max = smax;
  result.residual = (A * result.c - b).norm();
  return result;
}

namespace {

WlsFit finish_fit(MethodKind method, std::vector<int> indices,
                  std::pair<Eigen::MatrixXd, Eigen::VectorXd> system) {
  WlsFit fit;
  fit.method = method;
  fit.indices = std::move(indices);
  fit.A = std::move(system.first);
  fit.b = std::move(system.second);
  SolveResult sol = solve(fit.A, fit.b);
  fit.c = std::move(sol.c);
  fit.sigma_min = sol.sigma_min;
  fit.sigma_max = sol.sigma_max;
  fit.residual = sol.residual;
  return fit;
}

}  // namespace

WlsFit fit_method1(const OrthoFactorization& f, const Method1Plan& plan,
                   const Eigen::VectorXd& fvals) {
  return finish_fit(MethodKind::Method1, plan.indices,
                    assemble_method1(f, plan, fvals));
}

WlsFit fit_method2(const OrthoFactorization& f, const Method2Plan& plan,
                   const Eigen::VectorXd& fvals) {
  return finish_fit(MethodKind::Method2, plan.indices(),
                    assemble_method2(f, plan, fvals));
}

WlsFit fit_uniform(const OrthoFactorization& f, const std::vector<int>& indices,
                   const Eigen::VectorXd& fvals) {
  return finish_fit(MethodKind::Uniform, indices,
                    assemble_uniform(f, indices, fvals));
}

std::string fit_summary_json(const WlsFit& fit, std::uint64_t seed) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"method\":\"%s\",\"N\":%ld,\"M\":%ld,\"kappa\":%.17g,"
                "\"residual\":%.17g,\"seed\":%llu}",
                to_string(fit.method).c_str(), static_cast<long>(fit.A.cols()),
                static_cast<long>(fit.A.rows()), fit.kappa(), fit.residual,
                static_cast<unsigned long long>(seed));
  return buf;
}

Eigen::VectorXd evaluate_on_grid(const OrthoFactorization& f,
                                 const Eigen::VectorXd& c) {
  if (c.size() != f.size())
    throw ConfigError("coefficient length does not match factorization size");
  return std::sqrt(static_cast<double>(f.grid_size())) * (f.Q() * c);
}

double evaluate_at(const OrthoFactorization& f, const TensorLegendreBasis& basis,
                   const Eigen::VectorXd& c, const Eigen::VectorXd& y) {
  return f.eval_phi(basis, y).dot(c);
}

Eigen::VectorXd evaluate_many(const OrthoFactorization& f,
                              const TensorLegendreBasis& basis,
                              const Eigen::VectorXd& c,
                              const Eigen::Ref<const Eigen::MatrixXd>& points) {
  if (c.size() != f.size())
    throw ConfigError("coefficient length does not match factorization size");
  // c . phi(y) = (R^{-1} c) . psi(y); one triangular solve for all points.
  const Eigen::VectorXd g = f.R().triangularView<Eigen::Upper>().solve(c);
  const Eigen::Index npts = points.rows();
  constexpr Eigen::Index chunk = 8192;
  Eigen::VectorXd out(npts);
  for (Eigen::Index start = 0; start < npts; start += chunk) {
    const Eigen::Index stop = std::min(npts, start + chunk);
    out.segment(start, stop - start) =
        basis.eval_rows(points.middleRows(start, stop - start)) * g;
  }
  return out;
}

}  // namespace cwls
