#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "cwls/discrete_measure.hpp"
#include "cwls/rng.hpp"

namespace cwls {

/// The near-optimal weight w(z_i) on the grid: 1/w(z_i) = (K/N) sum_j q_ij^2,
/// the normalized reciprocal Christoffel function of the space.  w is +inf
/// where the whole Q row vanishes (no basis function touches the point);
/// such points carry zero sampling mass and are never drawn.
struct WeightFunction {
  Eigen::VectorXd w;
  Eigen::VectorXd inv_w;  // 1/w = K * pi, finite everywhere
};

struct Method1Plan {
  Eigen::VectorXd pi;  // length K, pi_i = (1/N) sum_j q_ij^2
  int M = 0;
  std::vector<int> indices;  // i_1..i_M, with multiplicity
};

/// Method 1 step: the mixture distribution over grid indices and the
/// matching weight function.
std::pair<Eigen::VectorXd, WeightFunction> method1_distribution(
    const OrthoFactorization& f);

/// M i.i.d. draws from pi (with replacement), by inverse-CDF binary search.
std::vector<int> draw_method1(const Eigen::VectorXd& pi, int M, RngStream& rng);

Method1Plan make_method1_plan(const OrthoFactorization& f, int M, RngStream& rng);

/// One stage of the adaptive plan: after stage t, every column l <= N_t has
/// received exactly k_t draws, so M_t = k_t N_t draws exist in total.
struct Method2Stage {
  int N = 0;
  int k = 0;
  int M = 0;
  int fresh_draws = 0;
};

/// One draw in the audit ledger.  stage and column are 1-based; grid_index
/// is a 0-based row of the grid.
struct DrawRecord {
  int stage = 0;
  int column = 0;
  int grid_index = 0;
};

/// Adaptive sampling ledger.  All draws from earlier stages are retained
/// verbatim; advancing to (N_t, k_t) draws k_t - k_{t-1} fresh indices from
/// each old column distribution pi^(l) = |q_.l|^2 and k_t from each new one.
class Method2Plan {
public:
  bool empty() const { return stages_.empty(); }
  const std::vector<Method2Stage>& stages() const { return stages_; }
  const std::vector<DrawRecord>& ledger() const { return ledger_; }

  int current_N() const { return stages_.empty() ? 0 : stages_.back().N; }
  int current_k() const { return stages_.empty() ? 0 : stages_.back().k; }
  int current_M() const { return stages_.empty() ? 0 : stages_.back().M; }

  /// Accumulated i_1..i_{M_t} in draw order.
  std::vector<int> indices() const;

  /// Draws so far for the given 1-based column.
  int draws_for_column(int column) const;

private:
  friend Method2Plan method2_advance(Method2Plan plan, const OrthoFactorization& f,
                                     int k_t, RngStream& rng);

  std::vector<Method2Stage> stages_;
  std::vector<DrawRecord> ledger_;
};

/// Advance the plan to stage (N_t = f.size(), k_t).  Requires k_t >= k_{t-1}
/// and N_t > N_{t-1}; the factorization must extend the one used for earlier
/// stages (positive-diagonal convention keeps old columns unchanged).
Method2Plan method2_advance(Method2Plan plan, const OrthoFactorization& f,
                            int k_t, RngStream& rng);

/// Max over the grid of |(1/N_t) sum_{l<=N_t} pi^(l)_i - pi^Method1_i|; an
/// algebraic identity, so the result sits at machine precision.
double mixture_check(const Method2Plan& plan, const OrthoFactorization& f);

/// Audit CSV with header "stage,l,grid_index".
void write_ledger_csv(const Method2Plan& plan, std::ostream& os);

/// Default sampling ratio k_t = max(k_{t-1}, ceil(M_target(N)/N)) with
/// M_target(N) = max(N, smallest integer M with M >= N ln N).
int default_sampling_ratio(int N, int k_prev);

/// Smallest M with M >= N ln N, floored at N (the N=1 guard).
int m_target_nlogn(int N);

}  // namespace cwls
