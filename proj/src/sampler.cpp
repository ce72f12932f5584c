#include "cwls/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "cwls/errors.hpp"

namespace cwls {

std::pair<Eigen::VectorXd, WeightFunction> method1_distribution(
    const OrthoFactorization& f) {
  const int K = f.grid_size();
  const int N = f.size();
  Eigen::VectorXd pi = f.Q().array().square().rowwise().sum() / N;
  WeightFunction weight;
  weight.inv_w = K * pi;
  weight.w = Eigen::VectorXd(K);
  for (int i = 0; i < K; ++i)
    weight.w(i) = weight.inv_w(i) > 0.0
                      ? 1.0 / weight.inv_w(i)
                      : std::numeric_limits<double>::infinity();
  return {std::move(pi), std::move(weight)};
}

namespace {

std::vector<int> draw_categorical(const Eigen::VectorXd& pmf, int count,
                                  RngStream& rng) {
  const int K = static_cast<int>(pmf.size());
  std::vector<double> cdf(K);
  double total = 0.0;
  for (int i = 0; i < K; ++i) {
    if (pmf(i) < 0.0) throw ConfigError("probability vector has a negative entry");
    total += pmf(i);
    cdf[i] = total;
  }
  if (total <= 0.0) throw ConfigError("probability vector sums to zero");
  std::vector<int> indices(count);
  for (int j = 0; j < count; ++j) {
    const double u = rng.uniform01() * total;
    // First index with cdf > u; zero-mass bins can never be selected.
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    indices[j] = static_cast<int>(std::min<std::ptrdiff_t>(
        it - cdf.begin(), K - 1));
  }
  return indices;
}

}  // namespace

std::vector<int> draw_method1(const Eigen::VectorXd& pi, int M, RngStream& rng) {
  if (M < 1) throw ConfigError("sample count M must be >= 1");
  return draw_categorical(pi, M, rng);
}

Method1Plan make_method1_plan(const OrthoFactorization& f, int M, RngStream& rng) {
  Method1Plan plan;
  auto [pi, weight] = method1_distribution(f);
  plan.pi = std::move(pi);
  plan.M = M;
  plan.indices = draw_method1(plan.pi, M, rng);
  return plan;
}

std::vector<int> Method2Plan::indices() const {
  std::vector<int> result(ledger_.size());
  for (std::size_t j = 0; j < ledger_.size(); ++j) result[j] = ledger_[j].grid_index;
  return result;
}

int Method2Plan::draws_for_column(int column) const {
  int count = 0;
  for (const auto& rec : ledger_)
    if (rec.column == column) ++count;
  return count;
}

Method2Plan method2_advance(Method2Plan plan, const OrthoFactorization& f,
                            int k_t, RngStream& rng) {
  const int n_prev = plan.current_N();
  const int k_prev = plan.current_k();
  const int n_t = f.size();
  if (k_t < k_prev) throw ConfigError("sampling ratios must be nondecreasing");
  if (k_t < 1) throw ConfigError("sampling ratio k_t must be >= 1");
  if (n_t <= n_prev)
    throw ConfigError("method 2 stages need strictly increasing N");

  const int stage = static_cast<int>(plan.stages_.size()) + 1;
  int fresh = 0;
  auto draw_column = [&](int column, int count) {
    if (count == 0) return;
    const Eigen::VectorXd pmf = f.Q().col(column - 1).array().square();
    for (int idx : draw_categorical(pmf, count, rng)) {
      plan.ledger_.push_back({stage, column, idx});
      ++fresh;
    }
  };
  for (int l = 1; l <= n_prev; ++l) draw_column(l, k_t - k_prev);
  for (int l = n_prev + 1; l <= n_t; ++l) draw_column(l, k_t);

  Method2Stage st;
  st.N = n_t;
  st.k = k_t;
  st.M = k_t * n_t;
  st.fresh_draws = fresh;
  plan.stages_.push_back(st);
  return plan;
}

double mixture_check(const Method2Plan& plan, const OrthoFactorization& f) {
  if (plan.empty()) throw ConfigError("mixture_check needs a started plan");
  const int n_t = plan.current_N();
  if (f.size() != n_t)
    throw ConfigError("factorization size does not match the plan's stage");
  Eigen::VectorXd mixture = Eigen::VectorXd::Zero(f.grid_size());
  for (int l = 0; l < n_t; ++l)
    mixture += f.Q().col(l).array().square().matrix();
  mixture /= n_t;
  const auto [pi, weight] = method1_distribution(f);
  return (mixture - pi).cwiseAbs().maxCoeff();
}

void write_ledger_csv(const Method2Plan& plan, std::ostream& os) {
  os << "stage,l,grid_index\n";
  for (const auto& rec : plan.ledger())
    os << rec.stage << ',' << rec.column << ',' << rec.grid_index << '\n';
}

int m_target_nlogn(int N) {
  if (N < 1) throw ConfigError("N must be >= 1");
  const double nlogn = N * std::log(static_cast<double>(N));
  return std::max<long long>(N, static_cast<long long>(std::ceil(nlogn)));
}

int default_sampling_ratio(int N, int k_prev) {
  const int m = m_target_nlogn(N);
  const int k = static_cast<int>((m + N - 1) / N);  // ceil(m/N)
  return std::max(k, std::max(k_prev, 1));
}

}  // namespace cwls
