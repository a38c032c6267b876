#include "hubkit/variants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace hubkit {
namespace {

// Altschuler-Weed-Rigollet rounding: scale rows and then columns down to
// their targets, then spread the remaining deficit as a rank-one update.
void round_to_marginals(Matrix& pi, const Marginals& marg) {
  const Vector rows = pi.rowwise().sum();
  for (Index i = 0; i < pi.rows(); ++i) {
    if (rows[i] > marg.a[i]) pi.row(i) *= marg.a[i] / rows[i];
  }
  const Vector cols = pi.colwise().sum().transpose();
  for (Index j = 0; j < pi.cols(); ++j) {
    if (cols[j] > marg.b[j]) pi.col(j) *= marg.b[j] / cols[j];
  }
  const Vector err_rows = marg.a - pi.rowwise().sum();
  const Vector err_cols = marg.b - pi.colwise().sum().transpose();
  const double deficit = err_rows.lpNorm<1>();
  if (deficit > 0.0) pi.noalias() += err_rows * err_cols.transpose() / deficit;
}

void project_rows(Matrix& x, const Vector& mass) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < x.rows(); ++i) x.row(i) = project_simplex(x.row(i).transpose(), mass[i]);
}

void project_cols(Matrix& x, const Vector& mass) {
  // Column access on row-major storage: project the transpose row-wise.
  Matrix t = x.transpose();
  project_rows(t, mass);
  x = t.transpose();
}

}  // namespace

void AnnealSchedule::validate() const {
  if (!(tau_start > 0.0) || !(tau_min > 0.0)) {
    throw Error(ErrorCode::NonPositiveTau, "annealing temperatures must be positive");
  }
  if (!(tau_min < tau_start)) throw Error(ErrorCode::InvalidConfig, "tau_min must be < tau_start");
  if (!(decay > 0.0 && decay < 1.0)) throw Error(ErrorCode::InvalidConfig, "decay must be in (0,1)");
  if (inner_iters < 1) throw Error(ErrorCode::InvalidConfig, "inner_iters must be >= 1");
}

Vector project_simplex(const Vector& v, double mass) {
  const Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (Index k = 0; k < n; ++k) {
    prefix += sorted[k];
    const double candidate = (prefix - mass) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0);
}

TransportPlan otn(const SimilarityMatrix& s, const Marginals& marg, const AnnealSchedule& sched) {
  sched.validate();
  marg.validate();
  SinkhornConfig cfg;
  cfg.max_iters = sched.inner_iters;
  cfg.tol = 1e-13;
  Vector g = Vector::Zero(s.cols());
  TransportPlan plan;
  double tau = sched.tau_start;
  int total_iters = 0;
  for (;;) {
    cfg.tau = tau;
    plan = sinkhorn_warm(s, marg, cfg, g);
    total_iters += plan.iterations_run;
    g = plan.g;
    if (tau <= sched.tau_min) break;
    tau = std::max(tau * sched.decay, sched.tau_min);
  }
  round_to_marginals(plan.pi, marg);
  plan.iterations_run = total_iters;
  plan.marginal_violation = marginal_violation(plan.pi, marg);
  return plan;
}

L2nResult l2n(const SimilarityMatrix& s, const Marginals& marg, double coeff, int max_sweeps,
              double tol) {
  if (!(coeff > 0.0)) throw Error(ErrorCode::InvalidConfig, "coeff must be > 0");
  if (max_sweeps < 1) throw Error(ErrorCode::InvalidConfig, "max_sweeps must be >= 1");
  if (marg.a.size() != s.rows() || marg.b.size() != s.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "marginals do not match the similarity matrix");
  }
  marg.validate();

  Matrix x = coeff * s.values();
  Matrix p = Matrix::Zero(x.rows(), x.cols());
  Matrix q = Matrix::Zero(x.rows(), x.cols());
  L2nResult result;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    Matrix y = x + p;
    project_rows(y, marg.a);
    p += x - y;
    Matrix next = y + q;
    project_cols(next, marg.b);
    q += y - next;
    // x can stall for a sweep while the corrections still move, so also ask
    // for the row- and column-feasible iterates to agree.
    const double step = (next - x).norm();
    const double split = (next - y).norm();
    x = std::move(next);
    result.sweeps = sweep;
    if (step < tol && split < tol) {
      result.converged = true;
      break;
    }
  }
  result.plan.pi = std::move(x);
  result.plan.iterations_run = result.sweeps;
  result.plan.marginal_violation = marginal_violation(result.plan.pi, marg);
  return result;
}

TransportPlan hn(const SimilarityMatrix& s) {
  const Assignment assignment = solve_assignment(s.values(), /*maximize=*/true);
  TransportPlan plan;
  plan.pi = Matrix::Zero(s.rows(), s.cols());
  for (Index i = 0; i < s.rows(); ++i) {
    if (assignment.row_to_col[i] >= 0) plan.pi(i, assignment.row_to_col[i]) = 1.0;
  }
  plan.iterations_run = 1;
  return plan;
}

SimilarityMatrix hn_scores(const SimilarityMatrix& s, const TransportPlan& plan, HnRanking mode) {
  if (plan.pi.rows() != s.rows() || plan.pi.cols() != s.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "plan does not match the similarity matrix");
  }
  if (mode == HnRanking::literal) return SimilarityMatrix(plan.pi, s.row_role(), s.col_role());
  const double lift = s.values().maxCoeff() - s.values().minCoeff() + 1.0;
  Matrix out = s.values() + lift * plan.pi;
  return SimilarityMatrix(std::move(out), s.row_role(), s.col_role());
}

double sparsity(const Matrix& pi, double eps_rel) {
  if (pi.size() == 0) throw Error(ErrorCode::EmptyPlan, "sparsity of an empty plan");
  const double peak = pi.maxCoeff();
  if (!(peak > 0.0)) return 1.0;
  const double cutoff = eps_rel * peak;
  const auto zeros = (pi.array() < cutoff).count();
  return static_cast<double>(zeros) / static_cast<double>(pi.size());
}

}  // namespace hubkit
