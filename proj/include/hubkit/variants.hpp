#pragma once

#include <vector>

#include "hubkit/core.hpp"
#include "hubkit/sinkhorn.hpp"

namespace hubkit {

/// Temperature schedule for the annealed linear-OT solver.
struct AnnealSchedule {
  double tau_start = 0.1;
  double decay = 0.5;
  double tau_min = 1e-3;
  int inner_iters = 200;

  void validate() const;
};

/// One-to-one assignment over min(rows, cols) pairs.
struct Assignment {
  /// Column assigned to each row, or -1 for rows left out when rows > cols.
  std::vector<Index> row_to_col;
  /// Sum of the objective over assigned cells, accumulated in row order.
  double value = 0.0;
};

/// Exact rectangular assignment (Hungarian / shortest augmenting path with
/// potentials), O(r^2 c) for r = min(rows, cols).
Assignment solve_assignment(const Matrix& weights, bool maximize);

/// Euclidean projection of `v` onto { x >= 0, sum(x) = mass } (sort based).
Vector project_simplex(const Vector& v, double mass);

/// Linear OT max <S,pi> over Pi(a,b): annealed log-domain Sinkhorn followed by
/// rounding onto Pi(a,b) (row/column down-scaling plus a rank-one correction).
TransportPlan otn(const SimilarityMatrix& s, const Marginals& marg,
                  const AnnealSchedule& sched = {});

struct L2nResult {
  TransportPlan plan;
  bool converged = false;
  int sweeps = 0;
};

/// Euclidean projection of coeff * S onto Pi(a,b) by Dykstra's alternating
/// projections between the row-simplex and column-simplex products. On
/// non-convergence the last iterate is returned with `converged == false`.
L2nResult l2n(const SimilarityMatrix& s, const Marginals& marg, double coeff = 100.0,
              int max_sweeps = 20000, double tol = 1e-12);

/// Maximum-similarity one-to-one assignment as a 0/1 plan. When m > n the
/// unassigned query rows are all zero.
TransportPlan hn(const SimilarityMatrix& s);

enum class HnRanking {
  /// Assigned target first, remaining targets by raw similarity.
  assigned_first,
  /// Rank by the 0/1 plan itself.
  literal,
};

/// Scores whose row ranking realizes `mode` for a plan returned by `hn`.
SimilarityMatrix hn_scores(const SimilarityMatrix& s, const TransportPlan& plan, HnRanking mode);

/// Fraction of plan entries strictly below eps_rel * max entry.
double sparsity(const Matrix& pi, double eps_rel = 1e-9);
inline double sparsity(const TransportPlan& plan, double eps_rel = 1e-9) {
  return sparsity(plan.pi, eps_rel);
}

}  // namespace hubkit
