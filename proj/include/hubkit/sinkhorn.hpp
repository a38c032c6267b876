#pragma once

#include <vector>

#include "hubkit/core.hpp"
#include "hubkit/scaling.hpp"

namespace hubkit {

/// Row (query) and column (target) probability vectors of a transport plan.
struct Marginals {
  Vector a;
  Vector b;

  static Marginals uniform(Index m, Index n);
  /// Entries strictly positive, each vector sums to 1 within 1e-12.
  void validate() const;
};

struct SinkhornConfig {
  double tau = 0.01;
  int max_iters = 10;
  /// Stop once the marginal violation drops to this value; 0 runs exactly
  /// `max_iters` sweeps.
  double tol = 0.0;
  /// Keep the violation after every sweep in `TransportPlan::violation_history`.
  bool record_history = false;

  void validate() const;
};

/// A nonnegative coupling together with the log-domain duals that generated
/// it: pi(i,j) = exp((S(i,j) + f_i + g_j) / tau). Plans from non-entropic
/// solvers leave `f`, `g` empty and `tau` at 0.
struct TransportPlan {
  Matrix pi;
  Vector f;
  Vector g;
  double tau = 0.0;
  int iterations_run = 0;
  double marginal_violation = 0.0;
  std::vector<double> violation_history;
};

/// Log-domain Sinkhorn-Knopp for max <S,pi> + tau H(pi) over Pi(a,b).
/// One sweep updates f (rows) and then g (columns), starting from g = 0.
TransportPlan sinkhorn(const SimilarityMatrix& s, const Marginals& marg, const SinkhornConfig& cfg);

/// Same as `sinkhorn`, continuing from a column potential instead of zero.
TransportPlan sinkhorn_warm(const SimilarityMatrix& s, const Marginals& marg,
                            const SinkhornConfig& cfg, const Vector& g_init);

/// The entropic problem with only the column constraint active; the exact
/// maximizer is one column normalization: pi = exp((S + g) / tau) with
/// g_j = tau log b_j - tau LSE_i(S(i,j) / tau). `f` is left at zero.
TransportPlan column_constrained_plan(const SimilarityMatrix& s, const Vector& b, double tau);

/// S + g broadcast over rows, with g from a uniform-marginal Sinkhorn run on S.
/// Row-rank equivalent to the plan itself.
SimilarityMatrix sn_normalize(const SimilarityMatrix& s, const SinkhornConfig& cfg);

/// Column potentials of a uniform-marginal Sinkhorn run on a bank x target
/// matrix, in the additive convention.
HubnessVector estimate_target_hubness(const SimilarityMatrix& bank_targets,
                                      const SinkhornConfig& cfg);

/// Dual-bank normalization: estimates target hubness against the query bank
/// over [targets | target bank], keeps the first n entries and adds them to S.
/// `qbank_tbank` may have zero columns.
SimilarityMatrix dbsn(const SimilarityMatrix& s, const SimilarityMatrix& qbank_targets,
                      const SimilarityMatrix& qbank_tbank, const SinkhornConfig& cfg);

/// sum_ij -pi_ij (log pi_ij - 1), with 0 log 0 = 0.
double plan_entropy(const Matrix& pi);
inline double plan_entropy(const TransportPlan& plan) { return plan_entropy(plan.pi); }

/// ||pi 1 - a||_1 + ||pi^T 1 - b||_1
double marginal_violation(const Matrix& pi, const Marginals& marg);
inline double marginal_violation(const TransportPlan& plan, const Marginals& marg) {
  return marginal_violation(plan.pi, marg);
}

}  // namespace hubkit
