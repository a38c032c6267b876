#include "hubkit/sinkhorn.hpp"

#include <cmath>
#include <string>

#include "logsumexp.hpp"

namespace hubkit {
namespace {

void require_shape(const SimilarityMatrix& s, const Marginals& marg) {
  if (marg.a.size() != s.rows() || marg.b.size() != s.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                "marginals " + std::to_string(marg.a.size()) + "x" + std::to_string(marg.b.size()) +
                    " vs matrix " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()));
  }
}

Matrix materialize(const Matrix& s, const Vector& f, const Vector& g, double tau) {
  Matrix pi(s.rows(), s.cols());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = 0; j < s.cols(); ++j) pi(i, j) = std::exp((s(i, j) + f[i] + g[j]) / tau);
  }
  return pi;
}

}  // namespace

Marginals Marginals::uniform(Index m, Index n) {
  if (m < 1 || n < 1) throw Error(ErrorCode::ShapeMismatch, "uniform marginals need m, n >= 1");
  return {Vector::Constant(m, 1.0 / static_cast<double>(m)),
          Vector::Constant(n, 1.0 / static_cast<double>(n))};
}

void Marginals::validate() const {
  for (const Vector* v : {&a, &b}) {
    if (v->size() == 0) throw Error(ErrorCode::ShapeMismatch, "empty marginal");
    if (!v->allFinite() || (v->array() <= 0.0).any()) {
      throw Error(ErrorCode::ZeroMarginalEntry, "marginal entries must be finite and > 0");
    }
    if (std::abs(v->sum() - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidConfig, "marginal sums to " + std::to_string(v->sum()));
    }
  }
}

void SinkhornConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::NonPositiveTau, "tau = " + std::to_string(tau));
  }
  if (max_iters < 1) throw Error(ErrorCode::InvalidConfig, "max_iters must be >= 1");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidConfig, "tol must be >= 0");
}

TransportPlan sinkhorn(const SimilarityMatrix& s, const Marginals& marg, const SinkhornConfig& cfg) {
  return sinkhorn_warm(s, marg, cfg, Vector::Zero(s.cols()));
}

TransportPlan sinkhorn_warm(const SimilarityMatrix& s, const Marginals& marg,
                            const SinkhornConfig& cfg, const Vector& g_init) {
  cfg.validate();
  require_shape(s, marg);
  marg.validate();
  if (g_init.size() != s.cols()) throw Error(ErrorCode::LengthMismatch, "initial column potential");

  const double tau = cfg.tau;
  const Matrix& values = s.values();
  const Vector log_a = marg.a.array().log();
  const Vector log_b = marg.b.array().log();
  const bool monitor = cfg.tol > 0.0 || cfg.record_history;

  TransportPlan plan;
  plan.tau = tau;
  plan.g = g_init;
  // row_lse holds LSE_j((S_ij + g_j)/tau) for the current g; the f update
  // needs it and so does the row-marginal check of the previous sweep.
  Vector row_lse = detail::row_logsumexp(values, plan.g, tau);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    plan.f = tau * (log_a - row_lse);
    plan.g = tau * (log_b - detail::col_logsumexp(values, plan.f, tau));
    plan.iterations_run = it;
    if (!monitor && it == cfg.max_iters) break;
    row_lse = detail::row_logsumexp(values, plan.g, tau);
    if (monitor) {
      // Columns are exact after the g update, so the violation is the row part.
      const double violation =
          ((plan.f / tau + row_lse).array().exp() - marg.a.array()).abs().sum();
      if (cfg.record_history) plan.violation_history.push_back(violation);
      if (cfg.tol > 0.0 && violation <= cfg.tol) break;
    }
  }
  plan.pi = materialize(values, plan.f, plan.g, tau);
  plan.marginal_violation = marginal_violation(plan.pi, marg);
  return plan;
}

TransportPlan column_constrained_plan(const SimilarityMatrix& s, const Vector& b, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::NonPositiveTau, "tau = " + std::to_string(tau));
  if (b.size() != s.cols()) throw Error(ErrorCode::ShapeMismatch, "column marginal length");
  if ((b.array() <= 0.0).any()) throw Error(ErrorCode::ZeroMarginalEntry, "column marginal");
  TransportPlan plan;
  plan.tau = tau;
  plan.f = Vector::Zero(s.rows());
  plan.g = tau * (b.array().log().matrix() - detail::col_logsumexp(s.values(), plan.f, tau));
  plan.iterations_run = 1;
  plan.pi = materialize(s.values(), plan.f, plan.g, tau);
  plan.marginal_violation = (plan.pi.colwise().sum().transpose() - b).lpNorm<1>();
  return plan;
}

SimilarityMatrix sn_normalize(const SimilarityMatrix& s, const SinkhornConfig& cfg) {
  const TransportPlan plan = sinkhorn(s, Marginals::uniform(s.rows(), s.cols()), cfg);
  return apply_hubness(s, HubnessVector{plan.g, cfg.tau});
}

HubnessVector estimate_target_hubness(const SimilarityMatrix& bank_targets,
                                      const SinkhornConfig& cfg) {
  if (bank_targets.rows() < 1) throw Error(ErrorCode::ShapeMismatch, "bank has no rows");
  const TransportPlan plan =
      sinkhorn(bank_targets, Marginals::uniform(bank_targets.rows(), bank_targets.cols()), cfg);
  return {plan.g, cfg.tau};
}

SimilarityMatrix dbsn(const SimilarityMatrix& s, const SimilarityMatrix& qbank_targets,
                      const SimilarityMatrix& qbank_tbank, const SinkhornConfig& cfg) {
  if (qbank_targets.rows() != qbank_tbank.rows()) {
    throw Error(ErrorCode::RowMismatch, "query bank rows " + std::to_string(qbank_targets.rows()) +
                                            " vs " + std::to_string(qbank_tbank.rows()));
  }
  if (qbank_targets.cols() != s.cols()) {
    throw Error(ErrorCode::ColMismatch, "bank-target matrix has " +
                                            std::to_string(qbank_targets.cols()) + " columns, S has " +
                                            std::to_string(s.cols()));
  }
  const Index n = s.cols();
  Matrix joint(qbank_targets.rows(), n + qbank_tbank.cols());
  joint << qbank_targets.values(), qbank_tbank.values();
  HubnessVector h = estimate_target_hubness(
      SimilarityMatrix(std::move(joint), Role::query_bank, Role::target), cfg);
  h.values.conservativeResize(n);
  return apply_hubness(s, h);
}

double plan_entropy(const Matrix& pi) {
  double h = 0.0;
  for (Index i = 0; i < pi.rows(); ++i) {
    for (Index j = 0; j < pi.cols(); ++j) {
      const double p = pi(i, j);
      if (p > 0.0) h -= p * (std::log(p) - 1.0);
    }
  }
  return h;
}

double marginal_violation(const Matrix& pi, const Marginals& marg) {
  if (marg.a.size() != pi.rows() || marg.b.size() != pi.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "plan and marginals disagree");
  }
  return (pi.rowwise().sum() - marg.a).lpNorm<1>() +
         (pi.colwise().sum().transpose() - marg.b).lpNorm<1>();
}

}  // namespace hubkit
