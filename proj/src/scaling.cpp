#include "hubkit/scaling.hpp"

#include <cmath>
#include <string>

#include "logsumexp.hpp"

namespace hubkit {
namespace {

void require_tau(double tau, const char* name) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::NonPositiveTau, std::string(name) + " = " + std::to_string(tau));
  }
}

void require_same_cols(const SimilarityMatrix& s, const SimilarityMatrix& bank) {
  if (s.cols() != bank.cols()) {
    throw Error(ErrorCode::ColMismatch,
                std::to_string(s.cols()) + " vs bank " + std::to_string(bank.cols()));
  }
}

Vector negative_column_lse(const Matrix& s, double tau) {
  return -tau * detail::col_logsumexp(s, Vector::Zero(s.rows()), tau);
}

}  // namespace

void DualIsConfig::validate() const {
  require_tau(tau1, "tau1");
  require_tau(tau2, "tau2");
}

SimilarityMatrix inverted_softmax(const SimilarityMatrix& s, double tau) {
  require_tau(tau, "tau");
  const Vector lse = detail::col_logsumexp(s.values(), Vector::Zero(s.rows()), tau);
  Matrix out(s.rows(), s.cols());
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = 0; j < s.cols(); ++j) out(i, j) = std::exp(s(i, j) / tau - lse[j]);
  }
  return SimilarityMatrix(std::move(out), s.row_role(), s.col_role());
}

HubnessVector is_hubness(const SimilarityMatrix& bank_targets, double tau) {
  require_tau(tau, "tau");
  return {negative_column_lse(bank_targets.values(), tau), tau};
}

SimilarityMatrix apply_hubness(const SimilarityMatrix& s, const HubnessVector& h) {
  if (h.values.size() != s.cols()) {
    throw Error(ErrorCode::LengthMismatch, "hubness length " + std::to_string(h.values.size()) +
                                               " vs " + std::to_string(s.cols()) + " columns");
  }
  Matrix out = s.values().rowwise() + h.values.transpose();
  return SimilarityMatrix(std::move(out), s.row_role(), s.col_role());
}

std::vector<bool> dis_subset(const SimilarityMatrix& bank_targets, const DisConfig& cfg) {
  const Index n = bank_targets.cols();
  if (cfg.k < 1 || cfg.k > n) {
    throw Error(ErrorCode::KOutOfRange, "k = " + std::to_string(cfg.k) + ", n = " + std::to_string(n));
  }
  const RankMatrix ranks = row_argsort_desc(bank_targets);
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (Index u = 0; u < ranks.rows(); ++u) {
    const auto order = ranks.row(u);
    for (Index r = 0; r < cfg.k; ++r) mask[order[r]] = true;
  }
  return mask;
}

SimilarityMatrix dynamic_inverted_softmax(const SimilarityMatrix& s,
                                          const SimilarityMatrix& bank_targets,
                                          const DisConfig& cfg, double tau) {
  require_same_cols(s, bank_targets);
  require_tau(tau, "tau");
  const std::vector<bool> selected = dis_subset(bank_targets, cfg);
  const Vector lse = detail::col_logsumexp(bank_targets.values(), Vector::Zero(bank_targets.rows()), tau);
  Matrix out = s.values();
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = 0; j < s.cols(); ++j) {
      if (selected[j]) out(i, j) = std::exp(s(i, j) / tau - lse[j]);
    }
  }
  return SimilarityMatrix(std::move(out), s.row_role(), s.col_role());
}

SimilarityMatrix dual_inverted_softmax(const SimilarityMatrix& s,
                                       const SimilarityMatrix& qbank_targets,
                                       const SimilarityMatrix& tbank_targets,
                                       const DualIsConfig& cfg) {
  require_same_cols(s, qbank_targets);
  require_same_cols(s, tbank_targets);
  cfg.validate();
  const Vector lse_q =
      detail::col_logsumexp(qbank_targets.values(), Vector::Zero(qbank_targets.rows()), cfg.tau1);
  const Vector lse_t =
      detail::col_logsumexp(tbank_targets.values(), Vector::Zero(tbank_targets.rows()), cfg.tau2);
  Matrix out(s.rows(), s.cols());
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = 0; j < s.cols(); ++j) {
      out(i, j) = std::exp(s(i, j) / cfg.tau1 - lse_q[j]) * std::exp(s(i, j) / cfg.tau2 - lse_t[j]);
    }
  }
  return SimilarityMatrix(std::move(out), s.row_role(), s.col_role());
}

HubnessVector dual_is_hubness(const SimilarityMatrix& qbank_targets,
                              const SimilarityMatrix& tbank_targets, const DualIsConfig& cfg) {
  if (qbank_targets.cols() != tbank_targets.cols()) {
    throw Error(ErrorCode::ColMismatch, "query-bank and target-bank matrices disagree on targets");
  }
  cfg.validate();
  const double lambda = cfg.lambda();
  const Vector lse_q =
      detail::col_logsumexp(qbank_targets.values(), Vector::Zero(qbank_targets.rows()), cfg.tau1);
  const Vector lse_t =
      detail::col_logsumexp(tbank_targets.values(), Vector::Zero(tbank_targets.rows()), cfg.tau2);
  return {-lambda * (lse_q + lse_t), lambda};
}

}  // namespace hubkit
