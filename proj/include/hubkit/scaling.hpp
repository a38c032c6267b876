#pragma once

#include <vector>

#include "hubkit/core.hpp"

namespace hubkit {

/// Per-target (or per-query) compensation scalars.
///
/// The convention is additive throughout the library: the compensated score
/// is `S(i,j) + values[j]`. For inverted softmax the entries are
/// `-tau * LSE_i(S(i,j) / tau)`; for Sinkhorn they are the column potential
/// `tau * log(beta_j)`. A routine that instead stores `-tau * log(beta)` and
/// subtracts it yields the same compensated scores.
struct HubnessVector {
  Vector values;
  double temperature = 0.0;
};

struct DisConfig {
  Index k = 1;
};

struct DualIsConfig {
  double tau1 = 0.02;
  double tau2 = 0.02;

  /// tau1 * tau2 / (tau1 + tau2)
  double lambda() const noexcept { return tau1 * tau2 / (tau1 + tau2); }
  void validate() const;
};

/// Column-wise softmax over queries at temperature `tau`; every output column
/// sums to 1.
SimilarityMatrix inverted_softmax(const SimilarityMatrix& s, double tau);

/// values[j] = -tau * LSE over rows of column j of `bank_targets` / tau.
HubnessVector is_hubness(const SimilarityMatrix& bank_targets, double tau);

/// out(i,j) = s(i,j) + h.values[j].
SimilarityMatrix apply_hubness(const SimilarityMatrix& s, const HubnessVector& h);

/// mask[j] is true iff target j is among the top-k columns of at least one
/// bank row (ties broken by ascending index).
std::vector<bool> dis_subset(const SimilarityMatrix& bank_targets, const DisConfig& cfg);

/// Selected columns are divided by the bank partition function of their
/// column; the others keep the raw similarity.
SimilarityMatrix dynamic_inverted_softmax(const SimilarityMatrix& s,
                                          const SimilarityMatrix& bank_targets,
                                          const DisConfig& cfg, double tau);

/// Product of a query-bank inverted softmax at tau1 and a target-bank one at
/// tau2.
SimilarityMatrix dual_inverted_softmax(const SimilarityMatrix& s,
                                       const SimilarityMatrix& qbank_targets,
                                       const SimilarityMatrix& tbank_targets,
                                       const DualIsConfig& cfg);

/// Additive form of the dual softmax: values[j] = -lambda * LSE_u(Sqb(u,j)/tau1)
/// - lambda * LSE_v(Stb(v,j)/tau2), temperature = lambda. Then
/// exp((S + values) / lambda) equals `dual_inverted_softmax` entrywise.
HubnessVector dual_is_hubness(const SimilarityMatrix& qbank_targets,
                              const SimilarityMatrix& tbank_targets, const DualIsConfig& cfg);

}  // namespace hubkit
