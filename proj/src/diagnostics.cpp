#include "hubkit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hubkit/random.hpp"
#include "hubkit/variants.hpp"

namespace hubkit {

KOccurrence k_occurrence(const RankMatrix& ranks, Index k) {
  if (k < 1 || k > ranks.cols()) {
    throw Error(ErrorCode::KOutOfRange,
                "k = " + std::to_string(k) + ", cols = " + std::to_string(ranks.cols()));
  }
  KOccurrence occ{k, std::vector<std::int64_t>(static_cast<std::size_t>(ranks.cols()), 0)};
  for (Index i = 0; i < ranks.rows(); ++i) {
    const auto order = ranks.row(i);
    for (Index r = 0; r < k; ++r) ++occ.counts[order[r]];
  }
  return occ;
}

Skewness skewness(const KOccurrence& occ, SkewEstimator estimator) {
  const auto n = static_cast<double>(occ.counts.size());
  if (occ.counts.size() < 2) throw Error(ErrorCode::SizeMismatch, "skewness needs >= 2 counts");
  double mean = 0.0;
  for (const auto c : occ.counts) mean += static_cast<double>(c);
  mean /= n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (const auto c : occ.counts) {
    const double d = static_cast<double>(c) - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (m2 == 0.0) return {0.0, true};
  double g1 = m3 / std::pow(m2, 1.5);
  if (estimator == SkewEstimator::sample_adjusted) {
    if (occ.counts.size() < 3) throw Error(ErrorCode::SizeMismatch, "adjusted skewness needs >= 3 counts");
    g1 *= std::sqrt(n * (n - 1.0)) / (n - 2.0);
  }
  return {g1, false};
}

void EmdConfig::validate() const {
  if (subsample < 1) throw Error(ErrorCode::InvalidConfig, "subsample must be >= 1");
  if (repeats < 1) throw Error(ErrorCode::InvalidConfig, "repeats must be >= 1");
}

double emd(const EmbeddingSet& x, const EmbeddingSet& y, const EmdConfig& cfg) {
  cfg.validate();
  if (x.dim() != y.dim()) {
    throw Error(ErrorCode::DimMismatch, std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
  }
  const Index size = std::min({cfg.subsample, x.count(), y.count()});
  double total = 0.0;
  for (int r = 0; r < cfg.repeats; ++r) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    const auto xi = rng.sample_without_replacement(static_cast<std::uint32_t>(x.count()),
                                                   static_cast<std::uint32_t>(size));
    const auto yi = rng.sample_without_replacement(static_cast<std::uint32_t>(y.count()),
                                                   static_cast<std::uint32_t>(size));
    Matrix cost(size, size);
    for (Index a = 0; a < size; ++a) {
      const auto u = x.data().row(xi[a]);
      for (Index b = 0; b < size; ++b) {
        const auto v = y.data().row(yi[b]);
        cost(a, b) = cfg.ground_cost == GroundCost::euclidean ? (u - v).norm() : 1.0 - u.dot(v);
      }
    }
    total += solve_assignment(cost, /*maximize=*/false).value / static_cast<double>(size);
  }
  return total / cfg.repeats;
}

}  // namespace hubkit
