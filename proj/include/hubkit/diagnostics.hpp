#pragma once

#include <cstdint>
#include <vector>

#include "hubkit/core.hpp"

namespace hubkit {

/// N_k(t_j): how many queries hold target j in their top-k list.
struct KOccurrence {
  Index k = 0;
  std::vector<std::int64_t> counts;
};

KOccurrence k_occurrence(const RankMatrix& ranks, Index k);

enum class SkewEstimator {
  /// (1/n) sum (x - mu)^3 / ((1/n) sum (x - mu)^2)^(3/2)
  population,
  /// population value times sqrt(n (n - 1)) / (n - 2)
  sample_adjusted,
};

struct Skewness {
  double value = 0.0;
  /// Set when all counts are equal; `value` is then 0.
  bool zero_variance = false;
};

Skewness skewness(const KOccurrence& occ, SkewEstimator estimator = SkewEstimator::population);

enum class GroundCost { euclidean, one_minus_cosine };

struct EmdConfig {
  Index subsample = 256;
  int repeats = 8;
  std::uint64_t seed = 0;
  GroundCost ground_cost = GroundCost::euclidean;

  void validate() const;
};

/// Earth mover's distance estimate: mean over `repeats` seeded draws of the
/// optimal matching cost between equal-size subsamples of X and Y, divided by
/// the subsample size. The subsample size is min(subsample, |X|, |Y|).
double emd(const EmbeddingSet& x, const EmbeddingSet& y, const EmdConfig& cfg = {});

}  // namespace hubkit
