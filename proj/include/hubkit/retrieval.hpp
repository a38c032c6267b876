#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hubkit/core.hpp"

namespace hubkit {

/// pairs[i] lists the correct targets of query i (nonempty, each < n).
struct GroundTruth {
  std::vector<std::vector<std::uint32_t>> pairs;

  /// i -> {i} for i < m.
  static GroundTruth identity(Index m);
  void validate(Index n) const;
};

struct RetrievalReport {
  /// K -> percentage of queries whose best correct rank is <= K.
  std::map<Index, double> r_at;
  /// Lower median of the best ranks (1-based).
  double mdr = 0.0;
  double mnr = 0.0;
  std::optional<double> skewness;
  std::string normalization = "none";
  std::vector<std::pair<std::string, double>> params;
};

/// 1-based position of the highest-ranked correct target for each query.
std::vector<std::uint32_t> best_rank(const RankMatrix& ranks, const GroundTruth& gt);

RetrievalReport evaluate(const RankMatrix& ranks, const GroundTruth& gt, const std::vector<Index>& ks);
RetrievalReport evaluate(const SimilarityMatrix& s, const GroundTruth& gt, const std::vector<Index>& ks);

}  // namespace hubkit
