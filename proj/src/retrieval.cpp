#include "hubkit/retrieval.hpp"

#include <algorithm>
#include <string>

namespace hubkit {

GroundTruth GroundTruth::identity(Index m) {
  GroundTruth gt;
  gt.pairs.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) gt.pairs.push_back({static_cast<std::uint32_t>(i)});
  return gt;
}

void GroundTruth::validate(Index n) const {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].empty()) {
      throw Error(ErrorCode::IndexOutOfRange, "query " + std::to_string(i) + " has no correct target");
    }
    for (const auto j : pairs[i]) {
      if (static_cast<Index>(j) >= n) {
        throw Error(ErrorCode::IndexOutOfRange, "query " + std::to_string(i) + " -> target " +
                                                    std::to_string(j) + " >= " + std::to_string(n));
      }
    }
  }
}

std::vector<std::uint32_t> best_rank(const RankMatrix& ranks, const GroundTruth& gt) {
  if (static_cast<Index>(gt.pairs.size()) != ranks.rows()) {
    throw Error(ErrorCode::IndexOutOfRange, "ground truth covers " + std::to_string(gt.pairs.size()) +
                                                " queries, ranking has " + std::to_string(ranks.rows()));
  }
  gt.validate(ranks.cols());
  std::vector<std::uint32_t> best(gt.pairs.size());
  for (Index i = 0; i < ranks.rows(); ++i) {
    const auto order = ranks.row(i);
    const auto& relevant = gt.pairs[i];
    const auto hit = std::find_if(order.begin(), order.end(), [&](std::uint32_t j) {
      return std::find(relevant.begin(), relevant.end(), j) != relevant.end();
    });
    best[i] = static_cast<std::uint32_t>(hit - order.begin()) + 1;
  }
  return best;
}

RetrievalReport evaluate(const RankMatrix& ranks, const GroundTruth& gt, const std::vector<Index>& ks) {
  if (ks.empty()) throw Error(ErrorCode::KOutOfRange, "no K values requested");
  for (const Index k : ks) {
    if (k < 1 || k > ranks.cols()) {
      throw Error(ErrorCode::KOutOfRange, "K = " + std::to_string(k) + " outside [1, " +
                                              std::to_string(ranks.cols()) + "]");
    }
  }
  std::vector<std::uint32_t> ranks_of_best = best_rank(ranks, gt);
  const auto m = static_cast<double>(ranks_of_best.size());

  RetrievalReport report;
  for (const Index k : ks) {
    const auto hits = std::count_if(ranks_of_best.begin(), ranks_of_best.end(),
                                    [k](std::uint32_t r) { return static_cast<Index>(r) <= k; });
    report.r_at[k] = 100.0 * static_cast<double>(hits) / m;
  }
  double sum = 0.0;
  for (const auto r : ranks_of_best) sum += r;
  report.mnr = sum / m;
  const auto mid = ranks_of_best.begin() + (ranks_of_best.size() - 1) / 2;
  std::nth_element(ranks_of_best.begin(), mid, ranks_of_best.end());
  report.mdr = *mid;
  return report;
}

RetrievalReport evaluate(const SimilarityMatrix& s, const GroundTruth& gt, const std::vector<Index>& ks) {
  return evaluate(row_argsort_desc(s), gt, ks);
}

}  // namespace hubkit
