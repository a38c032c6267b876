#include "hubkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hubkit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroVectorRow: return "ZeroVectorRow";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NonPositiveTau: return "NonPositiveTau";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::ColMismatch: return "ColMismatch";
    case ErrorCode::RowMismatch: return "RowMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ZeroMarginalEntry: return "ZeroMarginalEntry";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyPlan: return "EmptyPlan";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::query: return "query";
    case Role::target: return "target";
    case Role::query_bank: return "query_bank";
    case Role::target_bank: return "target_bank";
  }
  return "unknown";
}

bool all_finite(const Matrix& m) noexcept { return m.allFinite(); }

EmbeddingSet::EmbeddingSet(Matrix data, std::vector<std::string> ids)
    : data_(std::move(data)), ids_(std::move(ids)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw Error(ErrorCode::SizeMismatch, "embedding set must have at least one row and column");
  }
  if (!all_finite(data_)) throw Error(ErrorCode::NonFiniteInput, "embedding set");
  if (!ids_.empty() && static_cast<Index>(ids_.size()) != data_.rows()) {
    throw Error(ErrorCode::LengthMismatch, "ids length " + std::to_string(ids_.size()) +
                                               " != count " + std::to_string(data_.rows()));
  }
}

double EmbeddingSet::max_norm_deviation() const {
  return (data_.rowwise().norm().array() - 1.0).abs().maxCoeff();
}

SimilarityMatrix::SimilarityMatrix(Matrix values, Role row_role, Role col_role)
    : values_(std::move(values)), row_role_(row_role), col_role_(col_role) {
  if (!all_finite(values_)) throw Error(ErrorCode::NonFiniteInput, "similarity matrix");
}

RankMatrix::RankMatrix(Index rows, Index cols, std::vector<std::uint32_t> order)
    : rows_(rows), cols_(cols), order_(std::move(order)) {
  if (static_cast<Index>(order_.size()) != rows_ * cols_) {
    throw Error(ErrorCode::SizeMismatch, "rank matrix storage does not match shape");
  }
}

EmbeddingSet l2_normalize(const Matrix& raw) {
  if (!all_finite(raw)) throw Error(ErrorCode::NonFiniteInput, "l2_normalize input");
  Matrix out = raw;
  for (Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm == 0.0) throw Error(ErrorCode::ZeroVectorRow, "row " + std::to_string(i));
    out.row(i) /= norm;
  }
  return EmbeddingSet(std::move(out));
}

SimilarityMatrix cosine_similarity_matrix(const EmbeddingSet& queries, const EmbeddingSet& targets,
                                          Role row_role, Role col_role) {
  if (queries.dim() != targets.dim()) {
    throw Error(ErrorCode::DimMismatch, std::to_string(queries.dim()) + " vs " +
                                            std::to_string(targets.dim()));
  }
  return SimilarityMatrix(queries.data() * targets.data().transpose(), row_role, col_role);
}

RankMatrix row_argsort_desc(const Matrix& scores) {
  if (!all_finite(scores)) throw Error(ErrorCode::NonFiniteInput, "row_argsort_desc input");
  const Index rows = scores.rows();
  const Index cols = scores.cols();
  std::vector<std::uint32_t> order(static_cast<std::size_t>(rows * cols));
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) {
    auto first = order.begin() + i * cols;
    auto last = first + cols;
    std::iota(first, last, 0U);
    const double* row = scores.data() + i * cols;
    std::sort(first, last, [row](std::uint32_t a, std::uint32_t b) {
      return row[a] > row[b] || (row[a] == row[b] && a < b);
    });
  }
  return RankMatrix(rows, cols, std::move(order));
}

RankMatrix row_argsort_desc(const SimilarityMatrix& s) { return row_argsort_desc(s.values()); }

void set_max_threads(int threads) {
#ifdef _OPENMP
  static const int runtime_default = omp_get_max_threads();
  omp_set_num_threads(threads > 0 ? threads : runtime_default);
#else
  (void)threads;
#endif
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hubkit
