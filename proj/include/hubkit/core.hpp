#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hubkit/error.hpp"

namespace hubkit {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Which set an embedding matrix or a similarity axis stands for.
enum class Role { query, target, query_bank, target_bank };

std::string_view to_string(Role role) noexcept;

/// A set of embeddings, one per row. Entries are finite and there is at least
/// one row of positive dimension; unit norm is established by `l2_normalize`
/// (use `max_norm_deviation` to check externally supplied sets).
class EmbeddingSet {
 public:
  explicit EmbeddingSet(Matrix data, std::vector<std::string> ids = {});

  Index count() const noexcept { return data_.rows(); }
  Index dim() const noexcept { return data_.cols(); }
  const Matrix& data() const noexcept { return data_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  /// max_i | ||row_i||_2 - 1 |
  double max_norm_deviation() const;

 private:
  Matrix data_;
  std::vector<std::string> ids_;
};

/// Dense m x n score matrix. The values need not be cosines once a
/// normalization has been applied; they are always finite.
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(Matrix values, Role row_role = Role::query,
                            Role col_role = Role::target);

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(Index i, Index j) const { return values_(i, j); }
  Role row_role() const noexcept { return row_role_; }
  Role col_role() const noexcept { return col_role_; }

 private:
  Matrix values_;
  Role row_role_;
  Role col_role_;
};

/// Per-row descending ordering of column indices.
class RankMatrix {
 public:
  RankMatrix(Index rows, Index cols, std::vector<std::uint32_t> order);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  std::span<const std::uint32_t> row(Index i) const {
    return {order_.data() + i * cols_, static_cast<std::size_t>(cols_)};
  }

 private:
  Index rows_;
  Index cols_;
  std::vector<std::uint32_t> order_;
};

bool all_finite(const Matrix& m) noexcept;

EmbeddingSet l2_normalize(const Matrix& raw);

/// S = Q T^T; entry (i,j) is the inner product of query i and target j.
SimilarityMatrix cosine_similarity_matrix(const EmbeddingSet& queries, const EmbeddingSet& targets,
                                          Role row_role = Role::query,
                                          Role col_role = Role::target);

/// Sorts each row by descending score, ties by ascending column index.
RankMatrix row_argsort_desc(const Matrix& scores);
RankMatrix row_argsort_desc(const SimilarityMatrix& s);

/// Caps internal row/column parallelism; 0 restores the runtime default.
void set_max_threads(int threads);
int max_threads() noexcept;

}  // namespace hubkit
