#include <limits>
#include <string>

#include "hubkit/variants.hpp"

namespace hubkit {
namespace {

// Min-cost assignment of every row of `cost` (rows <= cols) to a distinct
// column. Shortest augmenting paths with row/column potentials; 1-based
// internally with column 0 as the virtual source.
std::vector<Index> min_cost_rows_to_cols(const Matrix& cost) {
  const Index rows = cost.rows();
  const Index cols = cost.cols();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<Index> owner(cols + 1, 0), way(cols + 1, 0);

  for (Index i = 1; i <= rows; ++i) {
    owner[0] = i;
    Index j0 = 0;
    std::vector<double> min_reduced(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const Index i0 = owner[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < min_reduced[j]) {
          min_reduced[j] = reduced;
          way[j] = j0;
        }
        if (min_reduced[j] < delta) {
          delta = min_reduced[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_reduced[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const Index j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> row_to_col(rows, -1);
  for (Index j = 1; j <= cols; ++j) {
    if (owner[j] != 0) row_to_col[owner[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment solve_assignment(const Matrix& weights, bool maximize) {
  if (!all_finite(weights)) throw Error(ErrorCode::NonFiniteInput, "assignment weights");
  Assignment out;
  out.row_to_col.assign(weights.rows(), -1);
  if (weights.rows() == 0 || weights.cols() == 0) return out;

  const Matrix cost = maximize ? Matrix(-weights) : weights;
  if (weights.rows() <= weights.cols()) {
    out.row_to_col = min_cost_rows_to_cols(cost);
  } else {
    const Matrix transposed = cost.transpose();
    const std::vector<Index> col_to_row = min_cost_rows_to_cols(transposed);
    for (Index j = 0; j < static_cast<Index>(col_to_row.size()); ++j) {
      out.row_to_col[col_to_row[j]] = j;
    }
  }
  for (Index i = 0; i < weights.rows(); ++i) {
    if (out.row_to_col[i] >= 0) out.value += weights(i, out.row_to_col[i]);
  }
  return out;
}

}  // namespace hubkit
