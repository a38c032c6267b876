#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "hubkit/core.hpp"

namespace hubkit::detail {

// out_i = LSE_j((s_ij + col_shift_j) / tau). Max-shifted, so exp only ever
// sees arguments <= 0.
inline Vector row_logsumexp(const Matrix& s, const Vector& col_shift, double tau) {
  const Index rows = s.rows();
  const Index cols = s.cols();
  Vector out(rows);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) {
    const double* row = s.data() + i * cols;
    double peak = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < cols; ++j) peak = std::max(peak, (row[j] + col_shift[j]) / tau);
    double acc = 0.0;
    for (Index j = 0; j < cols; ++j) acc += std::exp((row[j] + col_shift[j]) / tau - peak);
    out[i] = peak + std::log(acc);
  }
  return out;
}

// out_j = LSE_i((s_ij + row_shift_i) / tau). Columns are processed in blocks
// so each thread walks the row-major storage contiguously; within a column
// the reduction order is always i = 0..rows-1.
inline Vector col_logsumexp(const Matrix& s, const Vector& row_shift, double tau) {
  constexpr Index kBlock = 64;
  const Index rows = s.rows();
  const Index cols = s.cols();
  Vector out(cols);
  const Index blocks = (cols + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    const Index j0 = b * kBlock;
    const Index width = std::min(kBlock, cols - j0);
    double peak[kBlock];
    double acc[kBlock];
    std::fill_n(peak, width, -std::numeric_limits<double>::infinity());
    std::fill_n(acc, width, 0.0);
    for (Index i = 0; i < rows; ++i) {
      const double* row = s.data() + i * cols + j0;
      for (Index j = 0; j < width; ++j) peak[j] = std::max(peak[j], (row[j] + row_shift[i]) / tau);
    }
    for (Index i = 0; i < rows; ++i) {
      const double* row = s.data() + i * cols + j0;
      for (Index j = 0; j < width; ++j) acc[j] += std::exp((row[j] + row_shift[i]) / tau - peak[j]);
    }
    for (Index j = 0; j < width; ++j) out[j0 + j] = peak[j] + std::log(acc[j]);
  }
  return out;
}

}  // namespace hubkit::detail
