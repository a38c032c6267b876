#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "hubkit/core.hpp"
#include "hubkit/error.hpp"
#include "hubkit/random.hpp"

namespace testing_util {

using hubkit::Index;
using hubkit::Matrix;

inline Matrix uniform_matrix(hubkit::Rng& rng, Index rows, Index cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = lo + (hi - lo) * rng.uniform();
  return m;
}

inline Matrix gaussian_matrix(hubkit::Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = rng.gaussian();
  return m;
}

// Descending order per row, ties by ascending column, via a plain stable sort.
inline std::vector<std::vector<Index>> naive_argsort(const Matrix& m) {
  std::vector<std::vector<Index>> out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    out[i].resize(m.cols());
    std::iota(out[i].begin(), out[i].end(), Index{0});
    std::stable_sort(out[i].begin(), out[i].end(), [&](Index x, Index y) { return m(i, x) > m(i, y); });
  }
  return out;
}

inline std::vector<std::vector<Index>> library_argsort(const Matrix& m) {
  const auto ranks = hubkit::row_argsort_desc(m);
  std::vector<std::vector<Index>> out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    for (const auto j : ranks.row(i)) out[i].push_back(j);
  }
  return out;
}

}  // namespace testing_util

#define EXPECT_HUBKIT_ERROR(stmt, expected)                         \
  do {                                                              \
    try {                                                           \
      stmt;                                                         \
      ADD_FAILURE() << "expected " #expected;                       \
    } catch (const hubkit::Error& e) {                              \
      EXPECT_EQ(e.code(), hubkit::ErrorCode::expected) << e.what(); \
    }                                                               \
  } while (0)
