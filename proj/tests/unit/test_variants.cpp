#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "hubkit/sinkhorn.hpp"
#include "hubkit/variants.hpp"

using namespace hubkit;
using testing_util::naive_argsort;
using testing_util::uniform_matrix;

namespace {

double best_permutation(const Matrix& w, bool maximize) {
  std::vector<Index> perm(w.rows());
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = maximize ? -INFINITY : INFINITY;
  do {
    double v = 0.0;
    for (Index i = 0; i < w.rows(); ++i) v += w(i, perm[i]);
    best = maximize ? std::max(best, v) : std::min(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Best injective row->column map for m <= n by enumerating column tuples.
double best_injection(const Matrix& w) {
  std::vector<Index> cols(w.cols());
  std::iota(cols.begin(), cols.end(), Index{0});
  double best = -INFINITY;
  do {
    double v = 0.0;
    for (Index i = 0; i < w.rows(); ++i) v += w(i, cols[i]);
    best = std::max(best, v);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

// Dual gradient ascent for the Euclidean projection of x onto the transport
// polytope: pi = max(0, x + alpha_i + beta_j).
Matrix qp_oracle(const Matrix& x, const Vector& a, const Vector& b) {
  Vector alpha = Vector::Zero(x.rows()), beta = Vector::Zero(x.cols());
  const double step = 1.0 / static_cast<double>(x.rows() + x.cols());
  Matrix pi(x.rows(), x.cols());
  for (int it = 0; it < 200000; ++it) {
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < x.cols(); ++j) pi(i, j) = std::max(0.0, x(i, j) + alpha[i] + beta[j]);
    const Vector rg = a - pi.rowwise().sum();
    const Vector cg = b - pi.colwise().sum().transpose();
    if (rg.cwiseAbs().maxCoeff() < 1e-13 && cg.cwiseAbs().maxCoeff() < 1e-13) break;
    alpha += step * rg;
    beta += step * cg;
  }
  return pi;
}

}  // namespace

TEST(Assignment, MatchesPermutationEnumeration) {
  Rng rng(51);
  for (int inst = 0; inst < 100; ++inst) {
    const Matrix w = uniform_matrix(rng, 5, 5);
    EXPECT_EQ(solve_assignment(w, true).value, best_permutation(w, true));
    EXPECT_EQ(solve_assignment(w, false).value, best_permutation(w, false));
  }
}

TEST(Assignment, SevenBySevenCertificate) {
  Rng rng(52);
  for (int inst = 0; inst < 5; ++inst) {
    const Matrix w = uniform_matrix(rng, 7, 7);
    EXPECT_EQ(solve_assignment(w, true).value, best_permutation(w, true));
  }
}

TEST(Assignment, RectangularBothOrientations) {
  Rng rng(53);
  for (int inst = 0; inst < 20; ++inst) {
    const Matrix wide = uniform_matrix(rng, 3, 5);
    const Assignment a = solve_assignment(wide, true);
    EXPECT_NEAR(a.value, best_injection(wide), 1e-12);
    std::vector<Index> used = a.row_to_col;
    std::sort(used.begin(), used.end());
    EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());

    const Matrix tall = wide.transpose();
    const Assignment b = solve_assignment(tall, true);
    EXPECT_NEAR(b.value, best_injection(wide), 1e-12);
    EXPECT_EQ(std::count(b.row_to_col.begin(), b.row_to_col.end(), Index{-1}), 2);
  }
}

TEST(Assignment, RejectsNonFinite) {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = NAN;
  EXPECT_HUBKIT_ERROR(solve_assignment(w, true), NonFiniteInput);
}

TEST(ProjectSimplex, KnownCases) {
  Vector v(3);
  v << 0.5, 0.2, 0.3;
  EXPECT_LE((project_simplex(v, 1.0) - v).cwiseAbs().maxCoeff(), 1e-15);
  v << 2.0, 0.0, 0.0;
  Vector expected(3);
  expected << 1.0, 0.0, 0.0;
  EXPECT_LE((project_simplex(v, 1.0) - expected).cwiseAbs().maxCoeff(), 1e-15);
  v << 1.0, 1.0, -5.0;
  expected << 0.25, 0.25, 0.0;
  EXPECT_LE((project_simplex(v, 0.5) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectSimplex, OptimalityConditions) {
  Rng rng(54);
  for (int inst = 0; inst < 50; ++inst) {
    const Vector v = uniform_matrix(rng, 9, 1, -2.0, 2.0).col(0);
    const Vector w = project_simplex(v, 0.7);
    EXPECT_NEAR(w.sum(), 0.7, 1e-12);
    EXPECT_GE(w.minCoeff(), 0.0);
    // KKT: v - w is constant on the support and no larger off it.
    double theta = NAN;
    for (Index k = 0; k < 9; ++k) {
      if (w[k] > 0.0) {
        if (std::isnan(theta)) theta = v[k] - w[k];
        EXPECT_NEAR(v[k] - w[k], theta, 1e-12);
      }
    }
    for (Index k = 0; k < 9; ++k) {
      if (w[k] == 0.0) EXPECT_LE(v[k], theta + 1e-12);
    }
  }
}

TEST(AnnealScheduleType, Validation) {
  EXPECT_NO_THROW(AnnealSchedule{}.validate());
  EXPECT_HUBKIT_ERROR((AnnealSchedule{0.1, 0.5, 0.2, 10}).validate(), InvalidConfig);
  EXPECT_HUBKIT_ERROR((AnnealSchedule{0.1, 1.0, 1e-3, 10}).validate(), InvalidConfig);
  EXPECT_HUBKIT_ERROR((AnnealSchedule{0.1, 0.5, 0.0, 10}).validate(), NonPositiveTau);
  EXPECT_HUBKIT_ERROR((AnnealSchedule{0.1, 0.5, 1e-3, 0}).validate(), InvalidConfig);
}

TEST(Otn, OneByOne) {
  const TransportPlan plan = otn(SimilarityMatrix(Matrix::Constant(1, 1, 0.3)), Marginals::uniform(1, 1));
  EXPECT_NEAR(plan.pi(0, 0), 1.0, 1e-12);
}

TEST(Otn, MatchesBirkhoffVertexOptimum) {
  Rng rng(55);
  for (int inst = 0; inst < 20; ++inst) {
    const Matrix s = uniform_matrix(rng, 4, 4);
    const Marginals marg = Marginals::uniform(4, 4);
    const TransportPlan plan = otn(SimilarityMatrix(s), marg);
    EXPECT_NEAR(s.cwiseProduct(plan.pi).sum(), best_permutation(s, true) / 4.0, 1e-3);
    EXPECT_LE(marginal_violation(plan.pi, marg), 1e-9);
    EXPECT_GE(plan.pi.minCoeff(), 0.0);
  }
}

TEST(Otn, DominatesSnObjective) {
  Rng rng(56);
  for (int inst = 0; inst < 5; ++inst) {
    const SimilarityMatrix s(uniform_matrix(rng, 12, 9));
    const Marginals marg = Marginals::uniform(12, 9);
    const TransportPlan ot = otn(s, marg);
    const TransportPlan sn = sinkhorn(s, marg, {0.05, 5000, 1e-12});
    ASSERT_LE(sn.marginal_violation, 1e-10);
    EXPECT_GE(s.values().cwiseProduct(ot.pi).sum(), s.values().cwiseProduct(sn.pi).sum() - 1e-3);
    EXPECT_LE(ot.marginal_violation, 1e-9);
  }
}

TEST(L2n, FeasibleInputIsFixedPoint) {
  Marginals marg{Vector(3), Vector(2)};
  marg.a << 0.2, 0.3, 0.5;
  marg.b << 0.6, 0.4;
  const Matrix s = marg.a * marg.b.transpose();
  const L2nResult res = l2n(SimilarityMatrix(s), marg, 1.0);
  EXPECT_TRUE(res.converged);
  EXPECT_LE((res.plan.pi - s).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(L2n, MatchesQpOracle) {
  Rng rng(57);
  for (int inst = 0; inst < 20; ++inst) {
    const Matrix s = uniform_matrix(rng, 4, 4);
    const Marginals marg = Marginals::uniform(4, 4);
    for (const double coeff : {1.0, 100.0}) {
      const L2nResult res = l2n(SimilarityMatrix(s), marg, coeff);
      EXPECT_TRUE(res.converged);
      EXPECT_LE((res.plan.pi - qp_oracle(coeff * s, marg.a, marg.b)).norm(), 1e-4) << inst << " " << coeff;
      EXPECT_LE(marginal_violation(res.plan.pi, marg), 1e-6);
    }
  }
}

TEST(L2n, Idempotent) {
  Rng rng(58);
  const Matrix s = uniform_matrix(rng, 6, 7);
  const Marginals marg = Marginals::uniform(6, 7);
  const L2nResult first = l2n(SimilarityMatrix(s), marg, 5.0);
  const L2nResult again = l2n(SimilarityMatrix(first.plan.pi), marg, 1.0);
  EXPECT_LE((again.plan.pi - first.plan.pi).norm(), 1e-10);
}

TEST(L2n, ReportsNonConvergence) {
  Rng rng(59);
  const L2nResult res = l2n(SimilarityMatrix(uniform_matrix(rng, 8, 8)), Marginals::uniform(8, 8), 100.0, 1);
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.sweeps, 1);
}

TEST(L2n, Errors) {
  const SimilarityMatrix s(Matrix::Zero(2, 2));
  EXPECT_HUBKIT_ERROR(l2n(s, Marginals::uniform(2, 2), 0.0), InvalidConfig);
  EXPECT_HUBKIT_ERROR(l2n(s, Marginals::uniform(2, 2), 1.0, 0), InvalidConfig);
  EXPECT_HUBKIT_ERROR(l2n(s, Marginals::uniform(3, 2)), ShapeMismatch);
}

TEST(Hn, IdentityLike) {
  const TransportPlan plan = hn(SimilarityMatrix(Matrix::Identity(2, 2)));
  EXPECT_EQ(plan.pi, Matrix::Identity(2, 2));
}

TEST(Hn, SurplusQueriesGetZeroRows) {
  Matrix s(3, 2);
  s << 0.9, 0.1, 0.8, 0.7, 0.2, 0.3;
  const TransportPlan plan = hn(SimilarityMatrix(s));
  EXPECT_EQ(plan.pi.sum(), 2.0);
  int zero_rows = 0;
  for (Index i = 0; i < 3; ++i) zero_rows += plan.pi.row(i).sum() == 0.0;
  EXPECT_EQ(zero_rows, 1);
  // 0.9 + 0.7 beats every other injection.
  EXPECT_EQ(plan.pi(0, 0), 1.0);
  EXPECT_EQ(plan.pi(1, 1), 1.0);
}

TEST(HnScores, AssignedFirstThenRawOrder) {
  Matrix s(3, 3);
  s << 0.9, 0.8, 0.1, 0.95, 0.2, 0.3, 0.1, 0.2, 0.3;
  const SimilarityMatrix sim(s);
  const TransportPlan plan = hn(sim);
  const auto order = naive_argsort(hn_scores(sim, plan, HnRanking::assigned_first).values());
  const auto raw = naive_argsort(s);
  for (Index i = 0; i < 3; ++i) {
    Index assigned = 0;
    plan.pi.row(i).maxCoeff(&assigned);
    EXPECT_EQ(order[i][0], assigned);
    // Remaining columns follow raw similarity.
    std::vector<Index> rest;
    for (const auto j : raw[i]) if (j != assigned) rest.push_back(j);
    EXPECT_EQ(std::vector<Index>(order[i].begin() + 1, order[i].end()), rest);
  }
  EXPECT_EQ(hn_scores(sim, plan, HnRanking::literal).values(), plan.pi);
  EXPECT_HUBKIT_ERROR(hn_scores(SimilarityMatrix(Matrix::Zero(2, 2)), plan, HnRanking::literal), ShapeMismatch);
}

TEST(Sparsity, Definitions) {
  EXPECT_DOUBLE_EQ(sparsity(Matrix::Identity(10, 10)), 0.9);
  Rng rng(60);
  const SimilarityMatrix s(uniform_matrix(rng, 10, 10, 0.0, 0.1));
  EXPECT_EQ(sparsity(sinkhorn(s, Marginals::uniform(10, 10), {0.01, 10})), 0.0);
  EXPECT_HUBKIT_ERROR(sparsity(Matrix(0, 0)), EmptyPlan);
  EXPECT_EQ(sparsity(Matrix::Zero(2, 2)), 1.0);
}
