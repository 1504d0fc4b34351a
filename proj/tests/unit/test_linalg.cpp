#include "fmmsl/error.hpp"
#include "fmmsl/linalg.hpp"
#include "fmmsl/parallel.hpp"
#include "fmmsl/rng.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>

using namespace fmmsl;

TEST(Vech, ColumnStackedLowerTriangle) {
  Matrix m(3, 3);
  m << 1, 2, 3,
       2, 4, 5,
       3, 5, 6;
  Vector v = vech(m);
  ASSERT_EQ(v.size(), 6);
  EXPECT_EQ(v(0), 1);
  EXPECT_EQ(v(1), 2);
  EXPECT_EQ(v(2), 3);
  EXPECT_EQ(v(3), 4);
  EXPECT_EQ(v(4), 5);
  EXPECT_EQ(v(5), 6);
  EXPECT_EQ(unvech(v, 3), m);
}

TEST(Vech, RejectsWrongLength) { EXPECT_THROW(unvech(Vector::Zero(4), 3), DataError); }

TEST(Symmetry, RelativeTolerance) {
  Matrix m(2, 2);
  m << 1e6, 1.0, 1.0 + 1e-7, 1e6;
  EXPECT_TRUE(is_symmetric(m));
  m(1, 0) = 1.1;
  EXPECT_FALSE(is_symmetric(m));
  EXPECT_TRUE(is_symmetric(symmetrize(m)));
}

TEST(RepairPositiveDefinite, LeavesHealthyMatrixAlone) {
  Matrix m(2, 2);
  m << 2, 0.5, 0.5, 1;
  const Matrix before = m;
  bool repaired = true;
  ASSERT_TRUE(repair_positive_definite(m, 1e-10, &repaired));
  EXPECT_FALSE(repaired);
  EXPECT_EQ(m, before);
}

TEST(RepairPositiveDefinite, LiftsSmallestEigenvalueToFloor) {
  Matrix m(2, 2);
  m << 1, 1, 1, 1;  // eigenvalues 0 and 2
  bool repaired = false;
  ASSERT_TRUE(repair_positive_definite(m, 1e-10, &repaired));
  EXPECT_TRUE(repaired);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  EXPECT_GE(es.eigenvalues()(0), 1e-10 * 2.0 / 2.0 * (1 - 1e-6));
  EXPECT_EQ(m.llt().info(), Eigen::Success);
}

TEST(RepairPositiveDefinite, RefusesNonPositiveTrace) {
  Matrix m = -Matrix::Identity(2, 2);
  EXPECT_FALSE(repair_positive_definite(m));
}

TEST(Seeds, DerivedSeedsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
  Engine a = make_engine(42);
  Engine b = make_engine(42);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 4);
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(
                   10, [](std::size_t i) {
                     if (i == 7) throw std::runtime_error("boom");
                   },
                   3),
               std::runtime_error);
}

TEST(ParallelFor, ThreadCountFromEnvironment) {
  ::setenv("FMMSL_THREADS", "3", 1);
  EXPECT_EQ(default_thread_count(), 3u);
  ::unsetenv("FMMSL_THREADS");
  EXPECT_GE(default_thread_count(), 1u);
}
