#include "linksynth/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "test_support.hpp"

namespace linksynth {
namespace {

using testing::Rng;

TEST(RealRootsTest, KnownRootsInRange) {
  const RealPolynomial p = RealPolynomial::from_roots({-3.0, -0.5, 1.0, 2.5});
  const std::vector<double> roots = real_roots(p, -1.0, 3.0);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], -0.5, 1e-12);
  EXPECT_NEAR(roots[1], 1.0, 1e-12);
  EXPECT_NEAR(roots[2], 2.5, 1e-12);
}

TEST(RealRootsTest, UnboundedRange) {
  const RealPolynomial p =
      RealPolynomial::from_roots({-40.0, 7.0}) * RealPolynomial{1.0, 0.0, 1.0};
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> roots = real_roots(p, -inf, inf);
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0], -40.0, 1e-10);
  EXPECT_NEAR(roots[1], 7.0, 1e-12);
}

TEST(RealRootsTest, DoubleRootCollapsed) {
  const RealPolynomial p = RealPolynomial::from_roots({1.0, 1.0, -2.0});
  const std::vector<double> roots = real_roots(p, -5.0, 5.0);
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0], -2.0, 1e-10);
  EXPECT_NEAR(roots[1], 1.0, 1e-6);
}

TEST(RealRootsTest, NoRealRoots) {
  EXPECT_TRUE(real_roots(RealPolynomial{1.0, 0.0, 4.0}, -10, 10).empty());
}

TEST(RealRootsTest, RandomRootSetsRecovered) {
  Rng rng(31);
  for (int n = 0; n < 100; ++n) {
    std::vector<double> r;
    for (int i = 0; i < 6; ++i) r.push_back(rng.uniform(-10.0, 10.0));
    std::sort(r.begin(), r.end());
    bool separated = true;
    for (int i = 1; i < 6; ++i) separated &= r[i] - r[i - 1] > 1e-2;
    if (!separated) continue;
    const RealPolynomial p =
        RealPolynomial::from_roots(r) * rng.uniform(0.1, 100.0);
    const std::vector<double> got = real_roots(p, -20.0, 20.0);
    ASSERT_EQ(got.size(), r.size());
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(got[i], r[i], 1e-8);
  }
}

TEST(ComplexRootsTest, SplitsPairsAndReals) {
  const RealPolynomial p =
      RealPolynomial{1.0, -2.0, 5.0} * RealPolynomial::from_roots({3.0});
  const ComplexRoots roots = complex_roots(p);
  ASSERT_EQ(roots.pairs.size(), 1u);
  ASSERT_EQ(roots.real.size(), 1u);
  EXPECT_NEAR(roots.pairs[0].real(), 1.0, 1e-12);
  EXPECT_NEAR(roots.pairs[0].imag(), 2.0, 1e-12);
  EXPECT_NEAR(roots.real[0], 3.0, 1e-12);
}

TEST(LeastSquaresTest, MatchesOrthogonalDecompositionOracle) {
  Rng rng(32);
  for (int n = 0; n < 20; ++n) {
    Eigen::MatrixXd a(30, 8);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform(-1, 1);
    a.col(7) = a.col(0) + a.col(1);  // rank 7
    Eigen::VectorXd b(30);
    for (int i = 0; i < 30; ++i) b[i] = rng.uniform(-1, 1);
    const LeastSquaresSolution ls = lstsq_min_norm(a, b);
    const Eigen::VectorXd oracle =
        a.completeOrthogonalDecomposition().solve(b);
    EXPECT_EQ(ls.rank, 7);
    EXPECT_LT((ls.x - oracle).norm(), 1e-10);
  }
}

TEST(LeastSquaresTest, ThresholdDropsSmallSingularValues) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-8;
  const Eigen::VectorXd b = Eigen::Vector3d(1.0, 1.0, 0.0);
  EXPECT_EQ(lstsq_min_norm(a, b).rank, 2);
  const LeastSquaresSolution cut = lstsq_min_norm(a, b, 1e-6);
  EXPECT_EQ(cut.rank, 1);
  EXPECT_NEAR(cut.x[1], 0.0, 0.0);
}

}  // namespace
}  // namespace linksynth
