#include "linksynth/dualquat.hpp"

#include <gtest/gtest.h>

#include "linksynth/error.hpp"
#include "linksynth/kinematics.hpp"
#include "test_support.hpp"

namespace linksynth {
namespace {

using testing::Rng;

void expect_dq_near(const DualQuaternion& a, const DualQuaternion& b,
                    double tol) {
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(a[i], b[i], tol) << "slot " << i;
}

TEST(QuaternionTest, UnitMultiplicationTable) {
  const Eigen::Vector4d one(1, 0, 0, 0), i(0, 1, 0, 0), j(0, 0, 1, 0),
      k(0, 0, 0, 1);
  EXPECT_EQ(quat_mul(i, j), k);
  EXPECT_EQ(quat_mul(j, k), i);
  EXPECT_EQ(quat_mul(k, i), j);
  EXPECT_EQ(quat_mul(j, i), -k);
  EXPECT_EQ(quat_mul(i, i), -one);
  EXPECT_EQ(quat_mul(quat_mul(i, j), k), -one);
}

TEST(QuaternionTest, MatchesEigenQuaternionProduct) {
  Rng rng(11);
  for (int n = 0; n < 50; ++n) {
    const Eigen::Vector4d a(rng.uniform(-1, 1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Eigen::Vector4d b(rng.uniform(-1, 1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Eigen::Quaterniond qa(a[0], a[1], a[2], a[3]);
    const Eigen::Quaterniond qb(b[0], b[1], b[2], b[3]);
    const Eigen::Quaterniond qc = qa * qb;
    const Eigen::Vector4d c = quat_mul(a, b);
    EXPECT_NEAR(c[0], qc.w(), 1e-14);
    EXPECT_NEAR(c[1], qc.x(), 1e-14);
    EXPECT_NEAR(c[2], qc.y(), 1e-14);
    EXPECT_NEAR(c[3], qc.z(), 1e-14);
  }
}

TEST(DualQuaternionTest, EpsilonSquaresToZero) {
  EXPECT_TRUE((DualQuaternion::eps() * DualQuaternion::eps()).is_zero());
  expect_dq_near(DualQuaternion::eps() * DualQuaternion::i(),
                 DualQuaternion(0, 0, 0, 0, 0, 1, 0, 0), 0.0);
}

TEST(DualQuaternionTest, ProductIsAssociativeAndDistributive) {
  Rng rng(12);
  for (int n = 0; n < 100; ++n) {
    const DualQuaternion a = rng.dq(), b = rng.dq(), c = rng.dq();
    expect_dq_near((a * b) * c, a * (b * c), 1e-12);
    expect_dq_near(a * (b + c), a * b + a * c, 1e-12);
    expect_dq_near(dq_mul(a, b), a * b, 0.0);
  }
}

TEST(DualQuaternionTest, ConjugationReversesProducts) {
  Rng rng(13);
  for (int n = 0; n < 100; ++n) {
    const DualQuaternion a = rng.dq(), b = rng.dq();
    expect_dq_near(dq_conj(a * b), dq_conj(b) * dq_conj(a), 1e-12);
  }
}

TEST(DualQuaternionTest, NormIsDualNumberAndMultiplicative) {
  Rng rng(14);
  for (int n = 0; n < 100; ++n) {
    const DualQuaternion a = rng.dq(), b = rng.dq();
    const DualQuaternion full = a * dq_conj(a);
    const DualNumber na = dq_norm(a);
    expect_dq_near(full, DualQuaternion(na.real, 0, 0, 0, na.eps, 0, 0, 0),
                   1e-12);
    EXPECT_NEAR(na.eps, 2.0 * a.study_residual(), 1e-12);
    const DualNumber nb = dq_norm(b);
    const DualNumber nab = dq_norm(a * b);
    EXPECT_NEAR(nab.real, na.real * nb.real, 1e-10);
    EXPECT_NEAR(nab.eps, na.real * nb.eps + na.eps * nb.real, 1e-10);
  }
}

TEST(DualQuaternionTest, InverseIsTwoSided) {
  Rng rng(15);
  for (int n = 0; n < 100; ++n) {
    const DualQuaternion a = rng.dq();
    const DualQuaternion inv = dq_inverse(a);
    expect_dq_near(a * inv, DualQuaternion::scalar(1.0), 1e-10);
    expect_dq_near(inv * a, DualQuaternion::scalar(1.0), 1e-10);
  }
}

TEST(DualQuaternionTest, InverseOfPureDualThrows) {
  try {
    dq_inverse(DualQuaternion(0, 0, 0, 0, 1, 2, 3, 4));
    FAIL() << "expected NotInvertible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotInvertible);
  }
}

TEST(DualQuaternionTest, ProductComposesDisplacements) {
  Rng rng(16);
  for (int n = 0; n < 50; ++n) {
    const Pose a = rng.pose(), b = rng.pose();
    const Pose ab = dq_to_pose(pose_to_dq(a) * pose_to_dq(b));
    const Eigen::Matrix4d expected =
        testing::to_matrix(a) * testing::to_matrix(b);
    EXPECT_TRUE(testing::to_matrix(ab).isApprox(expected, 1e-12));
  }
}

TEST(DualQuaternionTest, ProjectiveDistanceIgnoresScaleAndSign) {
  Rng rng(17);
  const DualQuaternion q = pose_to_dq(rng.pose());
  EXPECT_NEAR(projective_distance(q, -3.5 * q), 0.0, 1e-14);
  EXPECT_GT(projective_distance(q, q + 0.1 * DualQuaternion::eps()), 1e-3);
  const DualQuaternion nq = normalize_by_primal(-2.0 * q);
  EXPECT_NEAR(nq.primal().norm(), 1.0, 1e-15);
}

}  // namespace
}  // namespace linksynth
