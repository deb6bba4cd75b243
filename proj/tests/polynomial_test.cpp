#include "linksynth/polynomial.hpp"

#include <gtest/gtest.h>

#include "linksynth/error.hpp"
#include "test_support.hpp"

namespace linksynth {
namespace {

using testing::Rng;

RealPolynomial random_poly(Rng& rng, int degree) {
  std::vector<double> c(degree + 1);
  for (double& x : c) x = rng.uniform(-3.0, 3.0);
  return RealPolynomial(c);
}

DQPolynomial random_dqpoly(Rng& rng, int degree) {
  std::vector<DualQuaternion> c(degree + 1);
  for (auto& x : c) x = rng.dq();
  return DQPolynomial(c);
}

double dq_diff(const DualQuaternion& a, const DualQuaternion& b) {
  return (a - b).max_abs();
}

TEST(RealPolynomialTest, HighestDegreeFirst) {
  const RealPolynomial p{2.0, -3.0, 1.0};  // 2t^2 - 3t + 1
  EXPECT_EQ(p.degree(), 2);
  EXPECT_DOUBLE_EQ(p(2.0), 3.0);
  EXPECT_DOUBLE_EQ(p.leading(), 2.0);
}

TEST(RealPolynomialTest, LeadingZerosDropped) {
  const RealPolynomial p{0.0, 0.0, 1.0, 2.0};
  EXPECT_EQ(p.degree(), 1);
  EXPECT_TRUE(RealPolynomial({0.0, 0.0}).is_zero());
}

TEST(RealPolynomialTest, FromRootsVanishesAtRoots) {
  const RealPolynomial p = RealPolynomial::from_roots({-1.0, 0.5, 4.0});
  EXPECT_EQ(p.degree(), 3);
  EXPECT_DOUBLE_EQ(p.leading(), 1.0);
  for (double r : {-1.0, 0.5, 4.0}) EXPECT_NEAR(p(r), 0.0, 1e-14);
}

TEST(RealPolynomialTest, ArithmeticAgreesWithEvaluation) {
  Rng rng(21);
  for (int n = 0; n < 50; ++n) {
    const RealPolynomial a = random_poly(rng, 4), b = random_poly(rng, 3);
    const double t = rng.uniform(-2.0, 2.0);
    EXPECT_NEAR((a * b)(t), a(t) * b(t), 1e-10);
    EXPECT_NEAR((a + b)(t), a(t) + b(t), 1e-12);
    EXPECT_NEAR((a - b)(t), a(t) - b(t), 1e-12);
    EXPECT_NEAR(a.shifted(0.7)(t), a(t + 0.7), 1e-10);
    const double h = 1e-6;
    EXPECT_NEAR(a.derivative()(t), (a(t + h) - a(t - h)) / (2 * h), 1e-6);
  }
}

TEST(RealPolynomialTest, DivisionIdentity) {
  Rng rng(22);
  for (int n = 0; n < 50; ++n) {
    const RealPolynomial a = random_poly(rng, 6), m = random_poly(rng, 2);
    const auto div = a.divide(m);
    EXPECT_LT(div.remainder.degree(), 2);
    const double t = rng.uniform(-2.0, 2.0);
    EXPECT_NEAR((div.quotient * m + div.remainder)(t), a(t), 1e-9);
  }
}

TEST(DQPolynomialTest, LinearIsTMinusH) {
  const DualQuaternion h(1, 2, 3, 4, 5, 6, 7, 8);
  const DQPolynomial p = DQPolynomial::linear(h);
  EXPECT_EQ(p.degree(), 1);
  EXPECT_LT(dq_diff(p(2.0), DualQuaternion::scalar(2.0) - h), 1e-15);
}

TEST(DQPolynomialTest, ProductAgreesWithEvaluation) {
  Rng rng(23);
  for (int n = 0; n < 50; ++n) {
    const DQPolynomial a = random_dqpoly(rng, 3), b = random_dqpoly(rng, 2);
    const double t = rng.uniform(-2.0, 2.0);
    EXPECT_LT(dq_diff((a * b)(t), a(t) * b(t)), 1e-10);
    EXPECT_LT(dq_diff(dqpoly_mul(a, b)(t), a(t) * b(t)), 1e-10);
    EXPECT_LT(dq_diff(a.conj()(t), dq_conj(a(t))), 1e-12);
    EXPECT_LE(dq_diff(dqpoly_eval(a, t), a(t)), 1e-14);
  }
}

TEST(DQPolynomialTest, ComponentSlots) {
  Rng rng(24);
  const DQPolynomial a = random_dqpoly(rng, 3);
  for (int slot = 0; slot < 8; ++slot) {
    EXPECT_NEAR(a.component(slot)(0.3), a(0.3)[slot], 1e-14);
  }
}

TEST(DQPolynomialTest, RealDivisionIdentity) {
  Rng rng(25);
  for (int n = 0; n < 30; ++n) {
    const DQPolynomial p = random_dqpoly(rng, 6);
    const RealPolynomial m{1.0, rng.uniform(-3, 3), rng.uniform(1, 5)};
    const DQRealDivision div = dqpoly_div_real(p, m);
    EXPECT_LE(div.remainder.degree(), 1);
    const double t = rng.uniform(-2.0, 2.0);
    const DualQuaternion rebuilt =
        div.quotient(t) * m(t) + div.remainder(t);
    EXPECT_LT(dq_diff(rebuilt, p(t)), 1e-9);
  }
}

TEST(DQPolynomialTest, LinearDivisionRemainderIsRightEvaluation) {
  Rng rng(26);
  for (int n = 0; n < 30; ++n) {
    const DQPolynomial p = random_dqpoly(rng, 4);
    const DualQuaternion h = rng.dq();
    const DQLinearDivision div = dqpoly_div_linear(p, h);
    EXPECT_LT(dq_diff(div.remainder, p.eval_right(h)), 1e-10);
    const double t = rng.uniform(-2.0, 2.0);
    const DualQuaternion rebuilt =
        div.quotient(t) * (DualQuaternion::scalar(t) - h) + div.remainder;
    EXPECT_LT(dq_diff(rebuilt, p(t)), 1e-9);
  }
}

TEST(DQPolynomialTest, RightFactorGivesZeroRightEvaluation) {
  Rng rng(27);
  const DQPolynomial q = random_dqpoly(rng, 2);
  const DualQuaternion h = rng.dq();
  const DQPolynomial p = q * DQPolynomial::linear(h);
  EXPECT_LT(p.eval_right(h).max_abs(), 1e-11);
}

TEST(DQPolynomialTest, NormOfAxisProductIsReal) {
  Rng rng(28);
  for (int n = 0; n < 20; ++n) {
    const FactorizedCurve c = rng.curve(3);
    const DQPolynomial p = expand(c);
    EXPECT_LT(dqpoly_norm_residual(p), 1e-13);
    const RealPolynomial norm = dqpoly_norm(p);
    EXPECT_EQ(norm.degree(), 6);
    const double t = rng.uniform(-2.0, 2.0);
    EXPECT_NEAR(norm(t), dq_norm(p(t)).real, 1e-9 * norm.max_abs_coeff());
  }
}

TEST(DQPolynomialTest, NonRealNormThrows) {
  const DQPolynomial p{DualQuaternion(1, 0, 0, 0, 1, 0, 0, 0)};
  try {
    dqpoly_norm(p);
    FAIL() << "expected NotRealNorm";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotRealNorm);
  }
}

}  // namespace
}  // namespace linksynth
