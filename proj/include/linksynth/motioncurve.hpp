#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "linksynth/dualquat.hpp"
#include "linksynth/kinematics.hpp"
#include "linksynth/polynomial.hpp"

namespace linksynth {

inline constexpr double kDirectionTolerance = 1e-8;
inline constexpr int kParamsPerFactor = 7;

/// Rotation about a fixed axis, parametrized by the curve parameter offset
/// h0, the axis direction d and a point p on the axis. The linear factor is
///
///   (t - h0 + d - eps (d x p)) / |d|
///
/// so the moment d x p is never stored and cannot violate the Plücker
/// condition.
struct AxisFactor {
  double h0 = 0.0;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
};

struct FactorDQ {
  DualQuaternion h;  // unnormalized factor is t - h
  double scale;      // |d|
};

// Throws DegenerateDirection when |d| < kDirectionTolerance.
FactorDQ factor_to_dq(const AxisFactor& f);

/// C(t) = (t - h1)/|d1| * ... * (t - hn)/|dn|, leftmost factor first.
/// The shape vector concatenates (h0, d, p) of every factor.
class FactorizedCurve {
 public:
  FactorizedCurve() = default;
  explicit FactorizedCurve(std::vector<AxisFactor> factors);

  static FactorizedCurve from_shape(const Eigen::VectorXd& shape);

  int degree() const { return static_cast<int>(factors_.size()); }
  int num_params() const { return kParamsPerFactor * degree(); }
  const std::vector<AxisFactor>& factors() const { return factors_; }
  const FactorDQ& factor_dq(int k) const { return dq_[k]; }
  Eigen::VectorXd shape() const;

  // Value of the k-th normalized linear factor at t.
  DualQuaternion factor_value(int k, double t) const;

 private:
  std::vector<AxisFactor> factors_;
  std::vector<FactorDQ> dq_;
};

DualQuaternion curve_eval(const FactorizedCurve& c, double t);
DQPolynomial expand(const FactorizedCurve& c);

// Throws DegeneratePose where the primal part of C(t) vanishes.
Embedding12 curve_embedding(const FactorizedCurve& c, double t);
Embedding12 embedding_t_derivative(const FactorizedCurve& c, double t);

// Column l holds the derivative of the embedding at t with respect to
// shape parameter l.
Eigen::Matrix<double, 12, Eigen::Dynamic> shape_jacobian(
    const FactorizedCurve& c, double t);

/// Embedding, its t-derivative and the shape Jacobian from a single pass
/// over the factors.
struct CurvePointDerivatives {
  Embedding12 embedding;
  Embedding12 t_derivative;
  Eigen::Matrix<double, 12, Eigen::Dynamic> shape_jacobian;
};
CurvePointDerivatives curve_point_derivatives(const FactorizedCurve& c,
                                              double t, bool with_shape = true);

}  // namespace linksynth
