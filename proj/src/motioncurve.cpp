#include "linksynth/motioncurve.hpp"

#include <array>
#include <sstream>

#include "linksynth/error.hpp"

namespace linksynth {

namespace {

DualQuaternion pure_dual(const Eigen::Vector3d& v) {
  return {0, 0, 0, 0, 0, v[0], v[1], v[2]};
}

DualQuaternion pure_primal(const Eigen::Vector3d& v) {
  return {0, v[0], v[1], v[2], 0, 0, 0, 0};
}

}  // namespace

FactorDQ factor_to_dq(const AxisFactor& f) {
  const double s = f.direction.norm();
  if (!(s >= kDirectionTolerance)) {
    std::ostringstream msg;
    msg << "axis direction norm " << s << " below tolerance";
    throw Error(ErrorCode::kDegenerateDirection, msg.str());
  }
  const Eigen::Vector3d& d = f.direction;
  const Eigen::Vector3d m = d.cross(f.point);
  // t - h = (t - h0) + d - eps (d x p)
  const DualQuaternion h(f.h0, -d[0], -d[1], -d[2], 0.0, m[0], m[1], m[2]);
  return {h, s};
}

FactorizedCurve::FactorizedCurve(std::vector<AxisFactor> factors)
    : factors_(std::move(factors)) {
  dq_.reserve(factors_.size());
  for (const auto& f : factors_) dq_.push_back(factor_to_dq(f));
}

FactorizedCurve FactorizedCurve::from_shape(const Eigen::VectorXd& shape) {
  if (shape.size() % kParamsPerFactor != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "shape vector length must be a multiple of 7");
  }
  std::vector<AxisFactor> fs(shape.size() / kParamsPerFactor);
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const auto seg = shape.segment<kParamsPerFactor>(kParamsPerFactor * k);
    fs[k].h0 = seg[0];
    fs[k].direction = seg.segment<3>(1);
    fs[k].point = seg.segment<3>(4);
  }
  return FactorizedCurve(std::move(fs));
}

Eigen::VectorXd FactorizedCurve::shape() const {
  Eigen::VectorXd sp(num_params());
  for (int k = 0; k < degree(); ++k) {
    const auto& f = factors_[k];
    sp[kParamsPerFactor * k] = f.h0;
    sp.segment<3>(kParamsPerFactor * k + 1) = f.direction;
    sp.segment<3>(kParamsPerFactor * k + 4) = f.point;
  }
  return sp;
}

DualQuaternion FactorizedCurve::factor_value(int k, double t) const {
  const FactorDQ& f = dq_[k];
  return (DualQuaternion::scalar(t) - f.h) / f.scale;
}

DualQuaternion curve_eval(const FactorizedCurve& c, double t) {
  DualQuaternion q = DualQuaternion::scalar(1.0);
  for (int k = 0; k < c.degree(); ++k) q = q * c.factor_value(k, t);
  return q;
}

DQPolynomial expand(const FactorizedCurve& c) {
  DQPolynomial p = DQPolynomial::constant(DualQuaternion::scalar(1.0));
  for (int k = 0; k < c.degree(); ++k) {
    const FactorDQ& f = c.factor_dq(k);
    p = p * (DQPolynomial::linear(f.h) * (1.0 / f.scale));
  }
  return p;
}

CurvePointDerivatives curve_point_derivatives(const FactorizedCurve& c,
                                              double t, bool with_shape) {
  const int n = c.degree();
  std::vector<DualQuaternion> values(n);
  for (int k = 0; k < n; ++k) values[k] = c.factor_value(k, t);

  // prefix[k] = F_0 ... F_{k-1}, suffix[k] = F_{k+1} ... F_{n-1}
  std::vector<DualQuaternion> prefix(n + 1, DualQuaternion::scalar(1.0));
  std::vector<DualQuaternion> suffix(n + 1, DualQuaternion::scalar(1.0));
  for (int k = 0; k < n; ++k) prefix[k + 1] = prefix[k] * values[k];
  for (int k = n - 1; k >= 0; --k) suffix[k] = values[k] * suffix[k + 1];
  const DualQuaternion q = prefix[n];

  dq_to_pose(q);  // throws at poles and off the quadric
  const EmbeddingWithJacobian ej = dq_embedding_jacobian(q);

  CurvePointDerivatives out;
  out.embedding = ej.value;

  DualQuaternion dq_dt;
  for (int k = 0; k < n; ++k) {
    dq_dt += prefix[k] * suffix[k + 1] / c.factor_dq(k).scale;
  }
  out.t_derivative = ej.jacobian * dq_dt.vector();

  if (!with_shape) return out;
  out.shape_jacobian.resize(12, c.num_params());
  for (int k = 0; k < n; ++k) {
    const AxisFactor& f = c.factors()[k];
    const double s = c.factor_dq(k).scale;
    const Eigen::Vector3d& d = f.direction;
    const Eigen::Vector3d& p = f.point;
    std::array<DualQuaternion, kParamsPerFactor> partial;
    partial[0] = DualQuaternion::scalar(-1.0 / s);
    for (int j = 0; j < 3; ++j) {
      const Eigen::Vector3d e = Eigen::Vector3d::Unit(j);
      partial[1 + j] = (pure_primal(e) - pure_dual(e.cross(p))) / s -
                       values[k] * (d[j] / (s * s));
      partial[4 + j] = -pure_dual(d.cross(e)) / s;
    }
    for (int l = 0; l < kParamsPerFactor; ++l) {
      const DualQuaternion dq = prefix[k] * partial[l] * suffix[k + 1];
      out.shape_jacobian.col(kParamsPerFactor * k + l) = ej.jacobian * dq.vector();
    }
  }
  return out;
}

Embedding12 curve_embedding(const FactorizedCurve& c, double t) {
  return pose_to_embedding(dq_to_pose(curve_eval(c, t)));
}

Embedding12 embedding_t_derivative(const FactorizedCurve& c, double t) {
  return curve_point_derivatives(c, t, false).t_derivative;
}

Eigen::Matrix<double, 12, Eigen::Dynamic> shape_jacobian(
    const FactorizedCurve& c, double t) {
  return curve_point_derivatives(c, t, true).shape_jacobian;
}

}  // namespace linksynth
