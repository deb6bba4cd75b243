#include "linksynth/dualquat.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "linksynth/error.hpp"

namespace linksynth {

Eigen::Vector4d quat_mul(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

Eigen::Vector4d quat_conj(const Eigen::Vector4d& q) {
  return {q[0], -q[1], -q[2], -q[3]};
}

DualQuaternion DualQuaternion::from_parts(const Eigen::Vector4d& primal,
                                          const Eigen::Vector4d& dual) {
  return {primal[0], primal[1], primal[2], primal[3],
          dual[0],   dual[1],   dual[2],   dual[3]};
}

DualQuaternion DualQuaternion::from_vector(const Vector8& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

DualQuaternion::Vector8 DualQuaternion::vector() const {
  Vector8 v;
  for (int i = 0; i < 8; ++i) v[i] = c_[i];
  return v;
}

double DualQuaternion::primal_norm2() const {
  return c_[0] * c_[0] + c_[1] * c_[1] + c_[2] * c_[2] + c_[3] * c_[3];
}

double DualQuaternion::study_residual() const {
  return c_[0] * c_[4] + c_[1] * c_[5] + c_[2] * c_[6] + c_[3] * c_[7];
}

double DualQuaternion::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

double DualQuaternion::norm() const {
  double s = 0.0;
  for (double v : c_) s += v * v;
  return std::sqrt(s);
}

bool DualQuaternion::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
}

DualQuaternion& DualQuaternion::operator+=(const DualQuaternion& o) {
  for (int i = 0; i < 8; ++i) c_[i] += o.c_[i];
  return *this;
}

DualQuaternion& DualQuaternion::operator-=(const DualQuaternion& o) {
  for (int i = 0; i < 8; ++i) c_[i] -= o.c_[i];
  return *this;
}

DualQuaternion& DualQuaternion::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b) {
  const Eigen::Vector4d ap = a.primal();
  const Eigen::Vector4d bp = b.primal();
  return DualQuaternion::from_parts(
      quat_mul(ap, bp), quat_mul(ap, b.dual()) + quat_mul(a.dual(), bp));
}

DualQuaternion dq_mul(const DualQuaternion& a, const DualQuaternion& b) {
  return a * b;
}

DualQuaternion dq_conj(const DualQuaternion& q) {
  return {q[0], -q[1], -q[2], -q[3], q[4], -q[5], -q[6], -q[7]};
}

DualNumber dq_norm(const DualQuaternion& q) {
  return {q.primal_norm2(), 2.0 * q.study_residual()};
}

DualQuaternion dq_inverse(const DualQuaternion& q, double tol) {
  const double scale = std::max(1.0, q.max_abs());
  const double n2 = q.primal_norm2();
  if (n2 <= tol * scale * scale) {
    throw Error(ErrorCode::kNotInvertible, "primal part vanishes");
  }
  // (p + eps d)^-1 = p^-1 - eps p^-1 d p^-1
  const Eigen::Vector4d pinv = quat_conj(q.primal()) / n2;
  return DualQuaternion::from_parts(pinv,
                                    -quat_mul(quat_mul(pinv, q.dual()), pinv));
}

DualQuaternion normalize_by_primal(const DualQuaternion& q) {
  const double n = std::sqrt(q.primal_norm2());
  if (n == 0.0) {
    throw Error(ErrorCode::kNotInvertible, "cannot normalize a zero primal");
  }
  int big = 0;
  for (int i = 1; i < 4; ++i) {
    if (std::abs(q[i]) > std::abs(q[big])) big = i;
  }
  return q * ((q[big] < 0.0 ? -1.0 : 1.0) / n);
}

double projective_distance(const DualQuaternion& a, const DualQuaternion& b) {
  const DualQuaternion na = a / std::sqrt(a.primal_norm2());
  DualQuaternion nb = b / std::sqrt(b.primal_norm2());
  if (na.primal().dot(nb.primal()) < 0.0) nb = -nb;
  return (na - nb).norm() / std::max(1.0, na.norm());
}

std::ostream& operator<<(std::ostream& os, const DualQuaternion& q) {
  os << "(" << q[0] << ", " << q[1] << ", " << q[2] << ", " << q[3]
     << " | " << q[4] << ", " << q[5] << ", " << q[6] << ", " << q[7] << ")";
  return os;
}

}  // namespace linksynth
