#pragma once

#include <array>
#include <iosfwd>

#include <Eigen/Core>

namespace linksynth {

// Plain quaternion helpers on (w, x, y, z) 4-vectors.
Eigen::Vector4d quat_mul(const Eigen::Vector4d& a, const Eigen::Vector4d& b);
Eigen::Vector4d quat_conj(const Eigen::Vector4d& q);

struct DualNumber {
  double real = 0.0;
  double eps = 0.0;
};

/// Element x0 + x1 i + x2 j + x3 k + eps (y0 + y1 i + y2 j + y3 k) of the
/// dual quaternions. Coefficients are homogeneous; nothing is normalized on
/// construction and the Study condition is only checked on demand.
class DualQuaternion {
 public:
  using Vector8 = Eigen::Matrix<double, 8, 1>;

  constexpr DualQuaternion() = default;
  constexpr DualQuaternion(double x0, double x1, double x2, double x3,
                           double y0, double y1, double y2, double y3)
      : c_{x0, x1, x2, x3, y0, y1, y2, y3} {}

  static DualQuaternion from_parts(const Eigen::Vector4d& primal,
                                   const Eigen::Vector4d& dual);
  static DualQuaternion from_vector(const Vector8& v);
  static constexpr DualQuaternion scalar(double r) {
    return {r, 0, 0, 0, 0, 0, 0, 0};
  }
  static constexpr DualQuaternion i() { return {0, 1, 0, 0, 0, 0, 0, 0}; }
  static constexpr DualQuaternion j() { return {0, 0, 1, 0, 0, 0, 0, 0}; }
  static constexpr DualQuaternion k() { return {0, 0, 0, 1, 0, 0, 0, 0}; }
  static constexpr DualQuaternion eps() { return {0, 0, 0, 0, 1, 0, 0, 0}; }

  // Index 0..3 primal (x0..x3), 4..7 dual (y0..y3).
  double operator[](int idx) const { return c_[idx]; }
  double& operator[](int idx) { return c_[idx]; }

  Eigen::Vector4d primal() const { return {c_[0], c_[1], c_[2], c_[3]}; }
  Eigen::Vector4d dual() const { return {c_[4], c_[5], c_[6], c_[7]}; }
  Eigen::Vector3d primal_vec() const { return {c_[1], c_[2], c_[3]}; }
  Eigen::Vector3d dual_vec() const { return {c_[5], c_[6], c_[7]}; }
  Vector8 vector() const;

  double primal_norm2() const;
  // x0 y0 + x1 y1 + x2 y2 + x3 y3; zero exactly on Study's quadric.
  double study_residual() const;
  double max_abs() const;
  double norm() const;
  bool is_zero() const;

  DualQuaternion& operator+=(const DualQuaternion& o);
  DualQuaternion& operator-=(const DualQuaternion& o);
  DualQuaternion& operator*=(double s);

  friend DualQuaternion operator+(DualQuaternion a, const DualQuaternion& b) {
    return a += b;
  }
  friend DualQuaternion operator-(DualQuaternion a, const DualQuaternion& b) {
    return a -= b;
  }
  friend DualQuaternion operator-(DualQuaternion a) { return a *= -1.0; }
  friend DualQuaternion operator*(DualQuaternion a, double s) { return a *= s; }
  friend DualQuaternion operator*(double s, DualQuaternion a) { return a *= s; }
  friend DualQuaternion operator/(DualQuaternion a, double s) {
    return a *= 1.0 / s;
  }
  friend DualQuaternion operator*(const DualQuaternion& a,
                                  const DualQuaternion& b);
  friend bool operator==(const DualQuaternion&,
                         const DualQuaternion&) = default;

 private:
  std::array<double, 8> c_{};
};

DualQuaternion dq_mul(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion dq_conj(const DualQuaternion& q);
// q * conj(q) as a dual number: (|primal|^2, 2 <primal, dual>).
DualNumber dq_norm(const DualQuaternion& q);

// Throws NotInvertible when |primal|^2 <= tol * max(1, max_abs(q))^2.
DualQuaternion dq_inverse(const DualQuaternion& q, double tol = 1e-12);

// Representative of the projective class of q with unit primal part and the
// sign chosen so that the largest-magnitude primal component is positive.
DualQuaternion normalize_by_primal(const DualQuaternion& q);

// Distance between the projective classes of a and b: both are normalized
// by their primal norm, signs are aligned, and the difference norm is
// divided by max(1, |a|).
double projective_distance(const DualQuaternion& a, const DualQuaternion& b);

std::ostream& operator<<(std::ostream& os, const DualQuaternion& q);

}  // namespace linksynth
