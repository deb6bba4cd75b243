#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "linksynth/dualquat.hpp"

namespace linksynth {

// Rotation entries row-major (A00 A01 A02 A10 ... A22) followed by the
// translation (a0 a1 a2). Every module uses this order.
using Embedding12 = Eigen::Matrix<double, 12, 1>;
using Matrix12 = Eigen::Matrix<double, 12, 12>;

/// Rigid displacement p' = A p + a.
class Pose {
 public:
  Pose() = default;
  // Throws InvalidArgument unless A is a rotation within 1e-9.
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static Pose from_embedding(const Embedding12& e);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

struct PoseError {
  double angle = 0.0;     // radians, in [0, pi]
  double distance = 0.0;  // length units
};

// Default tolerance of the Study-condition check, relative to
// |primal| * |dual| + |primal|^2.
inline constexpr double kStudyTolerance = 1e-6;

/// Kinematic image -> displacement. The rotation is that of the primal
/// quaternion p; the translation is the vector part of 2 d conj(p) / |p|^2.
/// Throws DegeneratePose if |p|^2 is below tau_inv * max(1, |q|)^2 and
/// OffQuadric if the Study residual exceeds tau_study times the scale above.
Pose dq_to_pose(const DualQuaternion& q, double tau_study = kStudyTolerance,
                double tau_inv = 1e-12);

// Inverse of dq_to_pose up to the projective factor (unit primal returned).
DualQuaternion pose_to_dq(const Pose& pose);

Embedding12 pose_to_embedding(const Pose& pose);

/// Embedding of the pose of q without validity checks, together with its
/// derivative with respect to the eight coefficients of q.
struct EmbeddingWithJacobian {
  Embedding12 value;
  Eigen::Matrix<double, 12, 8> jacobian;
};
EmbeddingWithJacobian dq_embedding_jacobian(const DualQuaternion& q);

/// Point set attached to the end effector. Precomputes the 12x12 Gram
/// matrix of the metric <alpha, beta> = sum_i <alpha(fp_i), beta(fp_i)> and
/// its Cholesky factor.
class FeatureCloud {
 public:
  // Throws DegenerateCloud for fewer than 4 points or a flat point set.
  explicit FeatureCloud(std::vector<Eigen::Vector3d> points);

  // {+-u e1, +-u e2, +-u e3}
  static FeatureCloud octahedron(double u = 1.0);

  const std::vector<Eigen::Vector3d>& points() const { return points_; }
  const Eigen::Vector3d& barycenter() const { return barycenter_; }
  const Matrix12& gram() const { return gram_; }
  // Upper-triangular U with G = U^T U; U x are Gram-orthonormal coordinates.
  const Matrix12& orthonormalizer() const { return upper_; }

  double inner(const Embedding12& a, const Embedding12& b) const {
    return a.dot(gram_ * b);
  }

 private:
  std::vector<Eigen::Vector3d> points_;
  Eigen::Vector3d barycenter_;
  Matrix12 gram_;
  Matrix12 upper_;
};

Matrix12 gram_matrix(const FeatureCloud& cloud);

double motion_distance(const Pose& alpha, const Pose& beta,
                       const FeatureCloud& cloud);
double embedding_distance(const Embedding12& alpha, const Embedding12& beta,
                          const FeatureCloud& cloud);

// Relative rotation angle and translation distance.
PoseError pose_error(const Pose& alpha, const Pose& beta);

// Quaternion rotation matrix scaled by |p|^2 (entries quadratic in p).
Eigen::Matrix3d unnormalized_rotation(const Eigen::Vector4d& p);

}  // namespace linksynth
