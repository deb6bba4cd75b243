#include "linksynth/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "linksynth/error.hpp"

namespace linksynth {

namespace {

// Derivatives of unnormalized_rotation with respect to w, x, y, z.
std::array<Eigen::Matrix3d, 4> rotation_partials(const Eigen::Vector4d& p) {
  const double w = p[0], x = p[1], y = p[2], z = p[3];
  std::array<Eigen::Matrix3d, 4> d;
  d[0] << w, -z, y, z, w, -x, -y, x, w;
  d[1] << x, y, z, y, -x, -w, z, w, -x;
  d[2] << -y, x, w, x, y, z, -w, z, -y;
  d[3] << -z, -w, x, w, -z, y, x, y, z;
  for (auto& m : d) m *= 2.0;
  return d;
}

Eigen::Vector4d basis4(int k) {
  Eigen::Vector4d e = Eigen::Vector4d::Zero();
  e[k] = 1.0;
  return e;
}

}  // namespace

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  const double orth =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  const double det = rotation.determinant();
  if (!(orth <= 1e-9) || !(std::abs(det - 1.0) <= 1e-9)) {
    std::ostringstream msg;
    msg << "not a rotation (orthogonality error " << orth << ", det " << det
        << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

Pose Pose::from_embedding(const Embedding12& e) {
  Eigen::Matrix3d a;
  a << e[0], e[1], e[2], e[3], e[4], e[5], e[6], e[7], e[8];
  return Pose(a, e.tail<3>());
}

Eigen::Matrix3d unnormalized_rotation(const Eigen::Vector4d& p) {
  const double w = p[0], x = p[1], y = p[2], z = p[3];
  Eigen::Matrix3d r;
  r << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
  return r;
}

Pose dq_to_pose(const DualQuaternion& q, double tau_study, double tau_inv) {
  const double n2 = q.primal_norm2();
  const double scale = std::max(1.0, q.max_abs());
  if (!(n2 > tau_inv * scale * scale)) {
    throw Error(ErrorCode::kDegeneratePose, "primal part vanishes");
  }
  const double pn = std::sqrt(n2);
  const double dn = q.dual().norm();
  if (std::abs(q.study_residual()) > tau_study * (pn * dn + n2)) {
    std::ostringstream msg;
    msg << "Study residual " << q.study_residual() << " exceeds tolerance";
    throw Error(ErrorCode::kOffQuadric, msg.str());
  }
  const Eigen::Vector4d p = q.primal();
  const Eigen::Vector4d t = 2.0 * quat_mul(q.dual(), quat_conj(p)) / n2;
  return Pose(unnormalized_rotation(p) / n2, t.tail<3>());
}

DualQuaternion pose_to_dq(const Pose& pose) {
  const Eigen::Quaterniond rq(pose.rotation());
  const Eigen::Vector4d p(rq.w(), rq.x(), rq.y(), rq.z());
  const Eigen::Vector4d t(0.0, pose.translation()[0], pose.translation()[1],
                          pose.translation()[2]);
  return DualQuaternion::from_parts(p, 0.5 * quat_mul(t, p));
}

Embedding12 pose_to_embedding(const Pose& pose) {
  Embedding12 e;
  const auto& a = pose.rotation();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) e[3 * r + c] = a(r, c);
  }
  e.tail<3>() = pose.translation();
  return e;
}

EmbeddingWithJacobian dq_embedding_jacobian(const DualQuaternion& q) {
  const Eigen::Vector4d p = q.primal();
  const Eigen::Vector4d d = q.dual();
  const double n2 = p.squaredNorm();
  const Eigen::Vector4d pc = quat_conj(p);
  const Eigen::Matrix3d r = unnormalized_rotation(p);
  const Eigen::Vector3d a = (2.0 * quat_mul(d, pc) / n2).tail<3>();

  EmbeddingWithJacobian out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.value[3 * i + j] = r(i, j) / n2;
  }
  out.value.tail<3>() = a;

  out.jacobian.setZero();
  const auto dr = rotation_partials(p);
  for (int k = 0; k < 4; ++k) {
    const Eigen::Matrix3d da = dr[k] / n2 - r * (2.0 * p[k] / (n2 * n2));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out.jacobian(3 * i + j, k) = da(i, j);
    }
    const Eigen::Vector4d ek = basis4(k);
    out.jacobian.block<3, 1>(9, k) =
        (2.0 * quat_mul(d, quat_conj(ek)) / n2).tail<3>() - a * (2.0 * p[k] / n2);
    out.jacobian.block<3, 1>(9, 4 + k) = (2.0 * quat_mul(ek, pc) / n2).tail<3>();
  }
  return out;
}

FeatureCloud::FeatureCloud(std::vector<Eigen::Vector3d> points)
    : points_(std::move(points)) {
  const auto n = static_cast<double>(points_.size());
  if (points_.size() < 4) {
    throw Error(ErrorCode::kDegenerateCloud, "need at least 4 feature points");
  }
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
  for (const auto& fp : points_) {
    sum += fp;
    second += fp * fp.transpose();
  }
  barycenter_ = sum / n;

  gram_.setZero();
  for (int r = 0; r < 3; ++r) {
    gram_.block<3, 3>(3 * r, 3 * r) = second;
    gram_.block<3, 1>(3 * r, 9 + r) = sum;
    gram_.block<1, 3>(9 + r, 3 * r) = sum.transpose();
    gram_(9 + r, 9 + r) = n;
  }

  // Positive definite iff the points affinely span space.
  Eigen::SelfAdjointEigenSolver<Matrix12> es(gram_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-10 * hi)) {
    throw Error(ErrorCode::kDegenerateCloud,
                "feature points do not affinely span 3-space");
  }
  Eigen::LLT<Matrix12> llt(gram_);
  upper_ = llt.matrixU();
}

FeatureCloud FeatureCloud::octahedron(double u) {
  std::vector<Eigen::Vector3d> pts;
  for (int axis = 0; axis < 3; ++axis) {
    for (double s : {1.0, -1.0}) {
      Eigen::Vector3d v = Eigen::Vector3d::Zero();
      v[axis] = s * u;
      pts.push_back(v);
    }
  }
  return FeatureCloud(std::move(pts));
}

Matrix12 gram_matrix(const FeatureCloud& cloud) { return cloud.gram(); }

double embedding_distance(const Embedding12& alpha, const Embedding12& beta,
                          const FeatureCloud& cloud) {
  const Embedding12 diff = alpha - beta;
  return std::sqrt(std::max(0.0, cloud.inner(diff, diff)));
}

double motion_distance(const Pose& alpha, const Pose& beta,
                       const FeatureCloud& cloud) {
  return embedding_distance(pose_to_embedding(alpha), pose_to_embedding(beta),
                            cloud);
}

PoseError pose_error(const Pose& alpha, const Pose& beta) {
  const Eigen::Matrix3d rel = beta.rotation() * alpha.rotation().transpose();
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return {std::acos(c), (alpha.translation() - beta.translation()).norm()};
}

}  // namespace linksynth
