#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <optional>
#include <string>

#include "posekit/error.hpp"

namespace posekit {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// Unit quaternion rotation held in canonical form: normalized, with the
/// first nonzero component of (w, x, y, z) positive. Two Rotations that
/// represent the same element of SO(3) therefore compare equal component-wise.
template <typename Scalar>
class Rotation {
 public:
  using Quaternion = Eigen::Quaternion<Scalar>;

  Rotation() : q_{Quaternion::Identity()} {}

  static Rotation identity() { return Rotation{}; }

  /// Normalizes its input. Throws DegenerateInput for a (near) zero quaternion.
  static Rotation from_quaternion(Scalar w, Scalar x, Scalar y, Scalar z) {
    return Rotation{Quaternion{w, x, y, z}};
  }
  static Rotation from_quaternion(const Quaternion &q) { return Rotation{q}; }

  /// `m` must be orthonormal with det +1; no projection is attempted here.
  static Rotation from_matrix(const Matrix3<Scalar> &m) {
    return Rotation{Quaternion{m}};
  }

  static Rotation from_axis_angle(const Vector3<Scalar> &axis, Scalar angle) {
    const Scalar n = axis.norm();
    if (!(n > Scalar(0))) {
      throw Error(Errc::DegenerateInput, "rotation axis has zero length");
    }
    return Rotation{Quaternion{Eigen::AngleAxis<Scalar>(angle, axis / n)}};
  }

  const Quaternion &quaternion() const { return q_; }
  Scalar w() const { return q_.w(); }
  Scalar x() const { return q_.x(); }
  Scalar y() const { return q_.y(); }
  Scalar z() const { return q_.z(); }

  Matrix3<Scalar> matrix() const { return q_.toRotationMatrix(); }

  Rotation inverse() const { return Rotation{q_.conjugate()}; }

  Vector3<Scalar> operator*(const Vector3<Scalar> &v) const { return q_ * v; }

  /// (a * b) applies b first, then a.
  friend Rotation operator*(const Rotation &a, const Rotation &b) {
    return Rotation{a.q_ * b.q_};
  }

  template <typename Other>
  Rotation<Other> cast() const {
    return Rotation<Other>::from_quaternion(q_.template cast<Other>());
  }

 private:
  explicit Rotation(Quaternion q) : q_{canonical(q)} {}

  static Quaternion canonical(Quaternion q) {
    const Scalar n = q.norm();
    if (!(n > Scalar(1e-12)) || !std::isfinite(n)) {
      throw Error(Errc::DegenerateInput, "quaternion norm is zero or non-finite");
    }
    q.coeffs() /= n;
    const Scalar lead = q.w() != Scalar(0)   ? q.w()
                        : q.x() != Scalar(0) ? q.x()
                        : q.y() != Scalar(0) ? q.y()
                                             : q.z();
    if (lead < Scalar(0)) q.coeffs() = -q.coeffs();
    return q;
  }

  Quaternion q_;
};

/// First two columns of a rotation matrix, not necessarily orthonormal.
template <typename Scalar>
struct Rot6D {
  Vector3<Scalar> a1;
  Vector3<Scalar> a2;
};

/// Rigid transform x -> R x + t. Translations are in millimeters.
template <typename Scalar>
struct Pose {
  Rotation<Scalar> rotation;
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();

  static Pose identity() { return Pose{}; }

  Vector3<Scalar> operator*(const Vector3<Scalar> &x) const {
    return rotation * x + translation;
  }

  /// Applies the transform to every column of a 3xN point matrix.
  Eigen::Matrix<Scalar, 3, Eigen::Dynamic> apply(
      const Eigen::Matrix<Scalar, 3, Eigen::Dynamic> &points) const {
    return (rotation.matrix() * points).colwise() + translation;
  }

  friend Pose operator*(const Pose &a, const Pose &b) {
    return Pose{a.rotation * b.rotation, a.rotation * b.translation + a.translation};
  }

  Pose inverse() const {
    const Rotation<Scalar> inv = rotation.inverse();
    return Pose{inv, -(inv * translation)};
  }
};

using Rotationd = Rotation<double>;
using Rot6Dd = Rot6D<double>;
using Posed = Pose<double>;

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 640;
  int height = 480;

  /// Throws InvalidParam unless focal lengths and image size are positive.
  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
      throw Error(Errc::InvalidParam, "focal lengths must be positive");
    }
    if (width < 1 || height < 1) {
      throw Error(Errc::InvalidParam, "image size must be at least 1x1");
    }
  }

  double mean_focal() const { return std::sqrt(fx * fy); }
};

/// Square detection crop: center (cx, cy) and side `size` in pixels, resized
/// by `resize_ratio` (crop resolution / size) before entering the network.
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double size = 1.0;
  double resize_ratio = 1.0;

  void validate() const {
    if (!(size > 0.0) || !(resize_ratio > 0.0)) {
      throw Error(Errc::InvalidParam, "bbox size and resize ratio must be positive");
    }
  }
};

/// Scale-invariant translation target: in-crop offsets of the projected
/// object center (x, y) and normalized depth z.
struct SiteCoords {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  friend SiteCoords operator+(const SiteCoords &a, const SiteCoords &b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
};

enum class Stage { Classifier, Regressor };

/// Gram-Schmidt on (a1, a2); the third column is b1 x b2.
/// Throws DegenerateInput when a1 or the part of a2 orthogonal to a1 is
/// shorter than 1e-8.
template <typename Scalar>
Rotation<Scalar> rot6d_to_matrix(const Rot6D<Scalar> &r) {
  constexpr Scalar eps = Scalar(1e-8);
  const Scalar n1 = r.a1.norm();
  if (!(n1 >= eps)) {
    throw Error(Errc::DegenerateInput, "first 6D column is (near) zero");
  }
  const Vector3<Scalar> b1 = r.a1 / n1;
  const Vector3<Scalar> ortho = r.a2 - b1.dot(r.a2) * b1;
  const Scalar n2 = ortho.norm();
  if (!(n2 >= eps)) {
    throw Error(Errc::DegenerateInput, "6D columns are (near) parallel");
  }
  const Vector3<Scalar> b2 = ortho / n2;
  Matrix3<Scalar> m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b1.cross(b2);
  return Rotation<Scalar>::from_matrix(m);
}

template <typename Scalar>
Rot6D<Scalar> matrix_to_rot6d(const Rotation<Scalar> &rot) {
  const Matrix3<Scalar> m = rot.matrix();
  return {m.col(0), m.col(1)};
}

/// Angle of r1^-1 r2 in [0, pi]. Equal to 2 acos(|<q1, q2>|), evaluated with
/// atan2 so that tiny angles keep full precision.
template <typename Scalar>
Scalar geodesic_angle(const Rotation<Scalar> &r1, const Rotation<Scalar> &r2) {
  const auto rel = r1.quaternion().conjugate() * r2.quaternion();
  return Scalar(2) * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

template <typename Scalar>
struct ComposedPose {
  Rotation<Scalar> rotation;
  SiteCoords site;
};

/// Combines a coarse classification with a regressed residual: rotation is
/// delta * coarse (delta applied on the left), every SITE coordinate adds.
template <typename Scalar>
ComposedPose<Scalar> compose_pose(const Rotation<Scalar> &delta_rot,
                                  const SiteCoords &delta_site,
                                  const Rotation<Scalar> &coarse_rot,
                                  const SiteCoords &coarse_site) {
  return {delta_rot * coarse_rot, coarse_site + delta_site};
}

SiteCoords site_encode(const Eigen::Vector3d &t, const BBox &bbox,
                       const CameraIntrinsics &cam);

Eigen::Vector3d site_decode(const SiteCoords &s, const BBox &bbox,
                            const CameraIntrinsics &cam);

/// Global crop context appended to the heads. Classifier stage:
/// [(bx-cx)/f, (by-cy)/f, size/f]; regressor stage:
/// [tx/tz, ty/tz, size/f] from the coarse translation. f = sqrt(fx fy).
Eigen::Vector3d perspective_features(
    const BBox &bbox, const CameraIntrinsics &cam, Stage stage,
    const std::optional<Eigen::Vector3d> &coarse_t = std::nullopt);

/// Nearest rotation to `m` in the Frobenius sense (polar factor via SVD).
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d &m);

/// Max-abs deviation of m^T m from identity.
double orthonormality_error(const Eigen::Matrix3d &m);

}  // namespace posekit
