#include "posekit/geometry.hpp"

#include <Eigen/SVD>

namespace posekit {

SiteCoords site_encode(const Eigen::Vector3d &t, const BBox &bbox,
                       const CameraIntrinsics &cam) {
  if (!(t.z() > 0.0)) {
    throw Error(Errc::BehindCamera, "translation z must be positive, got " +
                                        std::to_string(t.z()));
  }
  const double u = cam.fx * t.x() / t.z() + cam.cx;
  const double v = cam.fy * t.y() / t.z() + cam.cy;
  return {(u - bbox.cx) / bbox.size, (v - bbox.cy) / bbox.size,
          t.z() / (bbox.resize_ratio * cam.mean_focal())};
}

Eigen::Vector3d site_decode(const SiteCoords &s, const BBox &bbox,
                            const CameraIntrinsics &cam) {
  if (!(s.z > 0.0)) {
    throw Error(Errc::InvalidDepth,
                "normalized depth must be positive, got " + std::to_string(s.z));
  }
  const double tz = s.z * bbox.resize_ratio * cam.mean_focal();
  const double u = s.x * bbox.size + bbox.cx;
  const double v = s.y * bbox.size + bbox.cy;
  return {(u - cam.cx) * tz / cam.fx, (v - cam.cy) * tz / cam.fy, tz};
}

Eigen::Vector3d perspective_features(const BBox &bbox, const CameraIntrinsics &cam,
                                     Stage stage,
                                     const std::optional<Eigen::Vector3d> &coarse_t) {
  const double f = cam.mean_focal();
  if (stage == Stage::Classifier) {
    return {(bbox.cx - cam.cx) / f, (bbox.cy - cam.cy) / f, bbox.size / f};
  }
  if (!coarse_t) {
    throw Error(Errc::MissingCoarse, "regressor stage needs the coarse translation");
  }
  const Eigen::Vector3d &t = *coarse_t;
  if (!(t.z() > 0.0)) {
    throw Error(Errc::BehindCamera, "coarse translation z must be positive");
  }
  return {t.x() / t.z(), t.y() / t.z(), bbox.size / f};
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d &m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

double orthonormality_error(const Eigen::Matrix3d &m) {
  return (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace posekit
