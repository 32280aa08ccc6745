#include "posekit/mesh.hpp"

#include <numbers>
#include <string>

namespace posekit {

void Mesh::validate() const {
  if (vertices.cols() < 1) {
    throw Error(Errc::InvalidParam, "mesh has no vertices");
  }
  if (!vertices.allFinite()) {
    throw Error(Errc::InvalidParam, "mesh has non-finite vertex coordinates");
  }
  if (triangles.size() > 0 &&
      (triangles.minCoeff() < 0 || triangles.maxCoeff() >= vertices.cols())) {
    throw Error(Errc::InvalidParam, "triangle index out of range");
  }
}

std::vector<Posed> discretize_continuous_symmetry(const Eigen::Vector3d &axis,
                                                  const Eigen::Vector3d &offset,
                                                  int steps) {
  if (steps < 1) {
    throw Error(Errc::InvalidParam, "continuous symmetry needs >= 1 step");
  }
  std::vector<Posed> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / steps;
    const Rotationd r = Rotationd::from_axis_angle(axis, angle);
    out.push_back(Posed{r, offset - r * offset});
  }
  return out;
}

Eigen::Matrix3Xd subsample_vertices(const Eigen::Matrix3Xd &vertices,
                                    Eigen::Index max_count) {
  const Eigen::Index n = vertices.cols();
  if (max_count <= 0 || n <= max_count) return vertices;
  const Eigen::Index stride = (n + max_count - 1) / max_count;
  const Eigen::Index kept = (n + stride - 1) / stride;
  Eigen::Matrix3Xd out(3, kept);
  for (Eigen::Index i = 0; i < kept; ++i) out.col(i) = vertices.col(i * stride);
  return out;
}

}  // namespace posekit
