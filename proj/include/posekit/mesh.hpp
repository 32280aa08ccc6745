#pragma once

#include <Eigen/Core>

#include <vector>

#include "posekit/geometry.hpp"

namespace posekit {

/// Triangle mesh in millimeters; vertices and triangles are stored as
/// columns.
struct Mesh {
  Eigen::Matrix3Xd vertices;
  Eigen::Matrix3Xi triangles;

  Eigen::Index vertex_count() const { return vertices.cols(); }
  Eigen::Index triangle_count() const { return triangles.cols(); }

  /// Throws InvalidParam on an empty vertex set, NaN coordinates or
  /// out-of-range triangle indices.
  void validate() const;
};

/// Rigid transforms mapping the object onto itself. The first entry is
/// always the identity.
struct SymmetrySet {
  std::vector<Posed> transforms{Posed::identity()};

  std::size_t size() const { return transforms.size(); }
  static SymmetrySet none() { return {}; }
};

/// Rotations about `axis` through `offset` by 2 pi i / steps, i = 0 .. steps-1.
std::vector<Posed> discretize_continuous_symmetry(const Eigen::Vector3d &axis,
                                                  const Eigen::Vector3d &offset,
                                                  int steps);

/// Stride-based deterministic subsample: keeps every ceil(n / max_count)-th
/// vertex when the mesh has more than `max_count` vertices.
Eigen::Matrix3Xd subsample_vertices(const Eigen::Matrix3Xd &vertices,
                                    Eigen::Index max_count);

}  // namespace posekit
