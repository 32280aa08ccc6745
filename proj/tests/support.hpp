#pragma once

// Fixtures shared by the unit and acceptance suites.

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "posekit/geometry.hpp"
#include "posekit/mesh.hpp"

namespace posekit::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng &rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Uniform rotation via the subgroup algorithm (Shoemake).
inline Rotationd random_rotation(Rng &rng) {
  const double u1 = uniform(rng), u2 = uniform(rng), u3 = uniform(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double t1 = 2.0 * std::numbers::pi * u2, t2 = 2.0 * std::numbers::pi * u3;
  return Rotationd::from_quaternion(a * std::sin(t1), a * std::cos(t1), b * std::sin(t2),
                                    b * std::cos(t2));
}

inline Eigen::Vector3d random_vector(Rng &rng, double lo, double hi) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

/// Pose in front of a camera, object center near the optical axis.
inline Posed random_pose(Rng &rng, double z_lo = 600.0, double z_hi = 1200.0) {
  return {random_rotation(rng),
          {uniform(rng, -60.0, 60.0), uniform(rng, -60.0, 60.0), uniform(rng, z_lo, z_hi)}};
}

inline Mesh make_mesh(std::initializer_list<Eigen::Vector3d> vs,
                      std::initializer_list<Eigen::Vector3i> ts) {
  Mesh m;
  m.vertices.resize(3, static_cast<Eigen::Index>(vs.size()));
  Eigen::Index i = 0;
  for (const auto &v : vs) m.vertices.col(i++) = v;
  m.triangles.resize(3, static_cast<Eigen::Index>(ts.size()));
  i = 0;
  for (const auto &t : ts) m.triangles.col(i++) = t;
  return m;
}

/// Axis-aligned cube [0, side]^3, 8 vertices, 12 triangles.
inline Mesh make_cube(double side = 1.0) {
  Mesh m;
  m.vertices.resize(3, 8);
  for (int i = 0; i < 8; ++i) {
    m.vertices.col(i) = Eigen::Vector3d((i & 1) * side, ((i >> 1) & 1) * side, ((i >> 2) & 1) * side);
  }
  const int faces[12][3] = {{0, 1, 3}, {0, 3, 2}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                            {2, 3, 7}, {2, 7, 6}, {0, 2, 6}, {0, 6, 4}, {1, 3, 7}, {1, 7, 5}};
  m.triangles.resize(3, 12);
  for (int t = 0; t < 12; ++t) m.triangles.col(t) = Eigen::Vector3i(faces[t][0], faces[t][1], faces[t][2]);
  return m;
}

/// Irregular tetrahedron without rotational symmetries.
inline Mesh make_tetrahedron() {
  return make_mesh({{0, 0, 0}, {40, 0, 0}, {5, 25, 0}, {8, 6, 55}},
                   {{0, 1, 2}, {0, 1, 3}, {1, 2, 3}, {0, 2, 3}});
}

/// Closed cylinder about z, `segments` vertices per rim, centered at origin.
inline Mesh make_cylinder(double radius, double height, int segments = 36) {
  Mesh m;
  m.vertices.resize(3, 2 * segments + 2);
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    m.vertices.col(i) = Eigen::Vector3d(radius * std::cos(a), radius * std::sin(a), -height / 2);
    m.vertices.col(segments + i) =
        Eigen::Vector3d(radius * std::cos(a), radius * std::sin(a), height / 2);
  }
  m.vertices.col(2 * segments) = Eigen::Vector3d(0, 0, -height / 2);
  m.vertices.col(2 * segments + 1) = Eigen::Vector3d(0, 0, height / 2);
  m.triangles.resize(3, 4 * segments);
  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    m.triangles.col(4 * i) = Eigen::Vector3i(i, j, segments + i);
    m.triangles.col(4 * i + 1) = Eigen::Vector3i(j, segments + j, segments + i);
    m.triangles.col(4 * i + 2) = Eigen::Vector3i(2 * segments, j, i);
    m.triangles.col(4 * i + 3) = Eigen::Vector3i(2 * segments + 1, segments + i, segments + j);
  }
  return m;
}

/// Rotations about z by 2 pi i / steps, identity first.
inline SymmetrySet z_symmetries(int steps) {
  SymmetrySet s;
  for (const Posed &p :
       discretize_continuous_symmetry(Eigen::Vector3d::UnitZ(), Eigen::Vector3d::Zero(), steps)) {
    s.transforms.push_back(p);
  }
  return s;
}

/// Fronto-parallel square [x0, x1] x [y0, y1] at depth z (two triangles).
inline Mesh make_square(double x0, double y0, double x1, double y1, double z) {
  return make_mesh({{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}}, {{0, 1, 2}, {0, 2, 3}});
}

/// Concatenates two meshes.
inline Mesh merge(const Mesh &a, const Mesh &b) {
  Mesh m;
  m.vertices.resize(3, a.vertices.cols() + b.vertices.cols());
  m.vertices << a.vertices, b.vertices;
  m.triangles.resize(3, a.triangles.cols() + b.triangles.cols());
  m.triangles << a.triangles, (b.triangles.array() + static_cast<int>(a.vertices.cols())).matrix();
  return m;
}

/// Latitude-longitude sphere; 2 * slices * (stacks - 1) triangles.
inline Mesh make_sphere(double radius, int stacks = 16, int slices = 24) {
  Mesh m;
  const int rings = stacks - 1;
  m.vertices.resize(3, rings * slices + 2);
  for (int r = 0; r < rings; ++r) {
    const double theta = std::numbers::pi * (r + 1) / stacks;
    for (int s = 0; s < slices; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / slices;
      m.vertices.col(r * slices + s) = radius * Eigen::Vector3d(std::sin(theta) * std::cos(phi),
                                                                std::sin(theta) * std::sin(phi),
                                                                std::cos(theta));
    }
  }
  const int north = rings * slices, south = north + 1;
  m.vertices.col(north) = Eigen::Vector3d(0, 0, radius);
  m.vertices.col(south) = Eigen::Vector3d(0, 0, -radius);
  std::vector<Eigen::Vector3i> tris;
  for (int s = 0; s < slices; ++s) {
    const int t = (s + 1) % slices;
    tris.emplace_back(north, s, t);
    tris.emplace_back(south, (rings - 1) * slices + t, (rings - 1) * slices + s);
    for (int r = 0; r + 1 < rings; ++r) {
      tris.emplace_back(r * slices + s, (r + 1) * slices + s, (r + 1) * slices + t);
      tris.emplace_back(r * slices + s, (r + 1) * slices + t, r * slices + t);
    }
  }
  m.triangles.resize(3, static_cast<Eigen::Index>(tris.size()));
  for (std::size_t i = 0; i < tris.size(); ++i) m.triangles.col(static_cast<Eigen::Index>(i)) = tris[i];
  return m;
}

/// Vertex-only cloud, uniform in [-scale, scale]^3.
inline Mesh random_cloud(Rng &rng, int n, double scale = 50.0) {
  Mesh m;
  m.vertices.resize(3, n);
  for (int i = 0; i < n; ++i) m.vertices.col(i) = random_vector(rng, -scale, scale);
  m.triangles.resize(3, 0);
  return m;
}

inline CameraIntrinsics test_camera() {
  CameraIntrinsics cam;
  cam.fx = 572.4;
  cam.fy = 573.6;
  cam.cx = 325.3;
  cam.cy = 242.0;
  cam.width = 640;
  cam.height = 480;
  return cam;
}

inline void write_ascii_ply(const std::filesystem::path &path, const Mesh &m) {
  std::ofstream out(path);
  out << "ply\nformat ascii 1.0\nelement vertex " << m.vertices.cols()
      << "\nproperty double x\nproperty double y\nproperty double z\nelement face " << m.triangles.cols()
      << "\nproperty list uchar int vertex_indices\nend_header\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < m.vertices.cols(); ++i) {
    out << m.vertices(0, i) << ' ' << m.vertices(1, i) << ' ' << m.vertices(2, i) << '\n';
  }
  for (Eigen::Index t = 0; t < m.triangles.cols(); ++t) {
    out << "3 " << m.triangles(0, t) << ' ' << m.triangles(1, t) << ' ' << m.triangles(2, t) << '\n';
  }
}

}  // namespace posekit::testing
