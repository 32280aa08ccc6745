#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "posekit/geometry.hpp"
#include "posekit/mesh.hpp"

namespace posekit {

/// Vertices closer than this (mm) are clipped.
inline constexpr double kZNear = 10.0;

/// H x W depth in millimeters, 0 where no surface was hit.
using DepthMap = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// H x W visibility, true where depth > 0.
using MaskMap = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ProjectedVertex {
  double u = 0.0;
  double v = 0.0;
  double z = 0.0;
  bool clipped = false;
};

/// Pinhole projection of the posed vertices: u = fx X / Z + cx,
/// v = fy Y / Z + cy. Vertices with Z <= z_near are flagged, their u, v are
/// left at 0.
std::vector<ProjectedVertex> project_vertices(const Mesh &mesh, const Posed &pose,
                                              const CameraIntrinsics &cam,
                                              double z_near = kZNear);

struct RenderResult {
  DepthMap depth;
  MaskMap mask;
};

/// Z-buffer rasterization sampled at pixel centers (x + 0.5, y + 0.5) with a
/// top-left fill rule. Depth is interpolated perspective-correctly (1/Z is
/// affine in screen space). Triangles touching a clipped vertex are dropped;
/// no culling, shading or antialiasing. Triangles are visited in index order
/// and the first one wins a depth tie.
RenderResult rasterize(const Mesh &mesh, const Posed &pose, const CameraIntrinsics &cam,
                       int width, int height);
inline RenderResult rasterize(const Mesh &mesh, const Posed &pose,
                              const CameraIntrinsics &cam) {
  return rasterize(mesh, pose, cam, cam.width, cam.height);
}

/// 16-bit grayscale PNG, one unit = `mm_per_unit` millimeters (0.1 by
/// default), saturating at 65535.
void write_depth_png(const std::filesystem::path &path, const DepthMap &depth,
                     double mm_per_unit = 0.1);
/// Raw 16-bit values of a grayscale PNG written by write_depth_png.
Eigen::Matrix<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> read_png16(
    const std::filesystem::path &path);

}  // namespace posekit
