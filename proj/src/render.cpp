#include "posekit/render.hpp"

#include <algorithm>
#include <cmath>

namespace posekit {
namespace {

struct ScreenPoint {
  double x;
  double y;
  double inv_z;
};

double edge(const ScreenPoint &a, const ScreenPoint &b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// With positive-area orientation in y-down image coordinates the interior
// lies on the positive side; top edges run in +x, left edges run in -y.
bool is_top_left(const ScreenPoint &a, const ScreenPoint &b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

bool covers(double w, bool top_left) { return w > 0.0 || (w == 0.0 && top_left); }

}  // namespace

std::vector<ProjectedVertex> project_vertices(const Mesh &mesh, const Posed &pose,
                                              const CameraIntrinsics &cam, double z_near) {
  const Eigen::Matrix3Xd cam_pts = pose.apply(mesh.vertices);
  std::vector<ProjectedVertex> out(static_cast<std::size_t>(cam_pts.cols()));
  for (Eigen::Index i = 0; i < cam_pts.cols(); ++i) {
    const double z = cam_pts(2, i);
    ProjectedVertex &p = out[static_cast<std::size_t>(i)];
    p.z = z;
    if (!(z > z_near)) {
      p.clipped = true;
      continue;
    }
    p.u = cam.fx * cam_pts(0, i) / z + cam.cx;
    p.v = cam.fy * cam_pts(1, i) / z + cam.cy;
  }
  return out;
}

RenderResult rasterize(const Mesh &mesh, const Posed &pose, const CameraIntrinsics &cam,
                       int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(Errc::InvalidParam, "render size must be at least 1x1");
  }
  RenderResult out{DepthMap::Zero(height, width), MaskMap::Constant(height, width, false)};
  const auto proj = project_vertices(mesh, pose, cam);

  for (Eigen::Index t = 0; t < mesh.triangles.cols(); ++t) {
    const auto &p0 = proj[static_cast<std::size_t>(mesh.triangles(0, t))];
    const auto &p1 = proj[static_cast<std::size_t>(mesh.triangles(1, t))];
    const auto &p2 = proj[static_cast<std::size_t>(mesh.triangles(2, t))];
    if (p0.clipped || p1.clipped || p2.clipped) continue;

    ScreenPoint a{p0.u, p0.v, 1.0 / p0.z};
    ScreenPoint b{p1.u, p1.v, 1.0 / p1.z};
    ScreenPoint c{p2.u, p2.v, 1.0 / p2.z};
    double area = edge(a, b, c.x, c.y);
    if (area == 0.0 || !std::isfinite(area)) continue;
    if (area < 0.0) {
      std::swap(b, c);
      area = -area;
    }

    const int x_begin = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}) - 0.5)));
    const int x_end = std::min(width - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}) - 0.5)));
    const int y_begin = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}) - 0.5)));
    const int y_end = std::min(height - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}) - 0.5)));

    const bool tl_a = is_top_left(b, c);
    const bool tl_b = is_top_left(c, a);
    const bool tl_c = is_top_left(a, b);

    for (int y = y_begin; y <= y_end; ++y) {
      const double py = y + 0.5;
      for (int x = x_begin; x <= x_end; ++x) {
        const double px = x + 0.5;
        const double wa = edge(b, c, px, py);
        const double wb = edge(c, a, px, py);
        const double wc = edge(a, b, px, py);
        if (!covers(wa, tl_a) || !covers(wb, tl_b) || !covers(wc, tl_c)) continue;
        const double inv_z = (wa * a.inv_z + wb * b.inv_z + wc * c.inv_z) / area;
        const double z = 1.0 / inv_z;
        double &slot = out.depth(y, x);
        if (slot == 0.0 || z < slot) {
          slot = z;
          out.mask(y, x) = true;
        }
      }
    }
  }
  return out;
}

}  // namespace posekit
