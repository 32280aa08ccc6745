#include "posekit/symlabels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace posekit {
namespace {

double mean_smooth_l1(const Eigen::Matrix3Xd &a, const Eigen::Matrix3Xd &b) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) sum += smooth_l1((a.col(i) - b.col(i)).norm());
  return sum / static_cast<double>(a.cols());
}

// Symmetry images S x of the vertex set, one 3xN block per symmetry.
std::vector<Eigen::Matrix3Xd> symmetry_images(const Eigen::Matrix3Xd &v,
                                              const SymmetrySet &sym) {
  std::vector<Eigen::Matrix3Xd> out;
  if (sym.transforms.empty()) {
    out.push_back(v);
    return out;
  }
  out.reserve(sym.size());
  for (const Posed &s : sym.transforms) out.push_back(s.apply(v));
  return out;
}

double min_over_symmetries(const Eigen::Matrix3Xd &moved, const Posed &p2,
                           const std::vector<Eigen::Matrix3Xd> &images) {
  const Eigen::Matrix3d r2 = p2.rotation.matrix();
  double best = std::numeric_limits<double>::infinity();
  for (const Eigen::Matrix3Xd &img : images) {
    const Eigen::Matrix3Xd b = (r2 * img).colwise() + p2.translation;
    best = std::min(best, mean_smooth_l1(moved, b));
  }
  return best;
}

}  // namespace

double object_diameter(const Mesh &mesh) {
  const Eigen::Matrix3Xd &v = mesh.vertices;
  const Eigen::Index n = v.cols();
  if (n < 2) {
    throw Error(Errc::TooFewVertices,
                "diameter needs >= 2 vertices, got " + std::to_string(n));
  }
  const Eigen::Vector3d centroid = v.rowwise().mean();
  const Eigen::VectorXd radius = (v.colwise() - centroid).colwise().norm().transpose();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return radius[a] > radius[b]; });

  // |vi - vj| <= ri + rj; a pair is skipped only when that bound is clearly
  // below the current best, so the result equals the exhaustive maximum.
  auto hopeless = [](double bound, double best) {
    return bound * (1.0 + 1e-12) + 1e-12 < best;
  };
  double best_sq = 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double ri = radius[order[i]];
    if (hopeless(ri + radius[order[0]], best)) break;
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (hopeless(ri + radius[order[j]], best)) break;
      const double d2 = (v.col(order[i]) - v.col(order[j])).squaredNorm();
      if (d2 > best_sq) {
        best_sq = d2;
        best = std::sqrt(d2);
      }
    }
  }
  return best;
}

double pose_distance_symm(const Posed &p1, const Posed &p2, const Mesh &mesh,
                          const SymmetrySet &sym) {
  const Eigen::Matrix3Xd v = subsample_vertices(mesh.vertices, kPoseDistanceMaxVertices);
  return min_over_symmetries(p1.apply(v), p2, symmetry_images(v, sym));
}

RotationSoftLabels rotation_soft_labels(const Posed &gt, const SO3Grid &grid,
                                        const Mesh &mesh, const SymmetrySet &sym,
                                        double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(Errc::InvalidParam, "sigma must be positive");
  }
  const Eigen::Matrix3Xd v = subsample_vertices(mesh.vertices, kPoseDistanceMaxVertices);
  const Eigen::Matrix3Xd moved = gt.apply(v);
  const auto images = symmetry_images(v, sym);

  RotationSoftLabels labels;
  labels.values.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double rho = min_over_symmetries(moved, Posed{grid[k], gt.translation}, images);
    labels.values[static_cast<Eigen::Index>(k)] = std::exp(-rho / sigma);
  }
  return labels;
}

int TranslationGridSpec::xy_bin(double v) const {
  return std::clamp(static_cast<int>(std::floor((v - xy_lo) / xy_width())), 0, xy_bins - 1);
}

int TranslationGridSpec::z_bin(double v) const {
  return std::clamp(static_cast<int>(std::floor((v - z_lo) / z_width())), 0, z_bins - 1);
}

TranslationSoftLabels translation_soft_labels(const SiteCoords &gt_site,
                                              const TranslationGridSpec &spec) {
  if (spec.xy_bins < 1 || spec.z_bins < 1 || !(spec.xy_hi > spec.xy_lo) ||
      !(spec.z_hi > spec.z_lo) || !(spec.sigma_bins > 0.0)) {
    throw Error(Errc::InvalidParam, "malformed translation grid");
  }
  auto inside = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!inside(gt_site.x, spec.xy_lo, spec.xy_hi) ||
      !inside(gt_site.y, spec.xy_lo, spec.xy_hi) ||
      !inside(gt_site.z, spec.z_lo, spec.z_hi)) {
    throw Error(Errc::OutOfRange, "SITE target outside the quantization range");
  }

  const double sxy = spec.sigma_bins * spec.xy_width();
  const double sz = spec.sigma_bins * spec.z_width();

  Eigen::VectorXd gx(spec.xy_bins);
  Eigen::VectorXd gy(spec.xy_bins);
  for (int j = 0; j < spec.xy_bins; ++j) {
    const double c = spec.xy_center(j);
    gx[j] = (c - gt_site.x) * (c - gt_site.x) / (2.0 * sxy * sxy);
    gy[j] = (c - gt_site.y) * (c - gt_site.y) / (2.0 * sxy * sxy);
  }

  TranslationSoftLabels out;
  out.spec = spec;
  out.xy.resize(spec.xy_bins, spec.xy_bins);
  for (int row = 0; row < spec.xy_bins; ++row) {
    for (int col = 0; col < spec.xy_bins; ++col) out.xy(row, col) = std::exp(-(gx[col] + gy[row]));
  }
  out.z.resize(spec.z_bins);
  for (int j = 0; j < spec.z_bins; ++j) {
    const double d = spec.z_center(j) - gt_site.z;
    out.z[j] = std::exp(-d * d / (2.0 * sz * sz));
  }
  return out;
}

std::size_t hard_label(std::span<const double> labels) {
  if (labels.empty()) {
    throw Error(Errc::EmptyInput, "hard_label on empty labels");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] > labels[best]) best = i;
  }
  return best;
}

std::size_t hard_label(const RotationSoftLabels &labels) {
  return hard_label(std::span<const double>(labels.values.data(),
                                            static_cast<std::size_t>(labels.values.size())));
}

TranslationHardLabel hard_label(const TranslationSoftLabels &labels) {
  // Row-major flattening so the flat index is row * bins + col.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> xy = labels.xy;
  return {hard_label(std::span<const double>(xy.data(), static_cast<std::size_t>(xy.size()))),
          hard_label(std::span<const double>(labels.z.data(),
                                             static_cast<std::size_t>(labels.z.size())))};
}

}  // namespace posekit
