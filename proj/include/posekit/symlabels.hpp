#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

#include "posekit/geometry.hpp"
#include "posekit/mesh.hpp"
#include "posekit/so3grid.hpp"

namespace posekit {

/// Transition point of the smooth-L1 vertex distance, in millimeters.
inline constexpr double kSmoothL1Beta = 1.0;
/// Vertex budget for pose distances; larger meshes are stride-subsampled.
inline constexpr Eigen::Index kPoseDistanceMaxVertices = 10000;

/// e^2 / (2 beta) below beta, e - beta / 2 above.
inline double smooth_l1(double e, double beta = kSmoothL1Beta) {
  return e < beta ? e * e / (2.0 * beta) : e - 0.5 * beta;
}

/// Farthest pairwise vertex distance. Exact: candidate pairs are pruned by
/// their distances to the centroid, never approximated.
/// Throws TooFewVertices for fewer than two vertices.
double object_diameter(const Mesh &mesh);

/// Symmetry-aware pose distance: min over S in `sym` of the mean over
/// vertices x of smooth_l1(|p1 x - p2 S x|).
double pose_distance_symm(const Posed &p1, const Posed &p2, const Mesh &mesh,
                          const SymmetrySet &sym);

/// Per-bucket binary membership probabilities, not normalized.
struct RotationSoftLabels {
  Eigen::VectorXd values;
};

/// labels[k] = exp(-pose_distance_symm((R*, t*), (R_k, t*)) / sigma).
/// Throws InvalidParam if sigma <= 0.
RotationSoftLabels rotation_soft_labels(const Posed &gt, const SO3Grid &grid,
                                        const Mesh &mesh, const SymmetrySet &sym,
                                        double sigma);

/// Uniform quantization of the SITE targets. Bins are half-open
/// [lo + j w, lo + (j + 1) w) except the last, which includes `hi`.
struct TranslationGridSpec {
  double xy_lo = -0.5;
  double xy_hi = 0.5;
  int xy_bins = 64;
  double z_lo = 0.1;
  double z_hi = 10.0;
  int z_bins = 1000;
  /// Gaussian width in units of bins.
  double sigma_bins = 1.0;

  double xy_width() const { return (xy_hi - xy_lo) / xy_bins; }
  double z_width() const { return (z_hi - z_lo) / z_bins; }
  double xy_center(int j) const { return xy_lo + (j + 0.5) * xy_width(); }
  double z_center(int j) const { return z_lo + (j + 0.5) * z_width(); }
  int xy_bin(double v) const;
  int z_bin(double v) const;
};

/// xy(row, col): row indexes tau_y, col indexes tau_x. The flat xy index
/// used by hard_label is row * xy_bins + col.
struct TranslationSoftLabels {
  Eigen::MatrixXd xy;
  Eigen::VectorXd z;
  TranslationGridSpec spec;
};

/// Gaussian labels centered on the ground truth, one bin width wide.
/// Throws OutOfRange when the target lies outside the grid.
TranslationSoftLabels translation_soft_labels(const SiteCoords &gt_site,
                                              const TranslationGridSpec &spec = {});

/// Argmax, lowest index on ties. Throws EmptyInput on an empty span.
std::size_t hard_label(std::span<const double> labels);
std::size_t hard_label(const RotationSoftLabels &labels);

struct TranslationHardLabel {
  std::size_t xy;
  std::size_t z;
};
TranslationHardLabel hard_label(const TranslationSoftLabels &labels);

}  // namespace posekit
