#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "posekit/geometry.hpp"

namespace posekit {

/// Sphere point in colatitude theta in [0, pi] and longitude phi in [0, 2 pi).
struct S2Point {
  double theta = 0.0;
  double phi = 0.0;
};

/// HEALPix pixel centers in RING order; 12 n_side^2 equal-area cells.
struct S2Grid {
  int n_side = 0;
  std::vector<S2Point> centers;
};

/// K rotation prototypes partitioning SO(3) by nearest-neighbor assignment.
/// Bucket k = pixel * in_plane_count + j, where j indexes the in-plane angle
/// 2 pi j / in_plane_count.
class SO3Grid {
 public:
  SO3Grid() = default;
  /// Builds a grid over an arbitrary prototype list. `n_side` and `in_plane`
  /// are informational and may be 0 for hand-made grids.
  SO3Grid(int n_side, int in_plane, std::vector<Rotationd> prototypes);

  int n_side() const { return n_side_; }
  int in_plane_count() const { return in_plane_; }
  std::size_t size() const { return prototypes_.size(); }
  const std::vector<Rotationd> &prototypes() const { return prototypes_; }
  const Rotationd &operator[](std::size_t k) const { return prototypes_[k]; }

  /// 4 x K matrix of prototype quaternion coefficients (x, y, z, w).
  const Eigen::Matrix4Xd &coefficients() const { return coeffs_; }

 private:
  int n_side_ = 0;
  int in_plane_ = 0;
  std::vector<Rotationd> prototypes_;
  Eigen::Matrix4Xd coeffs_;
};

/// Throws InvalidParam if n_side < 1.
S2Grid healpix_centers(int n_side);

/// floor(sqrt(pi * out_of_plane)): 12, 18, 24 for 48, 108, 192 sphere cells.
int in_plane_count(int out_of_plane);

/// Hopf lift of the HEALPix centers: for center (theta, phi) and in-plane
/// angle psi the prototype quaternion (w, x, y, z) is
/// (cos(theta/2) cos(psi/2), cos(theta/2) sin(psi/2),
///  sin(theta/2) cos(phi + psi/2), sin(theta/2) sin(phi + psi/2)).
SO3Grid so3_prototypes(int n_side);

/// Index of the prototype with the smallest geodesic angle to `rot`.
/// Candidates within 1e-12 (in |<q, q_k>|) of the best count as ties and the
/// lowest index wins.
std::size_t nearest_bucket(const Rotationd &rot, const SO3Grid &grid);

/// Text export: header `# so3grid n_side=<n> K=<k>` then `k qw qx qy qz`.
void write_grid(std::ostream &out, const SO3Grid &grid);

}  // namespace posekit
