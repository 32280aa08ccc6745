#include "posekit/so3grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace posekit {

SO3Grid::SO3Grid(int n_side, int in_plane, std::vector<Rotationd> prototypes)
    : n_side_{n_side}, in_plane_{in_plane}, prototypes_{std::move(prototypes)} {
  coeffs_.resize(4, static_cast<Eigen::Index>(prototypes_.size()));
  for (std::size_t k = 0; k < prototypes_.size(); ++k) {
    coeffs_.col(static_cast<Eigen::Index>(k)) = prototypes_[k].quaternion().coeffs();
  }
}

S2Grid healpix_centers(int n_side) {
  if (n_side < 1) {
    throw Error(Errc::InvalidParam, "n_side must be >= 1, got " + std::to_string(n_side));
  }
  constexpr double pi = std::numbers::pi;
  const double n = n_side;
  S2Grid grid;
  grid.n_side = n_side;
  grid.centers.reserve(static_cast<std::size_t>(12 * n_side * n_side));

  auto push = [&](double z, double phi) {
    grid.centers.push_back({std::acos(std::clamp(z, -1.0, 1.0)), phi});
  };

  // North polar cap: rings 1 .. n_side-1 with 4i pixels each.
  for (int i = 1; i < n_side; ++i) {
    const double z = 1.0 - (i * i) / (3.0 * n * n);
    for (int j = 1; j <= 4 * i; ++j) push(z, (j - 0.5) * pi / (2.0 * i));
  }
  // Equatorial belt: rings n_side .. 3 n_side with 4 n_side pixels, every
  // other ring shifted by half a pixel. Unshifted rings start at phi = 0.
  for (int i = n_side; i <= 3 * n_side; ++i) {
    const double z = 4.0 / 3.0 - 2.0 * i / (3.0 * n);
    const double shift = (i - n_side) % 2 == 0 ? 0.5 : 1.0;
    for (int j = 1; j <= 4 * n_side; ++j) push(z, (j - shift) * pi / (2.0 * n));
  }
  // South polar cap mirrors the north.
  for (int i = n_side - 1; i >= 1; --i) {
    const double z = -(1.0 - (i * i) / (3.0 * n * n));
    for (int j = 1; j <= 4 * i; ++j) push(z, (j - 0.5) * pi / (2.0 * i));
  }
  return grid;
}

int in_plane_count(int out_of_plane) {
  return static_cast<int>(std::floor(std::sqrt(std::numbers::pi * out_of_plane)));
}

SO3Grid so3_prototypes(int n_side) {
  const S2Grid sphere = healpix_centers(n_side);
  const int m2 = static_cast<int>(sphere.centers.size());
  const int m1 = in_plane_count(m2);

  std::vector<Rotationd> prototypes;
  prototypes.reserve(static_cast<std::size_t>(m1) * m2);
  for (const S2Point &c : sphere.centers) {
    const double ct = std::cos(c.theta / 2.0);
    const double st = std::sin(c.theta / 2.0);
    for (int j = 0; j < m1; ++j) {
      const double psi = 2.0 * std::numbers::pi * j / m1;
      prototypes.push_back(Rotationd::from_quaternion(
          ct * std::cos(psi / 2.0), ct * std::sin(psi / 2.0),
          st * std::cos(c.phi + psi / 2.0), st * std::sin(c.phi + psi / 2.0)));
    }
  }
  return SO3Grid{n_side, m1, std::move(prototypes)};
}

std::size_t nearest_bucket(const Rotationd &rot, const SO3Grid &grid) {
  if (grid.size() == 0) {
    throw Error(Errc::EmptyInput, "rotation grid is empty");
  }
  const Eigen::VectorXd dots =
      (grid.coefficients().transpose() * rot.quaternion().coeffs()).cwiseAbs();
  const double best = dots.maxCoeff();
  for (Eigen::Index k = 0; k < dots.size(); ++k) {
    if (dots[k] >= best - 1e-12) return static_cast<std::size_t>(k);
  }
  return 0;  // unreachable
}

void write_grid(std::ostream &out, const SO3Grid &grid) {
  out << "# so3grid n_side=" << grid.n_side() << " K=" << grid.size() << '\n';
  char line[160];
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Rotationd &r = grid[k];
    std::snprintf(line, sizeof line, "%zu %.17g %.17g %.17g %.17g\n", k, r.w(), r.x(),
                  r.y(), r.z());
    out << line;
  }
}

}  // namespace posekit
