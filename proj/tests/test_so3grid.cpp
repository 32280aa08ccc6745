#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "posekit/so3grid.hpp"
#include "support.hpp"

using namespace posekit;
using posekit::testing::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t scan_nearest(const Rotationd &r, const SO3Grid &grid) {
  std::size_t best = 0;
  double best_angle = geodesic_angle(r, grid[0]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double a = geodesic_angle(r, grid[k]);
    if (a < best_angle) {
      best_angle = a;
      best = k;
    }
  }
  return best;
}

/// Angle from each prototype to its nearest other prototype.
std::vector<double> nearest_neighbor_angles(const SO3Grid &grid) {
  const Eigen::Matrix4Xd &q = grid.coefficients();
  std::vector<double> out(grid.size());
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    Eigen::VectorXd dots = (q.transpose() * q.col(k)).cwiseAbs();
    dots[k] = -1.0;
    out[static_cast<std::size_t>(k)] = 2.0 * std::acos(std::min(1.0, dots.maxCoeff()));
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("healpix centers") {
  CHECK(healpix_centers(1).centers.size() == 12);
  CHECK(healpix_centers(4).centers.size() == 192);
  CHECK_THROWS_AS(healpix_centers(0), Error);

  for (int n_side : {1, 2, 3, 4, 7}) {
    const S2Grid g = healpix_centers(n_side);
    REQUIRE(g.centers.size() == static_cast<std::size_t>(12 * n_side * n_side));
    for (std::size_t i = 0; i < g.centers.size(); ++i) {
      const S2Point &p = g.centers[i];
      CHECK(p.theta >= 0.0);
      CHECK(p.theta <= kPi);
      CHECK(p.phi >= 0.0);
      CHECK(p.phi < 2.0 * kPi);
      // RING order: each center lies in the pixel with its own index.
      CHECK(oracle::healpix_ring_pixel(n_side, std::cos(p.theta), p.phi) == static_cast<long>(i));
    }
  }
}

TEST_CASE("healpix cells have equal area") {
  // Monte-Carlo: uniform directions binned by the closed-form pixel index.
  Rng rng(17);
  std::normal_distribution<double> normal;
  for (int n_side : {1, 2}) {
    const int cells = 12 * n_side * n_side;
    const long samples = 2'000'000;
    std::vector<long> count(static_cast<std::size_t>(cells), 0);
    for (long s = 0; s < samples; ++s) {
      const Eigen::Vector3d v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng)).normalized();
      ++count[static_cast<std::size_t>(oracle::healpix_ring_pixel(n_side, v.z(), std::atan2(v.y(), v.x())))];
    }
    double worst = 0.0;
    for (long c : count) worst = std::max(worst, std::abs(c * double(cells) / samples - 1.0));
    CHECK(worst < 0.02);
  }
}

TEST_CASE("so3 prototypes") {
  CHECK(in_plane_count(48) == 12);
  CHECK(in_plane_count(108) == 18);
  CHECK(in_plane_count(192) == 24);
  CHECK(so3_prototypes(2).size() == 576);
  CHECK(so3_prototypes(3).size() == 1944);
  CHECK(so3_prototypes(4).size() == 4608);
  CHECK(so3_prototypes(4).in_plane_count() == 24);
  CHECK_THROWS_AS(so3_prototypes(0), Error);

  const auto start = std::chrono::steady_clock::now();
  const SO3Grid grid = so3_prototypes(4);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto &q = grid[k].quaternion();
    CHECK(std::abs(q.norm() - 1.0) < 1e-12);
  }

  const std::vector<double> nn = nearest_neighbor_angles(grid);
  CHECK(*std::min_element(nn.begin(), nn.end()) > 1e-6);
  const double med = median(nn) * 180.0 / kPi;
  CHECK(med >= 13.0);
  CHECK(med <= 16.0);
}

TEST_CASE("hopf lift follows the stated formula") {
  const SO3Grid grid = so3_prototypes(2);
  const S2Grid sphere = healpix_centers(2);
  const int m1 = grid.in_plane_count();
  for (std::size_t p = 0; p < sphere.centers.size(); p += 5) {
    for (int j = 0; j < m1; j += 3) {
      const double th = sphere.centers[p].theta, ph = sphere.centers[p].phi;
      const double psi = 2.0 * kPi * j / m1;
      const Rotationd expect = Rotationd::from_quaternion(
          std::cos(th / 2) * std::cos(psi / 2), std::cos(th / 2) * std::sin(psi / 2),
          std::sin(th / 2) * std::cos(ph + psi / 2), std::sin(th / 2) * std::sin(ph + psi / 2));
      CHECK(geodesic_angle(grid[p * m1 + j], expect) < 1e-12);
    }
  }
}

TEST_CASE("nearest bucket") {
  const SO3Grid grid = so3_prototypes(2);
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(nearest_bucket(grid[k], grid) == k);

  Rng rng(29);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const Rotationd r = posekit::testing::random_rotation(rng);
    if (nearest_bucket(r, grid) != scan_nearest(r, grid)) ++mismatches;
  }
  CHECK(mismatches == 0);

  CHECK_THROWS_AS(nearest_bucket(Rotationd::identity(), SO3Grid{}), Error);
}

TEST_CASE("nearest bucket ties go to the lowest index") {
  // Buckets 3 and 7 sit at +-20 degrees about z; every other prototype is far.
  std::vector<Rotationd> protos;
  for (int k = 0; k < 10; ++k) {
    protos.push_back(Rotationd::from_axis_angle(Eigen::Vector3d(1, 0.2 * k, 0), 2.0 + 0.1 * k));
  }
  protos[3] = Rotationd::from_axis_angle(Eigen::Vector3d::UnitZ(), 20.0 * kPi / 180.0);
  protos[7] = Rotationd::from_axis_angle(Eigen::Vector3d::UnitZ(), -20.0 * kPi / 180.0);
  const SO3Grid grid(0, 0, protos);

  const auto mid_q = (protos[3].quaternion().coeffs() + protos[7].quaternion().coeffs()).normalized();
  const Rotationd mid = Rotationd::from_quaternion(mid_q[3], mid_q[0], mid_q[1], mid_q[2]);
  const double d3 = geodesic_angle(mid, protos[3]), d7 = geodesic_angle(mid, protos[7]);
  REQUIRE(std::abs(d3 - d7) < 1e-12);
  for (int k = 0; k < 10; ++k) {
    if (k != 3 && k != 7) REQUIRE(geodesic_angle(mid, protos[k]) > d3 + 0.1);
  }
  CHECK(nearest_bucket(mid, grid) == 3);

  // Same on the real grid: in-plane midpoints of neighbors k, k+1.
  const SO3Grid real = so3_prototypes(3);
  int checked = 0;
  for (std::size_t k = 0; k + 1 < real.size(); k += 37) {
    if ((k + 1) % static_cast<std::size_t>(real.in_plane_count()) == 0) continue;
    const Eigen::Vector4d a = real[k].quaternion().coeffs();
    Eigen::Vector4d b = real[k + 1].quaternion().coeffs();
    if (a.dot(b) < 0) b = -b;
    const Eigen::Vector4d m = (a + b).normalized();
    const Rotationd r = Rotationd::from_quaternion(m[3], m[0], m[1], m[2]);
    const double dk = geodesic_angle(r, real[k]);
    bool nearest_pair = true;
    for (std::size_t j = 0; j < real.size(); ++j) {
      if (j != k && j != k + 1 && geodesic_angle(r, real[j]) < dk + 1e-9) nearest_pair = false;
    }
    if (!nearest_pair) continue;
    ++checked;
    CHECK(nearest_bucket(r, real) == k);
  }
  CHECK(checked > 10);
}

TEST_CASE("grid is uniform") {
  const SO3Grid grid = so3_prototypes(2);
  Rng rng(31);
  std::vector<int> occupancy(grid.size(), 0);
  for (int i = 0; i < 100000; ++i) ++occupancy[nearest_bucket(posekit::testing::random_rotation(rng), grid)];
  const auto [lo, hi] = std::minmax_element(occupancy.begin(), occupancy.end());
  REQUIRE(*lo > 0);
  CHECK(static_cast<double>(*hi) / *lo < 3.0);

  const SO3Grid fine = so3_prototypes(4);
  double covering = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Rotationd r = posekit::testing::random_rotation(rng);
    covering = std::max(covering, geodesic_angle(r, fine[nearest_bucket(r, fine)]));
  }
  CHECK(covering < 0.30);
}

TEST_CASE("grid export") {
  const SO3Grid grid = so3_prototypes(1);
  std::ostringstream out;
  write_grid(out, grid);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# so3grid n_side=1 K=" + std::to_string(grid.size()));
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::size_t k;
    double w, x, y, z;
    REQUIRE(static_cast<bool>(fields >> k >> w >> x >> y >> z));
    CHECK(k == rows);
    const auto &q = grid[k].quaternion();
    CHECK(w == q.w());
    CHECK(x == q.x());
    CHECK(y == q.y());
    CHECK(z == q.z());
    ++rows;
  }
  CHECK(rows == grid.size());
}
