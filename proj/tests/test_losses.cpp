#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "posekit/losses.hpp"
#include "support.hpp"

using namespace posekit;
using namespace posekit::testing;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Eigen::VectorXd random_probs(Rng &rng, Eigen::Index n, double lo = 0.02, double hi = 0.98) {
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p[i] = uniform(rng, lo, hi);
  return p;
}

}  // namespace

TEST_CASE("weights") {
  const LossWeights w;
  CHECK(w.cls_rot == 0.05);
  CHECK(w.cls_xy == 2.0);
  CHECK(w.cls_z == 2.0);
  CHECK(w.reg_rot == 1.0);
  CHECK(w.reg_xy == 1.0);
  CHECK(w.reg_z == 0.2);
  CHECK(w.mask == 10.0);
  CHECK(w.positive == 100.0);
  CHECK_NOTHROW(w.validate());
  LossWeights bad;
  bad.reg_z = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = LossWeights{};
  bad.positive = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("focal binary soft") {
  CHECK(focal_binary_soft(vec({0.9}), vec({1.0}), 100.0) == doctest::Approx(-100 * 0.01 * std::log(0.9)).epsilon(1e-14));
  CHECK(focal_binary_soft(vec({0.9}), vec({1.0}), 100.0) == doctest::Approx(0.10536).epsilon(1e-4));
  CHECK(focal_binary_soft(vec({1e-9}), vec({0.0}), 100.0) < 1e-13);
  CHECK(focal_binary_soft(vec({0.0}), vec({0.0}), 100.0) < 1e-13);
  CHECK(std::isfinite(focal_binary_soft(vec({0.0, 1.0}), vec({1.0, 0.0}), 100.0)));

  try {
    focal_binary_soft(vec({0.5, 0.5}), vec({1.0}), 100.0);
    FAIL("expected ShapeMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::ShapeMismatch);
  }

  SUBCASE("monotone in p") {
    double prev_pos = std::numeric_limits<double>::infinity(), prev_neg = -1.0;
    for (double p = 0.01; p < 1.0; p += 0.01) {
      const double pos = focal_binary_soft(vec({p}), vec({1.0}), 100.0);
      const double neg = focal_binary_soft(vec({p}), vec({0.0}), 100.0);
      CHECK(pos < prev_pos);
      CHECK(neg > prev_neg);
      CHECK(pos >= 0.0);
      CHECK(neg >= 0.0);
      prev_pos = pos;
      prev_neg = neg;
    }
  }

  SUBCASE("gradient") {
    Rng rng(71);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd p = random_probs(rng, 16);
      const Eigen::VectorXd l = random_probs(rng, 16, 0.0, 1.0);
      const LossGrad g = focal_binary_soft_grad(p, l, 100.0);
      CHECK(g.value == focal_binary_soft(p, l, 100.0));
      const Eigen::VectorXd fd = oracle::finite_difference(
          [&](const Eigen::VectorXd &x) { return focal_binary_soft(x, l, 100.0); }, p);
      worst = std::max(worst, oracle::max_relative_error(g.grad, fd));
    }
    CHECK(worst < 1e-4);
  }

  SUBCASE("clamped entries have zero gradient") {
    const LossGrad g = focal_binary_soft_grad(vec({0.0, 1.0, 0.5}), vec({1.0, 0.0, 0.3}), 100.0);
    CHECK(g.grad[0] == 0.0);
    CHECK(g.grad[1] == 0.0);
    CHECK(g.grad[2] != 0.0);
  }
}

TEST_CASE("focal multiclass") {
  const Eigen::VectorXd p = vec({0.1, 0.8, 0.1});
  CHECK(focal_multiclass(p, vec({0, 1, 0})) == doctest::Approx(-0.04 * std::log(0.8)).epsilon(1e-14));
  CHECK(focal_multiclass(p, vec({0, 1, 0})) == doctest::Approx(0.008926).epsilon(1e-4));
  CHECK(focal_multiclass(vec({0, 1, 0}), vec({0, 1, 0})) < 1e-12);

  try {
    focal_multiclass(vec({0.5, 0.6}), vec({1, 0}));
    FAIL("expected NotNormalized");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::NotNormalized);
  }
  CHECK_NOTHROW(focal_multiclass(vec({0.5, 0.5 + 5e-6}), vec({1, 0})));
  CHECK_NOTHROW(focal_multiclass(vec({0.5, 0.6}), vec({1, 0}), NormalizationCheck::Skip));
  try {
    focal_multiclass(vec({0.5, 0.5}), vec({1, 0, 0}));
    FAIL("expected ShapeMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::ShapeMismatch);
  }

  SUBCASE("gradient") {
    Rng rng(73);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd q = random_probs(rng, 10, 0.01, 1.0);
      q /= q.sum();
      // Gaussian-shaped soft labels around a random bin.
      const int c = static_cast<int>(uniform(rng, 0, 10));
      Eigen::VectorXd l(10);
      for (int j = 0; j < 10; ++j) l[j] = std::exp(-0.5 * (j - c) * (j - c));
      const LossGrad g = focal_multiclass_grad(q, l);
      const Eigen::VectorXd fd = oracle::finite_difference(
          [&](const Eigen::VectorXd &x) { return focal_multiclass(x, l, NormalizationCheck::Skip); }, q);
      worst = std::max(worst, oracle::max_relative_error(g.grad, fd));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("rotation regression loss") {
  Rng rng(79);
  const Mesh tet = make_tetrahedron();
  const Posed gt = random_pose(rng);
  const Rotationd coarse = random_rotation(rng);
  const Rotationd delta = gt.rotation * coarse.inverse();
  CHECK(regression_loss_rot(delta, coarse, gt, tet, SymmetrySet::none()) < 1e-9);

  const Mesh cyl = make_cylinder(20.0, 50.0, 36);
  const SymmetrySet sym = z_symmetries(36);
  const Rotationd symmetric = gt.rotation * sym.transforms[7].rotation;
  CHECK(regression_loss_rot(symmetric * coarse.inverse(), coarse, gt, cyl, sym) < 1e-9);

  for (int i = 0; i < 20; ++i) {
    const Rotationd d = random_rotation(rng), c = random_rotation(rng);
    const double want = oracle::pose_distance(Posed{d * c, gt.translation}, gt, tet, SymmetrySet::none());
    CHECK(regression_loss_rot(d, c, gt, tet, SymmetrySet::none()) == doctest::Approx(want).epsilon(1e-12));
    CHECK(regression_loss_rot(d, c, gt, tet, SymmetrySet::none()) ==
          pose_distance_symm(Posed{d * c, gt.translation}, gt, tet, SymmetrySet::none()));
  }
}

TEST_CASE("translation regression loss") {
  Rng rng(83);
  const CameraIntrinsics cam = test_camera();
  const BBox bbox{330.0, 250.0, 180.0, 256.0 / 180.0};
  const Posed gt{random_rotation(rng), {12.0, -8.0, 850.0}};
  const SiteCoords site = site_encode(gt.translation, bbox, cam);
  const Mesh tet = make_tetrahedron();

  CHECK(regression_loss_trans(TranslationComponent::XY, site, gt, bbox, cam, tet, SymmetrySet::none()) < 1e-9);
  CHECK(regression_loss_trans(TranslationComponent::Z, site, gt, bbox, cam, tet, SymmetrySet::none()) < 1e-9);

  // Only the chosen component is used: garbage elsewhere has no effect.
  SiteCoords xy_only = site;
  xy_only.z = 7.0;
  CHECK(regression_loss_trans(TranslationComponent::XY, xy_only, gt, bbox, cam, tet, SymmetrySet::none()) < 1e-9);
  SiteCoords z_only = site;
  z_only.x += 0.3;
  CHECK(regression_loss_trans(TranslationComponent::Z, z_only, gt, bbox, cam, tet, SymmetrySet::none()) < 1e-9);

  // Single vertex at the origin: the loss is smooth-L1 of the metric offset.
  const Mesh point = make_mesh({{0, 0, 0}}, {});
  for (double delta : {0.0005, 0.002, 0.05}) {
    SiteCoords pred = site;
    pred.x += delta;
    const double dx = delta * bbox.size * gt.translation.z() / cam.fx;
    CHECK(regression_loss_trans(TranslationComponent::XY, pred, gt, bbox, cam, point, SymmetrySet::none()) ==
          doctest::Approx(oracle::smooth_l1(dx)).epsilon(1e-9));
  }
  SiteCoords deeper = site;
  deeper.z *= 1.01;
  const double dz = 0.01 * gt.translation.z();
  const Eigen::Vector3d moved = site_decode(deeper, bbox, cam);
  CHECK((moved - gt.translation).norm() == doctest::Approx(dz * gt.translation.norm() / gt.translation.z()).epsilon(1e-9));
  CHECK(regression_loss_trans(TranslationComponent::Z, deeper, gt, bbox, cam, point, SymmetrySet::none()) ==
        doctest::Approx(oracle::smooth_l1((moved - gt.translation).norm())).epsilon(1e-12));

  SiteCoords behind = site;
  behind.z = -1.0;
  try {
    regression_loss_trans(TranslationComponent::Z, behind, gt, bbox, cam, tet, SymmetrySet::none());
    FAIL("expected InvalidDepth");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::InvalidDepth);
  }
}

TEST_CASE("mask bce") {
  Eigen::MatrixXd gt(2, 3);
  gt << 1, 0, 1, 0, 0, 1;
  CHECK(mask_bce(gt, gt) < 1e-5);
  CHECK(mask_bce(Eigen::MatrixXd::Constant(2, 3, 0.5), gt) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(mask_bce(Eigen::MatrixXd::Constant(2, 3, 0.5), gt) == doctest::Approx(0.6931).epsilon(1e-4));
  try {
    mask_bce(Eigen::MatrixXd::Constant(3, 2, 0.5), gt);
    FAIL("expected ShapeMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::ShapeMismatch);
  }

  Rng rng(89);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int h = 3 + i % 5, w = 4 + i % 3;
    Eigen::MatrixXd p(h, w), g(h, w);
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      p.data()[k] = uniform(rng, 0.02, 0.98);
      g.data()[k] = uniform(rng) < 0.5 ? 0.0 : 1.0;
    }
    const LossGrad lg = mask_bce_grad(p, g);
    CHECK(lg.value == mask_bce(p, g));
    const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(p.data(), p.size());
    const Eigen::VectorXd fd = oracle::finite_difference(
        [&](const Eigen::VectorXd &x) { return mask_bce(Eigen::Map<const Eigen::MatrixXd>(x.data(), h, w), g); },
        flat);
    worst = std::max(worst, oracle::max_relative_error(lg.grad, fd));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("total loss") {
  CHECK(total_loss(LossTerms{}) == 0.0);
  const LossTerms ones{1, 1, 1, 1, 1, 1, 1};
  CHECK(total_loss(ones) == doctest::Approx(16.25).epsilon(1e-15));
  const LossTerms t{0.3, 1.2, 0.7, 4.0, 2.5, 9.0, 0.1};
  const LossTerms t2{0.6, 2.4, 1.4, 8.0, 5.0, 18.0, 0.2};
  CHECK(total_loss(t2) == doctest::Approx(2.0 * total_loss(t)).epsilon(1e-15));
  LossTerms bad = ones;
  bad.reg_xy = std::numeric_limits<double>::quiet_NaN();
  try {
    total_loss(bad);
    FAIL("expected NonFinite");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::NonFinite);
  }
  bad.reg_xy = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(total_loss(bad), Error);
}
