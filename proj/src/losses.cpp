#include "posekit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace posekit {
namespace {

void check_same_length(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  if (a.size() != b.size()) {
    throw Error(Errc::ShapeMismatch, "prediction has " + std::to_string(a.size()) +
                                         " entries, labels have " + std::to_string(b.size()));
  }
}

bool on_clamp(double p) { return p <= kProbClamp || p >= 1.0 - kProbClamp; }
double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

void LossWeights::validate() const {
  for (double w : {cls_rot, cls_xy, cls_z, reg_rot, reg_xy, reg_z, mask}) {
    if (!(w >= 0.0)) throw Error(Errc::InvalidParam, "loss weights must be nonnegative");
  }
  if (!(positive > 0.0)) throw Error(Errc::InvalidParam, "positive weight must be > 0");
}

LossGrad focal_binary_soft_grad(const Eigen::VectorXd &p_hat, const Eigen::VectorXd &labels,
                                double w_plus) {
  check_same_length(p_hat, labels);
  LossGrad out;
  out.grad.setZero(p_hat.size());
  for (Eigen::Index k = 0; k < p_hat.size(); ++k) {
    const double p = clamp_prob(p_hat[k]);
    const double l = labels[k];
    const double q = 1.0 - p;
    out.value += -w_plus * l * q * q * std::log(p) - (1.0 - l) * p * p * std::log(q);
    if (!on_clamp(p_hat[k])) {
      out.grad[k] = -w_plus * l * (-2.0 * q * std::log(p) + q * q / p) -
                    (1.0 - l) * (2.0 * p * std::log(q) - p * p / q);
    }
  }
  return out;
}

double focal_binary_soft(const Eigen::VectorXd &p_hat, const Eigen::VectorXd &labels,
                         double w_plus) {
  return focal_binary_soft_grad(p_hat, labels, w_plus).value;
}

LossGrad focal_multiclass_grad(const Eigen::VectorXd &p_hat, const Eigen::VectorXd &labels,
                               NormalizationCheck check) {
  check_same_length(p_hat, labels);
  if (check == NormalizationCheck::Enforce && std::abs(p_hat.sum() - 1.0) > 1e-5) {
    throw Error(Errc::NotNormalized,
                "predicted probabilities sum to " + std::to_string(p_hat.sum()));
  }
  const double raw = labels.dot(p_hat);
  const double s = clamp_prob(raw);
  const double q = 1.0 - s;
  LossGrad out;
  out.value = -q * q * std::log(s);
  const double d_ds = on_clamp(raw) ? 0.0 : 2.0 * q * std::log(s) - q * q / s;
  out.grad = d_ds * labels;
  return out;
}

double focal_multiclass(const Eigen::VectorXd &p_hat, const Eigen::VectorXd &labels,
                        NormalizationCheck check) {
  return focal_multiclass_grad(p_hat, labels, check).value;
}

double regression_loss_rot(const Rotationd &delta_rot, const Rotationd &coarse_rot,
                           const Posed &gt, const Mesh &mesh, const SymmetrySet &sym) {
  return pose_distance_symm(Posed{delta_rot * coarse_rot, gt.translation}, gt, mesh, sym);
}

double regression_loss_trans(TranslationComponent component, const SiteCoords &pred_site,
                             const Posed &gt, const BBox &bbox, const CameraIntrinsics &cam,
                             const Mesh &mesh, const SymmetrySet &sym) {
  SiteCoords site = site_encode(gt.translation, bbox, cam);
  if (component == TranslationComponent::XY) {
    site.x = pred_site.x;
    site.y = pred_site.y;
  } else {
    site.z = pred_site.z;
  }
  const Eigen::Vector3d t = site_decode(site, bbox, cam);
  return pose_distance_symm(Posed{gt.rotation, t}, gt, mesh, sym);
}

LossGrad mask_bce_grad(const Eigen::MatrixXd &pred, const Eigen::MatrixXd &gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) {
    throw Error(Errc::ShapeMismatch, "mask shapes differ");
  }
  if (pred.size() == 0) throw Error(Errc::EmptyInput, "empty mask");
  const double n = static_cast<double>(pred.size());
  LossGrad out;
  out.grad.setZero(pred.size());
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const double p = clamp_prob(pred.data()[i]);
    const double g = gt.data()[i];
    out.value -= g * std::log(p) + (1.0 - g) * std::log(1.0 - p);
    if (!on_clamp(pred.data()[i])) out.grad[i] = (p - g) / (p * (1.0 - p)) / n;
  }
  out.value /= n;
  return out;
}

double mask_bce(const Eigen::MatrixXd &pred, const Eigen::MatrixXd &gt) {
  return mask_bce_grad(pred, gt).value;
}

double total_loss(const LossTerms &t, const LossWeights &w) {
  const std::array<double, 7> terms{t.cls_rot, t.cls_xy, t.cls_z, t.reg_rot,
                                    t.reg_xy,  t.reg_z,  t.mask};
  const std::array<double, 7> weights{w.cls_rot, w.cls_xy, w.cls_z, w.reg_rot,
                                      w.reg_xy,  w.reg_z,  w.mask};
  double sum = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!std::isfinite(terms[i])) {
      throw Error(Errc::NonFinite, "loss term " + std::to_string(i) + " is not finite");
    }
    sum += weights[i] * terms[i];
  }
  return sum;
}

}  // namespace posekit
