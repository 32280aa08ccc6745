#pragma once

#include <Eigen/Core>

#include <array>

#include "posekit/geometry.hpp"
#include "posekit/mesh.hpp"
#include "posekit/symlabels.hpp"

namespace posekit {

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before any log.
inline constexpr double kProbClamp = 1e-7;

/// Weights of the seven training terms, in order: rotation / xy / z
/// classification, rotation / xy / z regression, visible mask.
struct LossWeights {
  double cls_rot = 0.05;
  double cls_xy = 2.0;
  double cls_z = 2.0;
  double reg_rot = 1.0;
  double reg_xy = 1.0;
  double reg_z = 0.2;
  double mask = 10.0;
  /// Positive-class weight of the binary rotation focal loss.
  double positive = 100.0;

  void validate() const;
};

struct LossTerms {
  double cls_rot = 0.0;
  double cls_xy = 0.0;
  double cls_z = 0.0;
  double reg_rot = 0.0;
  double reg_xy = 0.0;
  double reg_z = 0.0;
  double mask = 0.0;
};

/// Loss value together with its gradient w.r.t. the predicted probabilities.
/// Entries whose probability sits on a clamp bound get a zero gradient.
struct LossGrad {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// sum_k -w+ l_k (1 - p_k)^2 log p_k - (1 - l_k) p_k^2 log(1 - p_k).
/// Throws ShapeMismatch if the lengths differ.
double focal_binary_soft(const Eigen::VectorXd &p_hat, const Eigen::VectorXd &labels,
                         double w_plus);
LossGrad focal_binary_soft_grad(const Eigen::VectorXd &p_hat, const Eigen::VectorXd &labels,
                                double w_plus);

enum class NormalizationCheck { Enforce, Skip };

/// -(1 - s)^2 log s with s = sum_j l_j p_j clamped. With Enforce (default),
/// throws NotNormalized when p_hat does not sum to 1 within 1e-5.
double focal_multiclass(const Eigen::VectorXd &p_hat, const Eigen::VectorXd &labels,
                        NormalizationCheck check = NormalizationCheck::Enforce);
LossGrad focal_multiclass_grad(const Eigen::VectorXd &p_hat, const Eigen::VectorXd &labels,
                               NormalizationCheck check = NormalizationCheck::Enforce);

/// Disentangled rotation regression: pose distance between
/// (delta * coarse, t*) and (R*, t*).
double regression_loss_rot(const Rotationd &delta_rot, const Rotationd &coarse_rot,
                           const Posed &gt, const Mesh &mesh, const SymmetrySet &sym);

enum class TranslationComponent { XY, Z };

/// Disentangled translation regression: only the chosen SITE component of
/// `pred_site` replaces the ground truth before decoding to millimeters.
double regression_loss_trans(TranslationComponent component, const SiteCoords &pred_site,
                             const Posed &gt, const BBox &bbox, const CameraIntrinsics &cam,
                             const Mesh &mesh, const SymmetrySet &sym);

/// Mean binary cross entropy over pixels.
double mask_bce(const Eigen::MatrixXd &pred, const Eigen::MatrixXd &gt);
/// Gradient is returned flattened column-major, matching Eigen storage.
LossGrad mask_bce_grad(const Eigen::MatrixXd &pred, const Eigen::MatrixXd &gt);

/// Weighted sum of the seven terms. Throws NonFinite on NaN/Inf terms.
double total_loss(const LossTerms &terms, const LossWeights &w = {});

}  // namespace posekit
