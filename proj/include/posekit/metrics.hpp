#pragma once

#include <Eigen/Core>

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "posekit/geometry.hpp"
#include "posekit/mesh.hpp"

namespace posekit {

/// Everything the evaluator needs to know about one object.
struct ObjectModel {
  int obj_id = 0;
  Mesh mesh;
  SymmetrySet symmetries;
  double diameter = 0.0;
};

/// One ground-truth instance and the prediction matched to it (if any).
struct EvalRecord {
  int scene_id = 0;
  int im_id = 0;
  int obj_id = 0;
  std::optional<Posed> estimate;
  double score = 0.0;
  Posed gt;
  std::shared_ptr<const ObjectModel> model;
  std::optional<CameraIntrinsics> camera;
};

/// Maximum symmetry-aware surface distance (mm):
/// min over S of max over vertices |est x - gt S x|.
double mssd(const Posed &est, const Posed &gt, const Mesh &mesh, const SymmetrySet &sym);

/// Maximum symmetry-aware projection distance (px). Returns +infinity when a
/// vertex lies at or behind the camera plane under either pose.
double mspd(const Posed &est, const Posed &gt, const Mesh &mesh, const SymmetrySet &sym,
            const CameraIntrinsics &cam);

/// Visible surface discrepancy for each tolerance in `taus` (mm), assuming
/// the object is fully visible. Renders both poses once. Throws EmptyRender
/// when neither pose covers any pixel.
std::vector<double> vsd(const Posed &est, const Posed &gt, const Mesh &mesh,
                        const CameraIntrinsics &cam, std::span<const double> taus);
double vsd(const Posed &est, const Posed &gt, const Mesh &mesh, const CameraIntrinsics &cam,
           double tau);

/// ADD (mean |est x - gt x|) or, when `symmetric`, ADD-S
/// (mean over x of min over y |est x - gt y|). ADD-S uses an exact k-d tree.
double add_adds(const Posed &est, const Posed &gt, const Mesh &mesh, bool symmetric);

/// Area under the accuracy-vs-threshold curve on [0, max_threshold], in
/// percent, integrated exactly from the empirical step function.
/// Throws EmptyInput / InvalidParam.
double auc(std::span<const double> errors, double max_threshold);

/// Threshold grids; the defaults are the BOP19 parameterization.
struct RecallConfig {
  /// MSSD thresholds as fractions of the object diameter.
  std::vector<double> mssd_fractions;
  /// MSPD thresholds in pixels at 640 px image width, scaled by width / 640.
  std::vector<double> mspd_pixels;
  /// VSD misalignment tolerances as fractions of the object diameter.
  std::vector<double> vsd_tau_fractions;
  /// VSD error thresholds.
  std::vector<double> vsd_thresholds;

  static RecallConfig bop19();
};

struct MetricRecall {
  /// For VSD the table is flattened tau-major: index = tau * n_thr + thr.
  std::vector<double> recall;
  double average = 0.0;
};

struct ObjectRecall {
  std::size_t instances = 0;
  double ar_vsd = 0.0;
  double ar_mssd = 0.0;
  double ar_mspd = 0.0;
  double ar = 0.0;
};

struct RecallReport {
  MetricRecall vsd;
  MetricRecall mssd;
  MetricRecall mspd;
  double ar_vsd = 0.0;
  double ar_mssd = 0.0;
  double ar_mspd = 0.0;
  /// (ar_vsd + ar_mssd + ar_mspd) / 3.
  double ar = 0.0;
  std::size_t instances = 0;
  std::map<int, ObjectRecall> per_object;
  RecallConfig config;
};

/// Per-instance pose errors used by average_recall. Missing estimates and
/// empty renders are recorded as +infinity (MSSD, MSPD) and 1 (VSD).
struct RecordErrors {
  std::vector<double> vsd;
  double mssd = 0.0;
  double mspd = 0.0;
};

RecordErrors record_errors(const EvalRecord &record, const RecallConfig &config);

/// Recall per threshold and average recall per metric. Records are ordered
/// by (scene, image, object) before evaluation; `jobs` worker threads
/// compute per-record errors, so the result does not depend on `jobs`.
/// Throws EmptyInput, MissingAsset.
RecallReport average_recall(std::vector<EvalRecord> records,
                            const RecallConfig &config = RecallConfig::bop19(), int jobs = 1);

/// Recall tables from precomputed errors; `widths` are image widths for the
/// MSPD threshold scaling and `diameters` the object diameters.
RecallReport recall_from_errors(std::span<const RecordErrors> errors,
                                std::span<const int> obj_ids, std::span<const int> widths,
                                std::span<const double> diameters, const RecallConfig &config);

/// Highest classification score wins; the earliest candidate on ties.
/// Throws EmptyInput.
Posed tta_select(std::span<const std::pair<Posed, double>> candidates);

}  // namespace posekit
