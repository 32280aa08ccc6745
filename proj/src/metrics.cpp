#include "posekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <tuple>

#include "posekit/render.hpp"

namespace posekit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace_steps(double step, int count) {
  std::vector<double> out;
  for (int i = 1; i <= count; ++i) out.push_back(step * i);
  return out;
}

// Exact nearest-neighbor queries over a static 3D point set.
class KdTree {
 public:
  explicit KdTree(const Eigen::Matrix3Xd &points) : points_{points} {
    index_.resize(static_cast<std::size_t>(points.cols()));
    std::iota(index_.begin(), index_.end(), Eigen::Index{0});
    nodes_.reserve(index_.size());
    if (!index_.empty()) build(0, index_.size(), 0);
  }

  /// Smallest squared distance from q to the set.
  double nearest_squared(const Eigen::Vector3d &q) const {
    double best = kInf;
    if (!nodes_.empty()) search(0, q, best);
    return best;
  }

 private:
  struct Node {
    Eigen::Index point;
    int axis;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end, int depth) {
    if (begin >= end) return -1;
    const int axis = depth % 3;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                     index_.begin() + static_cast<std::ptrdiff_t>(mid),
                     index_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return points_(axis, a) < points_(axis, b);
                     });
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({index_[mid], axis});
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid + 1, end, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  void search(int id, const Eigen::Vector3d &q, double &best) const {
    const Node &n = nodes_[static_cast<std::size_t>(id)];
    const Eigen::Vector3d p = points_.col(n.point);
    best = std::min(best, (q - p).squaredNorm());
    const double diff = q[n.axis] - p[n.axis];
    const int near = diff < 0.0 ? n.left : n.right;
    const int far = diff < 0.0 ? n.right : n.left;
    if (near >= 0) search(near, q, best);
    // Any point across the split plane is at least |diff| away on this axis.
    if (far >= 0 && diff * diff <= best) search(far, q, best);
  }

  const Eigen::Matrix3Xd &points_;
  std::vector<Eigen::Index> index_;
  std::vector<Node> nodes_;
};

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn &&fn) {
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace

double mssd(const Posed &est, const Posed &gt, const Mesh &mesh, const SymmetrySet &sym) {
  const Eigen::Matrix3Xd a = est.apply(mesh.vertices);
  double best = kInf;
  for (const Posed &s : sym.transforms) {
    const Eigen::Matrix3Xd b = (gt * s).apply(mesh.vertices);
    best = std::min(best, (a - b).colwise().norm().maxCoeff());
  }
  if (sym.transforms.empty()) best = (a - gt.apply(mesh.vertices)).colwise().norm().maxCoeff();
  return best;
}

double mspd(const Posed &est, const Posed &gt, const Mesh &mesh, const SymmetrySet &sym,
            const CameraIntrinsics &cam) {
  auto project = [&](const Posed &pose, Eigen::Matrix2Xd &uv) {
    const Eigen::Matrix3Xd p = pose.apply(mesh.vertices);
    uv.resize(2, p.cols());
    for (Eigen::Index i = 0; i < p.cols(); ++i) {
      if (!(p(2, i) > 0.0)) return false;
      uv(0, i) = cam.fx * p(0, i) / p(2, i) + cam.cx;
      uv(1, i) = cam.fy * p(1, i) / p(2, i) + cam.cy;
    }
    return true;
  };
  Eigen::Matrix2Xd a;
  if (!project(est, a)) return kInf;
  std::vector<Posed> transforms = sym.transforms;
  if (transforms.empty()) transforms.push_back(Posed::identity());
  double best = kInf;
  Eigen::Matrix2Xd b;
  for (const Posed &s : transforms) {
    if (!project(gt * s, b)) return kInf;
    best = std::min(best, (a - b).colwise().norm().maxCoeff());
  }
  return best;
}

std::vector<double> vsd(const Posed &est, const Posed &gt, const Mesh &mesh,
                        const CameraIntrinsics &cam, std::span<const double> taus) {
  const RenderResult e = rasterize(mesh, est, cam);
  const RenderResult g = rasterize(mesh, gt, cam);
  const MaskMap both = e.mask && g.mask;
  const auto union_count = static_cast<double>((e.mask || g.mask).count());
  if (union_count == 0.0) {
    throw Error(Errc::EmptyRender, "neither pose covers any pixel");
  }
  const Eigen::ArrayXXd diff = (e.depth - g.depth).array().abs();
  std::vector<double> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    const auto matched = (both && (diff < tau)).count();
    out.push_back((union_count - static_cast<double>(matched)) / union_count);
  }
  return out;
}

double vsd(const Posed &est, const Posed &gt, const Mesh &mesh, const CameraIntrinsics &cam,
           double tau) {
  return vsd(est, gt, mesh, cam, std::span<const double>(&tau, 1)).front();
}

double add_adds(const Posed &est, const Posed &gt, const Mesh &mesh, bool symmetric) {
  const Eigen::Matrix3Xd a = est.apply(mesh.vertices);
  const Eigen::Matrix3Xd b = gt.apply(mesh.vertices);
  const auto n = static_cast<double>(a.cols());
  if (!symmetric) return (a - b).colwise().norm().sum() / n;
  const KdTree tree(b);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    sum += std::sqrt(tree.nearest_squared(a.col(i)));
  }
  return sum / n;
}

double auc(std::span<const double> errors, double max_threshold) {
  if (errors.empty()) throw Error(Errc::EmptyInput, "AUC of an empty error list");
  if (!(max_threshold > 0.0)) throw Error(Errc::InvalidParam, "AUC threshold must be positive");
  // Accuracy(t) = #{e <= t} / n, so error e contributes (max - e) to the
  // integral over [0, max] whenever e <= max.
  double area = 0.0;
  for (double e : errors) {
    if (e <= max_threshold) area += max_threshold - std::max(e, 0.0);
  }
  return 100.0 * area / (max_threshold * static_cast<double>(errors.size()));
}

RecallConfig RecallConfig::bop19() {
  RecallConfig c;
  c.mssd_fractions = linspace_steps(0.05, 10);
  c.mspd_pixels = linspace_steps(5.0, 10);
  c.vsd_tau_fractions = linspace_steps(0.05, 10);
  c.vsd_thresholds = linspace_steps(0.05, 10);
  return c;
}

RecordErrors record_errors(const EvalRecord &record, const RecallConfig &config) {
  if (!record.model) {
    throw Error(Errc::MissingAsset, "no object model for obj_id " + std::to_string(record.obj_id));
  }
  if (!record.camera) {
    throw Error(Errc::MissingAsset, "no intrinsics for im_id " + std::to_string(record.im_id));
  }
  RecordErrors out;
  if (!record.estimate) {
    out.vsd.assign(config.vsd_tau_fractions.size(), 1.0);
    out.mssd = kInf;
    out.mspd = kInf;
    return out;
  }
  const ObjectModel &m = *record.model;
  const Posed &est = *record.estimate;
  out.mssd = mssd(est, record.gt, m.mesh, m.symmetries);
  out.mspd = mspd(est, record.gt, m.mesh, m.symmetries, *record.camera);
  std::vector<double> taus;
  for (double f : config.vsd_tau_fractions) taus.push_back(f * m.diameter);
  try {
    out.vsd = vsd(est, record.gt, m.mesh, *record.camera, taus);
  } catch (const Error &e) {
    if (e.code() != Errc::EmptyRender) throw;
    out.vsd.assign(taus.size(), 1.0);
  }
  return out;
}

RecallReport recall_from_errors(std::span<const RecordErrors> errors,
                                std::span<const int> obj_ids, std::span<const int> widths,
                                std::span<const double> diameters, const RecallConfig &config) {
  if (errors.empty()) throw Error(Errc::EmptyInput, "no records to evaluate");
  const std::size_t n_tau = config.vsd_tau_fractions.size();
  const std::size_t n_vsd = config.vsd_thresholds.size();

  // Per-record pass counts; recall tables are fractions of all records.
  struct Passes {
    std::vector<int> vsd, mssd, mspd;
  };
  auto zero = [&] {
    return Passes{std::vector<int>(n_tau * n_vsd, 0),
                  std::vector<int>(config.mssd_fractions.size(), 0),
                  std::vector<int>(config.mspd_pixels.size(), 0)};
  };
  Passes total = zero();
  std::map<int, std::pair<std::size_t, Passes>> per_object;

  for (std::size_t i = 0; i < errors.size(); ++i) {
    const RecordErrors &e = errors[i];
    auto &[count, obj] = per_object.try_emplace(obj_ids[i], 0, zero()).first->second;
    ++count;
    auto bump = [&](std::vector<int> Passes::*table, std::size_t k) {
      ++(total.*table)[k];
      ++(obj.*table)[k];
    };
    for (std::size_t t = 0; t < n_tau; ++t) {
      for (std::size_t k = 0; k < n_vsd; ++k) {
        if (e.vsd[t] < config.vsd_thresholds[k]) bump(&Passes::vsd, t * n_vsd + k);
      }
    }
    for (std::size_t k = 0; k < config.mssd_fractions.size(); ++k) {
      if (e.mssd < config.mssd_fractions[k] * diameters[i]) bump(&Passes::mssd, k);
    }
    const double px_scale = widths[i] / 640.0;
    for (std::size_t k = 0; k < config.mspd_pixels.size(); ++k) {
      if (e.mspd < config.mspd_pixels[k] * px_scale) bump(&Passes::mspd, k);
    }
  }

  auto summarize = [](const std::vector<int> &passes, std::size_t n) {
    MetricRecall m;
    for (int p : passes) m.recall.push_back(static_cast<double>(p) / static_cast<double>(n));
    m.average = m.recall.empty()
                    ? 0.0
                    : std::accumulate(m.recall.begin(), m.recall.end(), 0.0) /
                          static_cast<double>(m.recall.size());
    return m;
  };

  RecallReport report;
  report.config = config;
  report.instances = errors.size();
  report.vsd = summarize(total.vsd, errors.size());
  report.mssd = summarize(total.mssd, errors.size());
  report.mspd = summarize(total.mspd, errors.size());
  report.ar_vsd = report.vsd.average;
  report.ar_mssd = report.mssd.average;
  report.ar_mspd = report.mspd.average;
  report.ar = (report.ar_vsd + report.ar_mssd + report.ar_mspd) / 3.0;
  for (const auto &[obj_id, entry] : per_object) {
    const auto &[count, passes] = entry;
    ObjectRecall r;
    r.instances = count;
    r.ar_vsd = summarize(passes.vsd, count).average;
    r.ar_mssd = summarize(passes.mssd, count).average;
    r.ar_mspd = summarize(passes.mspd, count).average;
    r.ar = (r.ar_vsd + r.ar_mssd + r.ar_mspd) / 3.0;
    report.per_object[obj_id] = r;
  }
  return report;
}

RecallReport average_recall(std::vector<EvalRecord> records, const RecallConfig &config,
                            int jobs) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no records to evaluate");
  std::stable_sort(records.begin(), records.end(), [](const EvalRecord &a, const EvalRecord &b) {
    return std::tie(a.scene_id, a.im_id, a.obj_id) < std::tie(b.scene_id, b.im_id, b.obj_id);
  });
  for (const EvalRecord &r : records) {
    if (!r.model) {
      throw Error(Errc::MissingAsset, "no object model for obj_id " + std::to_string(r.obj_id));
    }
    if (!r.camera) {
      throw Error(Errc::MissingAsset, "no intrinsics for scene " + std::to_string(r.scene_id) +
                                          " image " + std::to_string(r.im_id));
    }
  }

  std::vector<RecordErrors> errors(records.size());
  parallel_for(records.size(), jobs,
               [&](std::size_t i) { errors[i] = record_errors(records[i], config); });

  std::vector<int> obj_ids, widths;
  std::vector<double> diameters;
  for (const EvalRecord &r : records) {
    obj_ids.push_back(r.obj_id);
    widths.push_back(r.camera->width);
    diameters.push_back(r.model->diameter);
  }
  return recall_from_errors(errors, obj_ids, widths, diameters, config);
}

Posed tta_select(std::span<const std::pair<Posed, double>> candidates) {
  if (candidates.empty()) throw Error(Errc::EmptyInput, "no TTA candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].second > candidates[best].second) best = i;
  }
  return candidates[best].first;
}

}  // namespace posekit
