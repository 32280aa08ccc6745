#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "posekit/bopio.hpp"
#include "posekit/correlation.hpp"
#include "posekit/metrics.hpp"
#include "posekit/render.hpp"
#include "posekit/so3grid.hpp"
#include "posekit/symlabels.hpp"

namespace posekit::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Malformed flag values that CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const CLI::Validator kWritable(
    [](std::string &p) {
      const fs::path parent = fs::path(p).parent_path();
      if (!parent.empty() && !fs::is_directory(parent)) {
        return "output directory does not exist: " + parent.string();
      }
      return std::string();
    },
    "PATH", "Writable");

std::vector<std::string> split(const std::string &text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double to_double(const std::string &token, const std::string &flag) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || end != token.data() + token.size() || !std::isfinite(v)) {
    throw UsageError(flag + ": not a finite number: '" + token + "'");
  }
  return v;
}

int to_positive_int(const std::string &token, const std::string &flag) {
  int v = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || end != token.data() + token.size() || v < 1) {
    throw UsageError(flag + ": not a positive integer: '" + token + "'");
  }
  return v;
}

std::vector<double> numbers(const std::string &text, std::size_t expected, const std::string &flag) {
  std::istringstream in(text);
  std::vector<double> v;
  for (std::string tok; in >> tok;) v.push_back(to_double(tok, flag));
  if (v.size() != expected) {
    throw UsageError(flag + ": expected " + std::to_string(expected) + " numbers, got " +
                     std::to_string(v.size()));
  }
  return v;
}

std::vector<int> dims(const std::string &text, std::size_t expected, const std::string &flag) {
  const auto parts = split(text, 'x');
  if (parts.size() != expected) {
    throw UsageError(flag + ": expected " + std::to_string(expected) + " sizes separated by 'x'");
  }
  std::vector<int> v;
  for (const auto &p : parts) v.push_back(to_positive_int(p, flag));
  return v;
}

void emit(const std::string &path, const std::string &text, std::ostream &out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path);
}

int resolve_jobs(int flag) {
  if (flag > 0) return flag;
  if (const char *env = std::getenv("POSEKIT_JOBS"); env && *env) {
    return to_positive_int(env, "POSEKIT_JOBS");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// gridgen ------------------------------------------------------------------

struct GridgenArgs {
  int n_side = 0;
  std::string out;
};

void gridgen(const GridgenArgs &a, std::ostream &out) {
  std::ostringstream s;
  write_grid(s, so3_prototypes(a.n_side));
  emit(a.out, s.str(), out);
}

// labels -------------------------------------------------------------------

struct LabelsArgs {
  std::string gt, mesh, symm, out;
  int n_side = 0;
  double sigma_frac = 0.03;
  int obj_id = 0;
};

void labels(const LabelsArgs &a, std::ostream &out) {
  const Mesh mesh = load_mesh(a.mesh);
  const SymmetrySet sym = a.symm.empty() ? SymmetrySet::none() : load_symmetries(a.symm);
  const auto records = read_scene_gt(a.gt);
  const SO3Grid grid = so3_prototypes(a.n_side);
  const double diameter = object_diameter(mesh);
  const double sigma = a.sigma_frac * diameter;

  json doc;
  doc["n_side"] = a.n_side;
  doc["K"] = grid.size();
  doc["sigma_frac"] = a.sigma_frac;
  doc["diameter"] = diameter;
  doc["sigma"] = sigma;
  doc["symmetries"] = sym.size();
  json instances = json::array();
  for (const SceneGtRecord &rec : records) {
    if (a.obj_id > 0 && rec.obj_id != a.obj_id) continue;
    const RotationSoftLabels lab = rotation_soft_labels(rec.gt, grid, mesh, sym, sigma);
    json inst;
    inst["im_id"] = rec.im_id;
    inst["gt_index"] = rec.gt_index;
    inst["obj_id"] = rec.obj_id;
    inst["hard_label"] = hard_label(lab);
    inst["labels"] = std::vector<double>(lab.values.begin(), lab.values.end());
    instances.push_back(std::move(inst));
  }
  doc["instances"] = std::move(instances);
  emit(a.out, doc.dump() + "\n", out);
}

// eval ---------------------------------------------------------------------

struct EvalArgs {
  std::string results, gt, camera, models, out;
  std::string metrics = "vsd,mssd,mspd";
  int jobs = 0;
};

const std::set<std::string> kMetricNames{"vsd", "mssd", "mspd", "add", "adds", "auc"};

/// ADD / ADD-S threshold as a fraction of the diameter, and the AUC range in mm.
constexpr double kAddFraction = 0.1;
constexpr double kAucMaxMm = 100.0;

std::set<std::string> parse_metrics(const std::string &list) {
  std::set<std::string> out;
  for (const auto &m : split(list, ',')) {
    if (!kMetricNames.count(m)) throw UsageError("--metrics: unknown metric '" + m + "'");
    out.insert(m);
  }
  return out;
}

/// The numeric directory holding scene_gt.json; otherwise the only scene in
/// the results.
int infer_scene_id(const fs::path &gt, const std::vector<ResultRow> &rows) {
  const std::string dir = fs::absolute(gt).parent_path().filename().string();
  if (!dir.empty() && std::all_of(dir.begin(), dir.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::stoi(dir);
  }
  std::set<int> scenes;
  for (const auto &r : rows) scenes.insert(r.scene_id);
  if (scenes.size() > 1) {
    throw Error(Errc::ParseError, "results cover several scenes and " + gt.string() +
                                      " is not inside a numeric scene directory");
  }
  return scenes.empty() ? 0 : *scenes.begin();
}

fs::path find_model(const fs::path &dir, int obj_id) {
  char name[32];
  std::snprintf(name, sizeof(name), "obj_%06d", obj_id);
  for (const std::string &stem : {std::string(name), "obj_" + std::to_string(obj_id)}) {
    for (const char *ext : {".ply", ".obj"}) {
      const fs::path p = dir / (stem + ext);
      if (fs::is_regular_file(p)) return p;
    }
  }
  throw Error(Errc::MissingAsset, "no mesh for obj_id " + std::to_string(obj_id) + " in " + dir.string());
}

std::vector<EvalRecord> match_records(const std::vector<ResultRow> &rows,
                                      const std::vector<SceneGtRecord> &gts, int scene_id,
                                      const std::map<int, std::shared_ptr<const ObjectModel>> &models) {
  std::map<std::pair<int, int>, std::vector<const ResultRow *>> candidates;
  for (const ResultRow &r : rows) {
    if (r.scene_id == scene_id) candidates[{r.im_id, r.obj_id}].push_back(&r);
  }
  for (auto &[key, list] : candidates) {
    std::stable_sort(list.begin(), list.end(),
                     [](const ResultRow *a, const ResultRow *b) { return a->score > b->score; });
  }
  std::map<std::pair<int, int>, std::size_t> used;
  std::vector<EvalRecord> records;
  for (const SceneGtRecord &g : gts) {
    EvalRecord rec;
    rec.scene_id = scene_id;
    rec.im_id = g.im_id;
    rec.obj_id = g.obj_id;
    rec.gt = g.gt;
    rec.camera = g.camera;
    rec.model = models.at(g.obj_id);
    const std::pair<int, int> key{g.im_id, g.obj_id};
    const auto it = candidates.find(key);
    std::size_t &next = used[key];
    if (it != candidates.end() && next < it->second.size()) {
      const ResultRow *r = it->second[next++];
      rec.estimate = r->pose();
      rec.score = r->score;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

json metric_json(const MetricRecall &m, const std::vector<double> &thresholds) {
  json j;
  j["thresholds"] = thresholds;
  j["recall"] = m.recall;
  j["average"] = m.average;
  return j;
}

struct AddSummary {
  std::vector<double> errors;
  std::vector<double> thresholds;
  std::vector<int> obj_ids;
};

double add_recall(const AddSummary &s, int obj_id) {
  std::size_t n = 0, hit = 0;
  for (std::size_t i = 0; i < s.errors.size(); ++i) {
    if (obj_id != 0 && s.obj_ids[i] != obj_id) continue;
    ++n;
    if (s.errors[i] < s.thresholds[i]) ++hit;
  }
  return n ? static_cast<double>(hit) / static_cast<double>(n) : 0.0;
}

void evaluate(const EvalArgs &a, std::ostream &out) {
  const std::set<std::string> metrics = parse_metrics(a.metrics);
  const int jobs = resolve_jobs(a.jobs);

  const std::vector<ResultRow> rows = read_results(a.results);
  const std::vector<SceneGtRecord> gts = read_scene_gt(a.gt, a.camera);
  const int scene_id = infer_scene_id(a.gt, rows);

  const fs::path info_path = fs::path(a.models) / "models_info.json";
  const auto info = fs::is_regular_file(info_path) ? load_models_info(info_path)
                                                   : std::map<int, ModelInfo>{};
  std::map<int, std::shared_ptr<const ObjectModel>> models;
  for (const SceneGtRecord &g : gts) {
    if (models.count(g.obj_id)) continue;
    auto m = std::make_shared<ObjectModel>();
    m->obj_id = g.obj_id;
    m->mesh = load_mesh(find_model(a.models, g.obj_id));
    if (const auto it = info.find(g.obj_id); it != info.end() && it->second.diameter > 0.0) {
      m->diameter = it->second.diameter;
      m->symmetries = it->second.symmetries;
    } else {
      m->diameter = object_diameter(m->mesh);
    }
    models[g.obj_id] = std::move(m);
  }

  std::vector<EvalRecord> records = match_records(rows, gts, scene_id, models);
  if (records.empty()) throw Error(Errc::EmptyInput, a.gt + " lists no object instances");

  json doc;
  doc["scene_id"] = scene_id;
  doc["instances"] = records.size();
  std::ostringstream csv;
  csv << "metric,obj_id,tau,threshold,value\n";
  auto row = [&csv](const std::string &metric, const std::string &obj, const std::string &tau,
                    const std::string &thr, double value) {
    csv << metric << ',' << obj << ',' << tau << ',' << thr << ',' << format_number(value) << '\n';
  };

  const bool bop = metrics.count("vsd") || metrics.count("mssd") || metrics.count("mspd");
  if (bop) {
    const RecallReport rep = average_recall(records, RecallConfig::bop19(), jobs);
    const RecallConfig &c = rep.config;
    const bool all_three = metrics.count("vsd") && metrics.count("mssd") && metrics.count("mspd");
    if (all_three) {
      doc["ar"] = rep.ar;
      row("ar", "all", "", "", rep.ar);
    }
    if (metrics.count("vsd")) {
      json v = metric_json(rep.vsd, c.vsd_thresholds);
      v["tau_fractions"] = c.vsd_tau_fractions;
      doc["vsd"] = std::move(v);
      const std::size_t n_thr = c.vsd_thresholds.size();
      for (std::size_t t = 0; t < c.vsd_tau_fractions.size(); ++t) {
        for (std::size_t k = 0; k < n_thr; ++k) {
          row("vsd", "all", format_number(c.vsd_tau_fractions[t]), format_number(c.vsd_thresholds[k]),
              rep.vsd.recall[t * n_thr + k]);
        }
      }
      row("ar_vsd", "all", "", "", rep.ar_vsd);
    }
    if (metrics.count("mssd")) {
      doc["mssd"] = metric_json(rep.mssd, c.mssd_fractions);
      for (std::size_t k = 0; k < c.mssd_fractions.size(); ++k) {
        row("mssd", "all", "", format_number(c.mssd_fractions[k]), rep.mssd.recall[k]);
      }
      row("ar_mssd", "all", "", "", rep.ar_mssd);
    }
    if (metrics.count("mspd")) {
      doc["mspd"] = metric_json(rep.mspd, c.mspd_pixels);
      for (std::size_t k = 0; k < c.mspd_pixels.size(); ++k) {
        row("mspd", "all", "", format_number(c.mspd_pixels[k]), rep.mspd.recall[k]);
      }
      row("ar_mspd", "all", "", "", rep.ar_mspd);
    }
    json per = json::object();
    for (const auto &[obj, r] : rep.per_object) {
      json o;
      o["instances"] = r.instances;
      const std::string id = std::to_string(obj);
      if (all_three) {
        o["ar"] = r.ar;
        row("ar", id, "", "", r.ar);
      }
      if (metrics.count("vsd")) {
        o["ar_vsd"] = r.ar_vsd;
        row("ar_vsd", id, "", "", r.ar_vsd);
      }
      if (metrics.count("mssd")) {
        o["ar_mssd"] = r.ar_mssd;
        row("ar_mssd", id, "", "", r.ar_mssd);
      }
      if (metrics.count("mspd")) {
        o["ar_mspd"] = r.ar_mspd;
        row("ar_mspd", id, "", "", r.ar_mspd);
      }
      per[id] = std::move(o);
    }
    doc["per_object"] = std::move(per);
  }

  const bool want_add = metrics.count("add") || metrics.count("auc");
  const bool want_adds = metrics.count("adds") || metrics.count("auc");
  AddSummary add, adds;
  for (const EvalRecord &r : records) {
    const double inf = std::numeric_limits<double>::infinity();
    const double thr = kAddFraction * r.model->diameter;
    if (want_add) {
      add.errors.push_back(r.estimate ? add_adds(*r.estimate, r.gt, r.model->mesh, false) : inf);
      add.thresholds.push_back(thr);
      add.obj_ids.push_back(r.obj_id);
    }
    if (want_adds) {
      adds.errors.push_back(r.estimate ? add_adds(*r.estimate, r.gt, r.model->mesh, true) : inf);
      adds.thresholds.push_back(thr);
      adds.obj_ids.push_back(r.obj_id);
    }
  }
  for (const auto &[name, s] : {std::pair<std::string, const AddSummary *>{"add", &add}, {"adds", &adds}}) {
    if (!metrics.count(name)) continue;
    json j;
    j["diameter_fraction"] = kAddFraction;
    j["recall"] = add_recall(*s, 0);
    row(name, "all", "", format_number(kAddFraction), j["recall"].get<double>());
    json per = json::object();
    for (const auto &[obj, m] : models) {
      per[std::to_string(obj)] = add_recall(*s, obj);
      row(name, std::to_string(obj), "", format_number(kAddFraction), add_recall(*s, obj));
    }
    j["per_object"] = std::move(per);
    doc[name] = std::move(j);
  }
  if (metrics.count("auc")) {
    json j;
    j["max_threshold_mm"] = kAucMaxMm;
    j["add"] = auc(add.errors, kAucMaxMm);
    j["adds"] = auc(adds.errors, kAucMaxMm);
    row("auc_add", "all", "", format_number(kAucMaxMm), j["add"].get<double>());
    row("auc_adds", "all", "", format_number(kAucMaxMm), j["adds"].get<double>());
    doc["auc"] = std::move(j);
  }

  const std::string text = doc.dump(2) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    emit(a.out + ".json", text, out);
    emit(a.out + ".csv", csv.str(), out);
  }
}

// render -------------------------------------------------------------------

struct RenderArgs {
  std::string mesh, pose, cam, size, out;
};

/// Largest accepted deviation of the --pose quaternion from unit norm.
constexpr double kUnitNormTolerance = 1e-6;

void render(const RenderArgs &a) {
  const auto p = numbers(a.pose, 7, "--pose");
  const double qn = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
  if (std::abs(qn - 1.0) > kUnitNormTolerance) {
    throw UsageError("--pose: quaternion norm is " + format_number(qn) + ", expected 1");
  }
  const auto k = numbers(a.cam, 4, "--cam");
  const auto wh = dims(a.size, 2, "--size");
  CameraIntrinsics cam;
  cam.fx = k[0];
  cam.fy = k[1];
  cam.cx = k[2];
  cam.cy = k[3];
  cam.width = wh[0];
  cam.height = wh[1];
  if (!(cam.fx > 0.0) || !(cam.fy > 0.0)) throw UsageError("--cam: focal lengths must be positive");

  const Mesh mesh = load_mesh(a.mesh);
  const Posed pose{Rotationd::from_quaternion(p[0], p[1], p[2], p[3]), {p[4], p[5], p[6]}};
  write_depth_png(a.out, rasterize(mesh, pose, cam).depth);
}

// corrbench ----------------------------------------------------------------

struct CorrbenchArgs {
  std::string shape;
  int window = 0;
  std::string impl = "all";
  int reps = 3;
  unsigned seed = 7;
  std::string out;
};

void corrbench(const CorrbenchArgs &a, std::ostream &out) {
  const auto s = dims(a.shape, 3, "--shape");
  const int d = s[0], H = s[1], W = s[2];
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  FeatureVolume<double> fs(d, H, W), fr(d, H, W);
  for (auto *v : {&fs, &fr}) {
    for (Eigen::Index i = 0; i < v->data.size(); ++i) v->data.data()[i] = uni(rng);
  }

  using Kernel = CorrelationVolume<double> (*)(const FeatureVolume<double> &,
                                               const FeatureVolume<double> &, int);
  std::vector<std::pair<std::string, Kernel>> impls;
  if (a.impl == "all" || a.impl == "optimized") impls.emplace_back("optimized", &corr_volume<double>);
  if (a.impl == "all" || a.impl == "reference") impls.emplace_back("reference", &corr_volume_reference<double>);

  std::ostringstream csv;
  csv << "d,H,W,window,impl,ns_per_output_element,checksum\n";
  for (const auto &[name, fn] : impls) {
    double best = std::numeric_limits<double>::infinity();
    double checksum = 0.0;
    for (int r = 0; r < a.reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const CorrelationVolume<double> c = fn(fs, fr, a.window);
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double, std::nano>(t1 - t0).count());
      checksum = c.volume.data.sum();
    }
    const double elements = static_cast<double>(a.window) * a.window * H * W;
    char ns[32];
    std::snprintf(ns, sizeof(ns), "%.3f", best / elements);
    csv << d << ',' << H << ',' << W << ',' << a.window << ',' << name << ',' << ns << ','
        << format_number(checksum) << '\n';
  }
  emit(a.out, csv.str(), out);
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Rotation grids, soft labels, pose evaluation, depth rendering and correlation benchmarks.",
               "posekit"};
  app.require_subcommand(1, 1);

  GridgenArgs ga;
  auto *gridgen_cmd = app.add_subcommand("gridgen", "Write the SO(3) prototype grid");
  gridgen_cmd->add_option("--n-side", ga.n_side, "HEALPix resolution")->required()->check(CLI::Range(1, 64));
  gridgen_cmd->add_option("--out", ga.out, "Output file (default: stdout)")->check(kWritable);

  LabelsArgs la;
  auto *labels_cmd = app.add_subcommand("labels", "Rotation soft labels for every ground-truth instance");
  labels_cmd->add_option("--gt", la.gt, "scene_gt.json")->required()->check(CLI::ExistingFile);
  labels_cmd->add_option("--mesh", la.mesh, "Object mesh (PLY or OBJ)")->required()->check(CLI::ExistingFile);
  labels_cmd->add_option("--symm", la.symm, "Symmetry JSON")->required()->check(CLI::ExistingFile);
  labels_cmd->add_option("--n-side", la.n_side, "HEALPix resolution")->required()->check(CLI::Range(1, 16));
  labels_cmd->add_option("--sigma-frac", la.sigma_frac, "Kernel width as a fraction of the diameter")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  labels_cmd->add_option("--obj-id", la.obj_id, "Only label instances of this object")->check(CLI::PositiveNumber);
  labels_cmd->add_option("--out", la.out, "Output JSON (default: stdout)")->check(kWritable);

  EvalArgs ea;
  auto *eval_cmd = app.add_subcommand("eval", "BOP-style average recall of a results file");
  eval_cmd->add_option("--results", ea.results, "Results CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gt", ea.gt, "scene_gt.json")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--camera", ea.camera, "scene_camera.json")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--models", ea.models, "Directory with obj_XXXXXX.ply and models_info.json")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--metrics", ea.metrics, "Comma-separated subset of vsd,mssd,mspd,add,adds,auc")
      ->capture_default_str();
  eval_cmd->add_option("--out", ea.out, "Write PREFIX.json and PREFIX.csv (default: JSON to stdout)")
      ->check(kWritable);
  eval_cmd->add_option("--jobs", ea.jobs, "Worker threads (default: POSEKIT_JOBS or all cores)")
      ->check(CLI::PositiveNumber);

  RenderArgs ra;
  auto *render_cmd = app.add_subcommand("render", "Render a depth map to a 16-bit PNG");
  render_cmd->add_option("--mesh", ra.mesh, "Object mesh (PLY or OBJ)")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--pose", ra.pose, "\"qw qx qy qz tx ty tz\", translation in mm")->required();
  render_cmd->add_option("--cam", ra.cam, "\"fx fy cx cy\" in pixels")->required();
  render_cmd->add_option("--size", ra.size, "WxH in pixels")->required();
  render_cmd->add_option("--out", ra.out, "Output PNG, 0.1 mm per unit")->required()->check(kWritable);

  CorrbenchArgs ca;
  auto *corrbench_cmd = app.add_subcommand("corrbench", "Time the correlation kernels");
  corrbench_cmd->add_option("--shape", ca.shape, "dxHxW")->required();
  corrbench_cmd->add_option("--window", ca.window, "Odd window side length")->required();
  corrbench_cmd->add_option("--impl", ca.impl, "all, optimized or reference")
      ->capture_default_str()
      ->check(CLI::IsMember({"all", "optimized", "reference"}));
  corrbench_cmd->add_option("--reps", ca.reps, "Timed repetitions; the fastest is reported")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  corrbench_cmd->add_option("--seed", ca.seed, "Feature RNG seed")->capture_default_str();
  corrbench_cmd->add_option("--out", ca.out, "Output CSV (default: stdout)")->check(kWritable);

  auto synopsis = [&app]() {
    for (const CLI::App *sub : app.get_subcommands()) return sub->help();
    return app.help();
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << synopsis();
    return kExitUsage;
  }

  try {
    if (*gridgen_cmd) gridgen(ga, out);
    if (*labels_cmd) labels(la, out);
    if (*eval_cmd) evaluate(ea, out);
    if (*render_cmd) render(ra);
    if (*corrbench_cmd) corrbench(ca, out);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n\n" << synopsis();
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace posekit::cli
