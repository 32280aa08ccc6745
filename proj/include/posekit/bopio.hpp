#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "posekit/geometry.hpp"
#include "posekit/mesh.hpp"

namespace posekit {

/// Default number of steps a continuous symmetry is discretized into.
inline constexpr int kContinuousSymmetrySteps = 36;

/// Reads ASCII or binary little-endian PLY (vertex x/y/z plus a face list
/// named vertex_indices or vertex_index; other properties and elements are
/// skipped) and minimal OBJ (v and f records, 1-based or negative indices).
/// Polygons are fan-triangulated. The format is chosen by extension, falling
/// back to the PLY magic. Throws ParseError with a line or byte offset.
Mesh load_mesh(const std::filesystem::path &path);
Mesh parse_ply(std::istream &in, const std::string &name = "<ply>");
Mesh parse_obj(std::istream &in, const std::string &name = "<obj>");

/// Accepts either a JSON list of {"R": 9 floats row-major, "t": 3 floats}
/// and {"axis": 3 floats, "offset": 3 floats} entries, or a BOP models_info
/// object entry with "symmetries_discrete" (16-float row-major 4x4) and
/// "symmetries_continuous". The identity is always first. Rotations that are
/// off by more than 1e-3 from orthonormal, or reflections, throw NonRigid;
/// the rest are projected onto SO(3).
SymmetrySet load_symmetries(const std::filesystem::path &path,
                            int continuous_steps = kContinuousSymmetrySteps);
SymmetrySet parse_symmetries(const std::string &json_text,
                             int continuous_steps = kContinuousSymmetrySteps);

struct ModelInfo {
  double diameter = 0.0;
  SymmetrySet symmetries;
};

/// BOP models_info.json: object id -> diameter and symmetries.
std::map<int, ModelInfo> load_models_info(const std::filesystem::path &path,
                                          int continuous_steps = kContinuousSymmetrySteps);

/// One line of a BOP results CSV.
struct ResultRow {
  int scene_id = 0;
  int im_id = 0;
  int obj_id = 0;
  double score = 0.0;
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  double time = -1.0;

  Posed pose() const { return {Rotationd::from_matrix(R), t}; }
};

inline constexpr const char *kResultsHeader = "scene_id,im_id,obj_id,score,R,t,time";

/// Header `scene_id,im_id,obj_id,score,R,t,time`; R and t cells hold
/// space-separated numbers. Rotations must be orthonormal within 1e-4
/// (NonRigid otherwise) and are projected onto SO(3). Throws ParseError or
/// FieldCount naming the 1-based line.
std::vector<ResultRow> read_results(const std::filesystem::path &path);
std::vector<ResultRow> parse_results(std::istream &in);

/// Numbers are written with 15 significant digits; identical rows give
/// identical bytes.
void write_results(const std::filesystem::path &path, const std::vector<ResultRow> &rows);
void format_results(std::ostream &out, const std::vector<ResultRow> &rows);

struct SceneGtRecord {
  int im_id = 0;
  int obj_id = 0;
  /// Position of the instance within its image's list.
  int gt_index = 0;
  Posed gt;
  CameraIntrinsics camera;
};

/// Joins scene_gt.json and scene_camera.json. Images are returned in
/// increasing id order. cam_K gives fx, fy, cx, cy; the image size comes
/// from optional "width"/"height" keys and defaults to 640 x 480.
/// Throws ParseError or MissingCamera.
std::vector<SceneGtRecord> read_scene_gt(const std::filesystem::path &scene_gt,
                                         const std::filesystem::path &scene_camera);
/// Poses only; every record carries default intrinsics.
std::vector<SceneGtRecord> read_scene_gt(const std::filesystem::path &scene_gt);

/// Shortest round-trippable-enough text for a double: %.15g with -0 as 0.
std::string format_number(double v);

}  // namespace posekit
