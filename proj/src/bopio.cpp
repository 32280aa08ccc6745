#include "posekit/bopio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace posekit {
namespace {

using nlohmann::json;

json parse_json_text(const std::string &text, const std::string &name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(Errc::ParseError, name + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> numbers(const json &j, std::size_t expected, const std::string &what) {
  if (!j.is_array() || j.size() != expected) {
    throw Error(Errc::ParseError, what + ": expected " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  for (const json &v : j) {
    if (!v.is_number()) throw Error(Errc::ParseError, what + ": non-numeric entry");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(Errc::ParseError, what + ": non-finite entry");
    out.push_back(d);
  }
  return out;
}

Eigen::Matrix3d row_major_3x3(const std::vector<double> &v, std::size_t stride = 3) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = v[static_cast<std::size_t>(r) * stride + static_cast<std::size_t>(c)];
  }
  return m;
}

// Orthonormality within `tol` and det > 0, then projection onto SO(3).
Eigen::Matrix3d checked_rotation(const Eigen::Matrix3d &m, double tol, const std::string &what) {
  if (!m.allFinite()) throw Error(Errc::ParseError, what + ": non-finite rotation");
  if (orthonormality_error(m) > tol || m.determinant() <= 0.0) {
    throw Error(Errc::NonRigid, what + ": rotation is not orthonormal with det +1");
  }
  return orthonormality_error(m) > 1e-12 ? nearest_rotation(m) : m;
}

Eigen::Vector3d vec3(const std::vector<double> &v) { return {v[0], v[1], v[2]}; }

SymmetrySet symmetries_from_json(const json &j, int steps, const std::string &name) {
  SymmetrySet set;
  auto add_discrete = [&](const Eigen::Matrix3d &R, const Eigen::Vector3d &t,
                          const std::string &what) {
    const Eigen::Matrix3d r = checked_rotation(R, 1e-3, what);
    set.transforms.push_back(Posed{Rotationd::from_matrix(r), t});
  };
  auto add_continuous = [&](const json &e, const std::string &what) {
    const Eigen::Vector3d axis = vec3(numbers(e.at("axis"), 3, what + " axis"));
    const Eigen::Vector3d offset =
        e.contains("offset") ? vec3(numbers(e.at("offset"), 3, what + " offset"))
                             : Eigen::Vector3d::Zero();
    if (!(axis.norm() > 0.0)) throw Error(Errc::ParseError, what + ": zero-length axis");
    for (const Posed &p : discretize_continuous_symmetry(axis, offset, steps)) {
      set.transforms.push_back(p);
    }
  };

  try {
    if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) {
        const json &e = j[i];
        const std::string what = name + " entry " + std::to_string(i);
        if (!e.is_object()) throw Error(Errc::ParseError, what + ": expected an object");
        if (e.contains("axis")) {
          add_continuous(e, what);
        } else {
          const Eigen::Matrix3d R = row_major_3x3(numbers(e.at("R"), 9, what + " R"));
          const Eigen::Vector3d t = e.contains("t") ? vec3(numbers(e.at("t"), 3, what + " t"))
                                                    : Eigen::Vector3d::Zero();
          add_discrete(R, t, what);
        }
      }
    } else if (j.is_object()) {
      if (j.contains("symmetries_discrete")) {
        const json &list = j.at("symmetries_discrete");
        for (std::size_t i = 0; i < list.size(); ++i) {
          const std::string what = name + " symmetries_discrete " + std::to_string(i);
          const auto m = numbers(list[i], 16, what);
          add_discrete(row_major_3x3(m, 4), Eigen::Vector3d(m[3], m[7], m[11]), what);
        }
      }
      if (j.contains("symmetries_continuous")) {
        const json &list = j.at("symmetries_continuous");
        for (std::size_t i = 0; i < list.size(); ++i) {
          add_continuous(list[i], name + " symmetries_continuous " + std::to_string(i));
        }
      }
    } else {
      throw Error(Errc::ParseError, name + ": expected a list or an object");
    }
  } catch (const json::exception &e) {
    throw Error(Errc::ParseError, name + ": " + e.what());
  }
  return set;
}

int parse_int(const std::string &s, const std::string &where) {
  char *end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || v < 0 || v > 2147483647L) {
    throw Error(Errc::ParseError, where + ": bad nonnegative integer '" + s + "'");
  }
  return static_cast<int>(v);
}

double parse_double(const std::string &s, const std::string &where) {
  char *end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(Errc::ParseError, where + ": bad number '" + s + "'");
  }
  if (!std::isfinite(v)) throw Error(Errc::ParseError, where + ": non-finite number '" + s + "'");
  return v;
}

std::vector<double> parse_cell(const std::string &cell, std::size_t expected,
                               const std::string &where) {
  std::istringstream ss(cell);
  std::vector<double> out;
  for (std::string tok; ss >> tok;) out.push_back(parse_double(tok, where));
  if (out.size() != expected) {
    throw Error(Errc::FieldCount, where + ": expected " + std::to_string(expected) +
                                      " values, got " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

SymmetrySet parse_symmetries(const std::string &json_text, int continuous_steps) {
  return symmetries_from_json(parse_json_text(json_text, "<symmetries>"), continuous_steps,
                              "<symmetries>");
}

SymmetrySet load_symmetries(const std::filesystem::path &path, int continuous_steps) {
  return symmetries_from_json(parse_json_text(read_file(path), path.string()),
                              continuous_steps, path.string());
}

std::map<int, ModelInfo> load_models_info(const std::filesystem::path &path,
                                          int continuous_steps) {
  const json j = parse_json_text(read_file(path), path.string());
  if (!j.is_object()) throw Error(Errc::ParseError, path.string() + ": expected an object");
  std::map<int, ModelInfo> out;
  for (const auto &[key, entry] : j.items()) {
    const std::string what = path.string() + " object " + key;
    ModelInfo info;
    if (entry.contains("diameter")) info.diameter = numbers(json::array({entry.at("diameter")}), 1, what)[0];
    info.symmetries = symmetries_from_json(entry, continuous_steps, what);
    out[parse_int(key, what)] = std::move(info);
  }
  return out;
}

std::vector<ResultRow> parse_results(std::istream &in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = "results line " + std::to_string(line_no);
    if (!header) {
      if (line != kResultsHeader) {
        throw Error(Errc::ParseError, where + ": expected header '" + std::string(kResultsHeader) + "'");
      }
      header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1) {
      fields.push_back(line.substr(start, pos - start));
    }
    fields.push_back(line.substr(start));
    if (fields.size() != 7) {
      throw Error(Errc::FieldCount, where + ": expected 7 fields, got " + std::to_string(fields.size()));
    }
    ResultRow row;
    row.scene_id = parse_int(fields[0], where);
    row.im_id = parse_int(fields[1], where);
    row.obj_id = parse_int(fields[2], where);
    row.score = parse_double(fields[3], where);
    row.R = checked_rotation(row_major_3x3(parse_cell(fields[4], 9, where + " R")), 1e-4, where);
    row.t = vec3(parse_cell(fields[5], 3, where + " t"));
    row.time = parse_double(fields[6], where);
    rows.push_back(row);
  }
  if (!header) throw Error(Errc::ParseError, "results file has no header");
  return rows;
}

std::vector<ResultRow> read_results(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  return parse_results(in);
}

void format_results(std::ostream &out, const std::vector<ResultRow> &rows) {
  out << kResultsHeader << '\n';
  for (const ResultRow &r : rows) {
    out << r.scene_id << ',' << r.im_id << ',' << r.obj_id << ',' << format_number(r.score) << ',';
    for (int i = 0; i < 9; ++i) out << (i ? " " : "") << format_number(r.R(i / 3, i % 3));
    out << ',';
    for (int i = 0; i < 3; ++i) out << (i ? " " : "") << format_number(r.t[i]);
    out << ',' << format_number(r.time) << '\n';
  }
}

void write_results(const std::filesystem::path &path, const std::vector<ResultRow> &rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path.string());
  format_results(out, rows);
}

namespace {

std::vector<SceneGtRecord> scene_records(const std::filesystem::path &scene_gt, const json *cams,
                                         const std::string &camera_name) {
  const json gt = parse_json_text(read_file(scene_gt), scene_gt.string());
  if (!gt.is_object()) throw Error(Errc::ParseError, scene_gt.string() + " must be a JSON object");

  std::map<int, const json *> images;
  for (const auto &[key, value] : gt.items()) {
    images[parse_int(key, scene_gt.string() + " key")] = &value;
  }

  std::vector<SceneGtRecord> out;
  try {
    for (const auto &[im_id, instances] : images) {
      const std::string key = std::to_string(im_id);
      const std::string where = scene_gt.string() + " image " + key;
      CameraIntrinsics cam;
      if (cams) {
        if (!cams->contains(key)) {
          throw Error(Errc::MissingCamera, "image " + key + " has no entry in " + camera_name);
        }
        const json &cam_entry = cams->at(key);
        const auto K = numbers(cam_entry.at("cam_K"), 9, where + " cam_K");
        cam.fx = K[0];
        cam.cx = K[2];
        cam.fy = K[4];
        cam.cy = K[5];
        if (cam_entry.contains("width")) cam.width = cam_entry.at("width").get<int>();
        if (cam_entry.contains("height")) cam.height = cam_entry.at("height").get<int>();
        try {
          cam.validate();
        } catch (const Error &e) {
          throw Error(Errc::ParseError, where + ": " + e.what());
        }
      }

      if (!instances->is_array()) throw Error(Errc::ParseError, where + ": expected a list");
      for (std::size_t i = 0; i < instances->size(); ++i) {
        const json &inst = (*instances)[i];
        const std::string what = where + " instance " + std::to_string(i);
        SceneGtRecord rec;
        rec.im_id = im_id;
        rec.gt_index = static_cast<int>(i);
        rec.obj_id = inst.at("obj_id").get<int>();
        const Eigen::Matrix3d R =
            checked_rotation(row_major_3x3(numbers(inst.at("cam_R_m2c"), 9, what)), 1e-4, what);
        rec.gt = Posed{Rotationd::from_matrix(R), vec3(numbers(inst.at("cam_t_m2c"), 3, what))};
        rec.camera = cam;
        out.push_back(rec);
      }
    }
  } catch (const json::exception &e) {
    throw Error(Errc::ParseError, scene_gt.string() + ": " + e.what());
  }
  return out;
}

}  // namespace

std::vector<SceneGtRecord> read_scene_gt(const std::filesystem::path &scene_gt,
                                         const std::filesystem::path &scene_camera) {
  const json cams = parse_json_text(read_file(scene_camera), scene_camera.string());
  if (!cams.is_object()) throw Error(Errc::ParseError, scene_camera.string() + " must be a JSON object");
  return scene_records(scene_gt, &cams, scene_camera.string());
}

std::vector<SceneGtRecord> read_scene_gt(const std::filesystem::path &scene_gt) {
  return scene_records(scene_gt, nullptr, {});
}

}  // namespace posekit
