#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "posekit/bopio.hpp"

namespace posekit {
namespace {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

PlyType parse_ply_type(const std::string &s, const std::string &where) {
  if (s == "char" || s == "int8") return PlyType::Int8;
  if (s == "uchar" || s == "uint8") return PlyType::UInt8;
  if (s == "short" || s == "int16") return PlyType::Int16;
  if (s == "ushort" || s == "uint16") return PlyType::UInt16;
  if (s == "int" || s == "int32") return PlyType::Int32;
  if (s == "uint" || s == "uint32") return PlyType::UInt32;
  if (s == "float" || s == "float32") return PlyType::Float32;
  if (s == "double" || s == "float64") return PlyType::Float64;
  throw Error(Errc::ParseError, where + ": unknown PLY type '" + s + "'");
}

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

// Sequential little-endian reader over the binary body.
class ByteReader {
 public:
  ByteReader(std::istream &in, std::size_t offset, std::string name)
      : in_{in}, offset_{offset}, name_{std::move(name)} {}

  double read(PlyType t, const std::string &element) {
    unsigned char buf[8];
    const std::size_t n = type_size(t);
    in_.read(reinterpret_cast<char *>(buf), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error(Errc::ParseError, name_ + ": truncated binary PLY in element '" + element +
                                        "' at byte " + std::to_string(offset_));
    }
    offset_ += n;
    std::uint64_t raw = 0;
    for (std::size_t i = 0; i < n; ++i) raw |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    switch (t) {
      case PlyType::Int8: return static_cast<std::int8_t>(raw);
      case PlyType::UInt8: return static_cast<std::uint8_t>(raw);
      case PlyType::Int16: return static_cast<std::int16_t>(raw);
      case PlyType::UInt16: return static_cast<std::uint16_t>(raw);
      case PlyType::Int32: return static_cast<std::int32_t>(raw);
      case PlyType::UInt32: return static_cast<std::uint32_t>(raw);
      case PlyType::Float32: {
        const auto bits = static_cast<std::uint32_t>(raw);
        float f;
        std::memcpy(&f, &bits, sizeof f);
        return f;
      }
      case PlyType::Float64: {
        double d;
        std::memcpy(&d, &raw, sizeof d);
        return d;
      }
    }
    return 0.0;
  }

  std::size_t offset() const { return offset_; }

 private:
  std::istream &in_;
  std::size_t offset_;
  std::string name_;
};

// Collects vertices and polygon faces, then fan-triangulates.
struct MeshBuilder {
  std::vector<double> coords;
  std::vector<int> tris;

  void add_polygon(const std::vector<long long> &idx, const std::string &where) {
    if (idx.size() < 3) throw Error(Errc::ParseError, where + ": face with fewer than 3 vertices");
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
      for (long long v : {idx[0], idx[k], idx[k + 1]}) tris.push_back(static_cast<int>(v));
    }
  }

  Mesh finish(const std::string &name) const {
    Mesh m;
    m.vertices = Eigen::Map<const Eigen::Matrix3Xd>(coords.data(), 3,
                                                    static_cast<Eigen::Index>(coords.size() / 3));
    m.triangles = Eigen::Map<const Eigen::Matrix3Xi>(tris.data(), 3,
                                                     static_cast<Eigen::Index>(tris.size() / 3));
    if (m.vertices.cols() == 0) throw Error(Errc::ParseError, name + ": no vertices");
    if (m.triangles.size() > 0 &&
        (m.triangles.minCoeff() < 0 || m.triangles.maxCoeff() >= m.vertices.cols())) {
      throw Error(Errc::ParseError, name + ": face index out of range");
    }
    return m;
  }
};

double parse_ascii_number(const std::string &tok, const std::string &where) {
  char *end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw Error(Errc::ParseError, where + ": bad number '" + tok + "'");
  }
  return v;
}

void check_finite(double v, const std::string &where) {
  if (!std::isfinite(v)) throw Error(Errc::ParseError, where + ": non-finite coordinate");
}

}  // namespace

Mesh parse_ply(std::istream &in, const std::string &name) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t header_bytes = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    header_bytes += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  auto where = [&] { return name + " line " + std::to_string(line_no); };

  if (!next_line() || line != "ply") throw Error(Errc::ParseError, name + ": missing 'ply' magic");

  bool binary = false;
  std::vector<PlyElement> elements;
  bool ended = false;
  while (next_line()) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw Error(Errc::ParseError, where() + ": unsupported PLY format '" + fmt + "'");
      }
    } else if (key == "element") {
      PlyElement e;
      long long count = -1;
      ls >> e.name >> count;
      if (!ls || count < 0) throw Error(Errc::ParseError, where() + ": malformed element line");
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (key == "property") {
      if (elements.empty()) throw Error(Errc::ParseError, where() + ": property before element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        p.is_list = true;
        p.count_type = parse_ply_type(count_type, where());
        p.type = parse_ply_type(item_type, where());
      } else {
        ls >> p.name;
        p.type = parse_ply_type(type, where());
      }
      if (p.name.empty()) throw Error(Errc::ParseError, where() + ": property without a name");
      elements.back().properties.push_back(p);
    } else if (key == "end_header") {
      ended = true;
      break;
    } else if (key == "comment" || key == "obj_info" || key.empty()) {
      continue;
    } else {
      throw Error(Errc::ParseError, where() + ": unexpected header keyword '" + key + "'");
    }
  }
  if (!ended) throw Error(Errc::ParseError, name + ": header has no end_header");

  MeshBuilder builder;
  ByteReader bytes(in, header_bytes, name);
  std::vector<long long> poly;

  for (const PlyElement &e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    int ix = -1, iy = -1, iz = -1, iface = -1;
    for (std::size_t k = 0; k < e.properties.size(); ++k) {
      const auto &p = e.properties[k];
      if (is_vertex && !p.is_list) {
        if (p.name == "x") ix = static_cast<int>(k);
        if (p.name == "y") iy = static_cast<int>(k);
        if (p.name == "z") iz = static_cast<int>(k);
      }
      if (is_face && p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index")) {
        iface = static_cast<int>(k);
      }
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) {
      throw Error(Errc::ParseError, name + ": vertex element lacks x/y/z");
    }

    for (std::size_t i = 0; i < e.count; ++i) {
      double xyz[3] = {0.0, 0.0, 0.0};
      poly.clear();
      if (binary) {
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          const auto &p = e.properties[k];
          if (p.is_list) {
            const double n = bytes.read(p.count_type, e.name);
            if (n < 0) throw Error(Errc::ParseError, name + ": negative list length");
            for (long long j = 0; j < static_cast<long long>(n); ++j) {
              const double v = bytes.read(p.type, e.name);
              if (static_cast<int>(k) == iface) poly.push_back(static_cast<long long>(v));
            }
          } else {
            const double v = bytes.read(p.type, e.name);
            const int ki = static_cast<int>(k);
            if (ki == ix) xyz[0] = v;
            if (ki == iy) xyz[1] = v;
            if (ki == iz) xyz[2] = v;
          }
        }
      } else {
        if (!next_line()) {
          throw Error(Errc::ParseError, name + ": unexpected end of file in element '" + e.name +
                                            "' after line " + std::to_string(line_no));
        }
        std::istringstream ls(line);
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        std::size_t at = 0;
        auto take = [&]() -> double {
          if (at >= toks.size()) throw Error(Errc::ParseError, where() + ": too few values");
          return parse_ascii_number(toks[at++], where());
        };
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          const auto &p = e.properties[k];
          if (p.is_list) {
            const double n = take();
            if (n < 0) throw Error(Errc::ParseError, where() + ": negative list length");
            for (long long j = 0; j < static_cast<long long>(n); ++j) {
              const double v = take();
              if (static_cast<int>(k) == iface) poly.push_back(static_cast<long long>(v));
            }
          } else {
            const double v = take();
            const int ki = static_cast<int>(k);
            if (ki == ix) xyz[0] = v;
            if (ki == iy) xyz[1] = v;
            if (ki == iz) xyz[2] = v;
          }
        }
      }
      if (is_vertex) {
        const std::string loc = binary ? name + " byte " + std::to_string(bytes.offset()) : where();
        for (double c : xyz) {
          check_finite(c, loc);
          builder.coords.push_back(c);
        }
      }
      if (is_face && iface >= 0) {
        builder.add_polygon(poly, binary ? name + " byte " + std::to_string(bytes.offset()) : where());
      }
    }
  }
  return builder.finish(name);
}

Mesh parse_obj(std::istream &in, const std::string &name) {
  MeshBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  std::vector<long long> poly;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = name + " line " + std::to_string(line_no);
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "v") {
      for (int k = 0; k < 3; ++k) {
        std::string tok;
        if (!(ls >> tok)) throw Error(Errc::ParseError, where + ": vertex needs 3 coordinates");
        const double v = parse_ascii_number(tok, where);
        check_finite(v, where);
        builder.coords.push_back(v);
      }
    } else if (key == "f") {
      poly.clear();
      const auto n_vertices = static_cast<long long>(builder.coords.size() / 3);
      for (std::string tok; ls >> tok;) {
        const std::string head = tok.substr(0, tok.find('/'));
        char *end = nullptr;
        const long long idx = std::strtoll(head.c_str(), &end, 10);
        if (head.empty() || end != head.c_str() + head.size() || idx == 0) {
          throw Error(Errc::ParseError, where + ": bad face index '" + tok + "'");
        }
        poly.push_back(idx > 0 ? idx - 1 : n_vertices + idx);
      }
      builder.add_polygon(poly, where);
    }
  }
  return builder.finish(name);
}

Mesh load_mesh(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".obj") return parse_obj(in, path.string());
  return parse_ply(in, path.string());
}

}  // namespace posekit
