// Copyright 2026 The Handgrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "handgrasp/mesh_io.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace handgrasp {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary PLY/grid IO assumes a little-endian host");

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

PlyType ParsePlyType(const std::string& name) {
  if (name == "char" || name == "int8") return PlyType::kInt8;
  if (name == "uchar" || name == "uint8") return PlyType::kUint8;
  if (name == "short" || name == "int16") return PlyType::kInt16;
  if (name == "ushort" || name == "uint16") return PlyType::kUint16;
  if (name == "int" || name == "int32") return PlyType::kInt32;
  if (name == "uint" || name == "uint32") return PlyType::kUint32;
  if (name == "float" || name == "float32") return PlyType::kFloat32;
  if (name == "double" || name == "float64") return PlyType::kFloat64;
  throw InputError("unknown PLY property type '" + name + "'");
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
  std::string name;
  long long count = 0;
  std::vector<PlyProperty> properties;
};

template <typename T>
T ReadRaw(std::istream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw InputError("unexpected end of binary PLY data");
  return value;
}

double ReadBinary(std::istream& in, PlyType t) {
  switch (t) {
    case PlyType::kInt8:
      return ReadRaw<int8_t>(in);
    case PlyType::kUint8:
      return ReadRaw<uint8_t>(in);
    case PlyType::kInt16:
      return ReadRaw<int16_t>(in);
    case PlyType::kUint16:
      return ReadRaw<uint16_t>(in);
    case PlyType::kInt32:
      return ReadRaw<int32_t>(in);
    case PlyType::kUint32:
      return ReadRaw<uint32_t>(in);
    case PlyType::kFloat32:
      return ReadRaw<float>(in);
    case PlyType::kFloat64:
      return ReadRaw<double>(in);
  }
  return 0.0;
}

class ValueReader {
 public:
  ValueReader(std::istream& in, bool binary) : in_(in), binary_(binary) {}

  void BeginRecord() {
    if (binary_) return;
    std::string line;
    do {
      if (!std::getline(in_, line)) {
        throw InputError("unexpected end of ASCII PLY data");
      }
    } while (line.find_first_not_of(" \t\r") == std::string::npos);
    tokens_.clear();
    tokens_.str(line);
  }

  double Next(PlyType t) {
    if (binary_) return ReadBinary(in_, t);
    double v;
    if (!(tokens_ >> v)) throw InputError("malformed ASCII PLY record");
    return v;
  }

 private:
  std::istream& in_;
  bool binary_;
  std::istringstream tokens_;
};

void AppendPolygon(const std::vector<int>& poly, std::vector<Face>* faces) {
  for (size_t i = 1; i + 1 < poly.size(); ++i) {
    faces->push_back({poly[0], poly[i], poly[i + 1]});
  }
}

PlyData ParseObj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  PlyData data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x() >> p.y() >> p.z())) {
        throw InputError(path.string() + ":" + std::to_string(line_no) +
                         ": malformed vertex");
      }
      data.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      while (ss >> token) {
        int idx = 0;
        try {
          idx = std::stoi(token.substr(0, token.find('/')));
        } catch (const std::exception&) {
          throw InputError(path.string() + ":" + std::to_string(line_no) +
                           ": malformed face index '" + token + "'");
        }
        // OBJ is 1-based; negative indices count back from the end.
        int n = static_cast<int>(data.vertices.size());
        poly.push_back(idx > 0 ? idx - 1 : n + idx);
      }
      if (poly.size() < 3) {
        throw InputError(path.string() + ":" + std::to_string(line_no) +
                         ": face with fewer than 3 vertices");
      }
      AppendPolygon(poly, &data.faces);
    }
  }
  return data;
}

}  // namespace

PlyData ReadPly(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw InputError(path.string() + ": missing 'ply' magic");
  }
  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  while (true) {
    if (!std::getline(in, line)) {
      throw InputError(path.string() + ": header not terminated");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info" || key.empty()) continue;
    if (key == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw InputError(path.string() + ": unsupported PLY format '" + fmt + "'");
      }
      have_format = true;
    } else if (key == "element") {
      PlyElement e;
      if (!(ss >> e.name >> e.count) || e.count < 0) {
        throw InputError(path.string() + ": malformed element line");
      }
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) {
        throw InputError(path.string() + ": property before element");
      }
      PlyProperty p;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ss >> count_type >> item_type >> p.name;
        p.is_list = true;
        p.count_type = ParsePlyType(count_type);
        p.type = ParsePlyType(item_type);
      } else {
        p.type = ParsePlyType(type);
        ss >> p.name;
      }
      if (p.name.empty()) throw InputError(path.string() + ": unnamed property");
      elements.back().properties.push_back(p);
    } else {
      throw InputError(path.string() + ": unexpected header line '" + line + "'");
    }
  }
  if (!have_format) throw InputError(path.string() + ": missing format line");

  PlyData data;
  ValueReader reader(in, binary);
  for (const PlyElement& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    if (is_vertex) {
      for (const PlyProperty& p : e.properties) {
        if (!p.is_list && p.name != "x" && p.name != "y" && p.name != "z") {
          data.vertex_properties[p.name].reserve(e.count);
        }
      }
    }
    for (long long i = 0; i < e.count; ++i) {
      reader.BeginRecord();
      Vec3 pos = Vec3::Zero();
      int coords = 0;
      for (const PlyProperty& p : e.properties) {
        if (p.is_list) {
          int n = static_cast<int>(reader.Next(p.count_type));
          std::vector<int> poly(n);
          for (int k = 0; k < n; ++k) poly[k] = static_cast<int>(reader.Next(p.type));
          if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) {
            if (n < 3) throw InputError(path.string() + ": face with < 3 vertices");
            AppendPolygon(poly, &data.faces);
          }
          continue;
        }
        double v = reader.Next(p.type);
        if (!is_vertex) continue;
        if (p.name == "x") {
          pos.x() = v;
          ++coords;
        } else if (p.name == "y") {
          pos.y() = v;
          ++coords;
        } else if (p.name == "z") {
          pos.z() = v;
          ++coords;
        } else {
          data.vertex_properties[p.name].push_back(v);
        }
      }
      if (is_vertex) {
        if (coords != 3) throw InputError(path.string() + ": vertex lacks x/y/z");
        data.vertices.push_back(pos);
      }
    }
  }
  return data;
}

Mesh LoadMesh(const std::filesystem::path& path, MeshStats* stats) {
  std::string ext = Lower(path.extension().string());
  PlyData data;
  if (ext == ".obj") {
    data = ParseObj(path);
  } else if (ext == ".ply") {
    data = ReadPly(path);
  } else {
    throw InputError("unsupported mesh extension '" + ext + "' (" +
                     path.string() + ")");
  }
  return Mesh::Build(std::move(data.vertices), std::move(data.faces), stats);
}

std::pair<Mesh, std::vector<double>> LoadPlyWithScalar(
    const std::filesystem::path& path, const std::string& property) {
  PlyData data = ReadPly(path);
  const std::string name = property.empty() ? "quality" : property;
  auto it = data.vertex_properties.find(name);
  if (it == data.vertex_properties.end()) {
    throw InputError(path.string() + ": no vertex property '" + name + "'");
  }
  std::vector<double> values = std::move(it->second);
  Mesh mesh = Mesh::Build(std::move(data.vertices), std::move(data.faces));
  return {std::move(mesh), std::move(values)};
}

void WriteObj(std::ostream& out, const std::vector<NamedMesh>& meshes) {
  out << std::setprecision(9);
  int base = 1;
  for (const NamedMesh& m : meshes) {
    out << "o " << m.name << "\n";
    for (const Vec3& v : m.mesh.vertices()) {
      out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
    }
    for (const Face& f : m.mesh.faces()) {
      out << "f " << f[0] + base << " " << f[1] + base << " " << f[2] + base << "\n";
    }
    base += m.mesh.num_vertices();
  }
}

void WriteObj(const std::filesystem::path& path,
              const std::vector<NamedMesh>& meshes) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  WriteObj(out, meshes);
}

void WritePly(const std::filesystem::path& path, const Mesh& mesh, bool binary,
              const std::string& property_name,
              const std::vector<double>& property_values) {
  const bool with_property = !property_name.empty();
  if (with_property &&
      property_values.size() != static_cast<size_t>(mesh.num_vertices())) {
    throw InputError("property value count does not match vertex count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
      << "element vertex " << mesh.num_vertices() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (with_property) out << "property float " << property_name << "\n";
  out << "element face " << mesh.num_faces() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  const auto& verts = mesh.vertices();
  if (binary) {
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      out.write(reinterpret_cast<const char*>(verts[i].data()), 3 * sizeof(double));
      if (with_property) {
        float v = static_cast<float>(property_values[i]);
        out.write(reinterpret_cast<const char*>(&v), sizeof(float));
      }
    }
    for (const Face& f : mesh.faces()) {
      uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      for (int idx : f) {
        int32_t v = idx;
        out.write(reinterpret_cast<const char*>(&v), sizeof(int32_t));
      }
    }
  } else {
    out << std::setprecision(17);
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      out << verts[i].x() << " " << verts[i].y() << " " << verts[i].z();
      if (with_property) out << " " << static_cast<float>(property_values[i]);
      out << "\n";
    }
    for (const Face& f : mesh.faces()) {
      out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    }
  }
  if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace handgrasp
