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

#include "handgrasp/mesh.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace handgrasp {

Mesh Mesh::Build(std::vector<Vec3> vertices, std::vector<Face> faces,
                 MeshStats* stats) {
  const int nv = static_cast<int>(vertices.size());
  for (const Vec3& v : vertices) {
    if (!v.allFinite()) throw InputError("mesh has a non-finite vertex");
  }
  Box3 box;
  for (const Vec3& v : vertices) box.extend(v);
  const double diag2 = nv > 0 ? box.diagonal().squaredNorm() : 0.0;
  // Relative threshold: exact repeats give 0, near-collinear gives ~1e-20.
  const double min_area = 1e-14 * diag2;

  Mesh mesh;
  mesh.vertices_ = std::move(vertices);
  int dropped = 0;
  for (const Face& f : faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= nv) {
        throw InputError("face index " + std::to_string(idx) +
                         " out of range [0, " + std::to_string(nv) + ")");
      }
    }
    const Vec3& a = mesh.vertices_[f[0]];
    const Vec3& b = mesh.vertices_[f[1]];
    const Vec3& c = mesh.vertices_[f[2]];
    Vec3 n = (b - a).cross(c - a);
    double twice_area = n.norm();
    if (0.5 * twice_area <= min_area || !std::isfinite(twice_area)) {
      ++dropped;
      continue;
    }
    mesh.faces_.push_back(f);
    mesh.normals_.push_back(n / twice_area);
  }
  if (mesh.faces_.empty()) throw InputError("mesh is empty after validation");
  if (stats != nullptr) stats->dropped_faces = dropped;
  return mesh;
}

double Mesh::FaceArea(int face) const {
  const Vec3& a = corner(face, 0);
  return 0.5 * (corner(face, 1) - a).cross(corner(face, 2) - a).norm();
}

double Mesh::SurfaceArea() const {
  double total = 0.0;
  for (int f = 0; f < num_faces(); ++f) total += FaceArea(f);
  return total;
}

Box3 Mesh::Bounds() const {
  Box3 box;
  for (const Face& f : faces_) {
    for (int idx : f) box.extend(vertices_[idx]);
  }
  return box;
}

bool Mesh::IsWatertight() const {
  // Directed edge (a, b) must be matched by exactly one (b, a).
  std::map<std::pair<int, int>, int> directed;
  for (const Face& f : faces_) {
    for (int e = 0; e < 3; ++e) {
      ++directed[{f[e], f[(e + 1) % 3]}];
    }
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    auto it = directed.find({edge.second, edge.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return true;
}

Mesh Mesh::Transformed(const Rigid& transform) const {
  Mesh out = *this;
  for (Vec3& v : out.vertices_) v = transform.Apply(v);
  for (Vec3& n : out.normals_) n = transform.Rotate(n).normalized();
  return out;
}

uint64_t Mesh::ContentHash() const {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < size; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const Vec3& v : vertices_) mix(v.data(), sizeof(double) * 3);
  for (const Face& f : faces_) mix(f.data(), sizeof(int) * 3);
  return h;
}

Vec3 Barycentric(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 v0 = b - a, v1 = c - a, v2 = p - a;
  double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  double d20 = v2.dot(v0), d21 = v2.dot(v1);
  double denom = d00 * d11 - d01 * d01;
  double v = (d11 * d20 - d01 * d21) / denom;
  double w = (d00 * d21 - d01 * d20) / denom;
  return {1.0 - v - w, v, w};
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 ClosestPointOnTriangle(const Vec3& p, const Vec3& a, const Vec3& b,
                            const Vec3& c) {
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  Vec3 bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return a + (d1 / (d1 - d3)) * ab;
  }
  Vec3 cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return a + (d2 / (d2 - d6)) * ac;
  }
  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

Mesh MakeIcosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t},  {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10},
                         {0, 10, 11}, {1, 5, 9},  {5, 11, 4},  {11, 10, 2},
                         {10, 7, 6}, {7, 1, 8},   {3, 9, 4},   {3, 4, 2},
                         {3, 2, 6},  {3, 6, 8},   {3, 8, 9},   {4, 9, 5},
                         {2, 4, 11}, {6, 2, 10},  {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      int idx = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& tri : f) {
      int ab = mid(tri[0], tri[1]);
      int bc = mid(tri[1], tri[2]);
      int ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (Vec3& p : v) p *= radius;
  return Mesh::Build(std::move(v), std::move(f));
}

Mesh MakeBox(const Vec3& h) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                   (i & 4) ? h.z() : -h.z());
  }
  std::vector<Face> f = {
      {0, 2, 3}, {0, 3, 1},  // -z
      {4, 5, 7}, {4, 7, 6},  // +z
      {0, 1, 5}, {0, 5, 4},  // -y
      {2, 6, 7}, {2, 7, 3},  // +y
      {0, 4, 6}, {0, 6, 2},  // -x
      {1, 3, 7}, {1, 7, 5},  // +x
  };
  return Mesh::Build(std::move(v), std::move(f));
}

Mesh MakeLathe(std::span<const Eigen::Vector2d> profile, int segments) {
  if (profile.size() < 3 || segments < 3) {
    throw InputError("lathe needs >= 3 profile points and >= 3 segments");
  }
  if (profile.front().x() != 0.0 || profile.back().x() != 0.0) {
    throw InputError("lathe profile must start and end on the axis");
  }
  std::vector<Vec3> v;
  // ring[i][j] -> vertex index; poles collapse to a single vertex.
  std::vector<std::vector<int>> ring(profile.size());
  for (size_t i = 0; i < profile.size(); ++i) {
    const double r = profile[i].x();
    const double z = profile[i].y();
    if (i == 0 || i + 1 == profile.size()) {
      v.emplace_back(0.0, 0.0, z);
      ring[i].assign(segments, static_cast<int>(v.size()) - 1);
      continue;
    }
    if (r <= 0.0) throw InputError("lathe interior profile radius must be > 0");
    for (int j = 0; j < segments; ++j) {
      double phi = 2.0 * std::numbers::pi * j / segments;
      v.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
      ring[i].push_back(static_cast<int>(v.size()) - 1);
    }
  }
  std::vector<Face> f;
  for (size_t i = 0; i + 1 < profile.size(); ++i) {
    const auto& a = ring[i];
    const auto& b = ring[i + 1];
    for (int j = 0; j < segments; ++j) {
      int jn = (j + 1) % segments;
      if (a[j] != a[jn]) f.push_back({a[j], a[jn], b[jn]});
      if (b[j] != b[jn]) f.push_back({a[j], b[jn], b[j]});
    }
  }
  return Mesh::Build(std::move(v), std::move(f));
}

Mesh MakeCylinder(double radius, double height, int segments) {
  std::vector<Eigen::Vector2d> profile = {
      {0.0, 0.0}, {radius, 0.0}, {radius, height}, {0.0, height}};
  return MakeLathe(profile, segments);
}

Mesh MakeCapsule(double radius, double half_length, int segments, int rings) {
  std::vector<Eigen::Vector2d> profile;
  profile.emplace_back(0.0, -half_length - radius);
  for (int i = 1; i <= rings; ++i) {
    double a = -0.5 * std::numbers::pi + 0.5 * std::numbers::pi * i / rings;
    profile.emplace_back(radius * std::cos(a), -half_length + radius * std::sin(a));
  }
  for (int i = 0; i < rings; ++i) {
    double a = 0.5 * std::numbers::pi * i / rings;
    profile.emplace_back(radius * std::cos(a), half_length + radius * std::sin(a));
  }
  profile.emplace_back(0.0, half_length + radius);
  return MakeLathe(profile, segments);
}

}  // namespace handgrasp
