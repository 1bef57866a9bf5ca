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

#ifndef HANDGRASP_MESH_H_
#define HANDGRASP_MESH_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "handgrasp/common.h"

namespace handgrasp {

using Face = std::array<int, 3>;

struct MeshStats {
  int dropped_faces = 0;
};

// Validated triangle mesh in meters. Face normals are unit length and follow
// the counter-clockwise winding of each face.
class Mesh {
 public:
  Mesh() = default;

  // Validates indices, drops zero-area faces (count reported in `stats`) and
  // computes face normals. Throws InputError on out-of-range indices or when
  // no faces survive.
  static Mesh Build(std::vector<Vec3> vertices, std::vector<Face> faces,
                    MeshStats* stats = nullptr);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Vec3>& face_normals() const { return normals_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }

  const Vec3& corner(int face, int c) const { return vertices_[faces_[face][c]]; }
  double FaceArea(int face) const;
  double SurfaceArea() const;
  Box3 Bounds() const;

  // True when every undirected edge is shared by exactly two faces with
  // opposite orientation.
  bool IsWatertight() const;

  Mesh Transformed(const Rigid& transform) const;

  // FNV-1a over the raw vertex and face data; stable cache key.
  uint64_t ContentHash() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> normals_;
};

// A point on a mesh surface with the unit normal of its face.
struct SurfacePoint {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  int face = -1;
};

// Barycentric coordinates of p with respect to triangle (a, b, c), computed
// in the triangle's plane.
Vec3 Barycentric(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Closest point on triangle (a, b, c) to p.
Vec3 ClosestPointOnTriangle(const Vec3& p, const Vec3& a, const Vec3& b,
                            const Vec3& c);

// Procedural meshes. All are closed and outward oriented.
Mesh MakeIcosphere(double radius, int subdivisions);
// Axis-aligned box centered at the origin.
Mesh MakeBox(const Vec3& half_extents);
// Surface of revolution about +z. `profile` holds (radius, z) pairs running
// from a point on the axis to another point on the axis; interior points
// must have radius > 0. The solid lies to the left of the profile when the
// profile is traversed in the (r, z) half plane.
Mesh MakeLathe(std::span<const Eigen::Vector2d> profile, int segments);
// Capped cylinder along +z with its base at z = 0.
Mesh MakeCylinder(double radius, double height, int segments);
// Capsule along z centered at the origin; `half_length` is the half length of
// the straight section.
Mesh MakeCapsule(double radius, double half_length, int segments, int rings);

}  // namespace handgrasp

#endif  // HANDGRASP_MESH_H_
