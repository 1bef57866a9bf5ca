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

#ifndef HANDGRASP_CONTACT_H_
#define HANDGRASP_CONTACT_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "handgrasp/common.h"
#include "handgrasp/mesh.h"

namespace handgrasp {

inline constexpr int kAttractive = 1;
inline constexpr int kRepulsive = -1;

// Marks a map whose labels did not come from thresholding.
inline constexpr double kNoThreshold = -1.0;

struct ContactPoint {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  int label = kRepulsive;

  bool operator==(const ContactPoint&) const = default;
};

// Labeled surface points. Files store positions and normals at single
// precision, so a loaded map equals the saved one rounded to float.
class ContactMap {
 public:
  ContactMap() = default;
  // Throws InputError when empty or when a label is not +1/-1.
  ContactMap(std::vector<ContactPoint> points, double tau_t, std::string source);

  const std::vector<ContactPoint>& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  double tau_t() const { return tau_t_; }
  const std::string& source() const { return source_; }
  int NumAttractive() const;
  int NumRepulsive() const { return size() - NumAttractive(); }

  ContactMap Transformed(const Rigid& transform) const;

  // Text header (version, N, tau_t, source) followed by 25-byte little-endian
  // records: position f32 x3, normal f32 x3, label i8.
  void Save(const std::filesystem::path& path) const;
  static ContactMap Load(const std::filesystem::path& path);

  bool operator==(const ContactMap&) const = default;

 private:
  std::vector<ContactPoint> points_;
  double tau_t_ = kNoThreshold;
  std::string source_;
};

// Per-vertex contact intensity t in [0, 1].
class ScalarContactField {
 public:
  // Values are clamped to [0, 1]. Throws InputError on a count mismatch or
  // non-finite values.
  ScalarContactField(Mesh mesh, std::vector<double> values);

  const Mesh& mesh() const { return mesh_; }
  const std::vector<double>& values() const { return values_; }
  // Barycentric interpolation on `face`.
  double Interpolate(int face, const Vec3& p) const;

 private:
  Mesh mesh_;
  std::vector<double> values_;
};

// Label +1 iff the interpolated field is >= tau_t. Samples must come from the
// field's mesh (valid face ids). Throws InputError otherwise or when tau_t is
// outside (0, 1).
ContactMap BuildContactMap(const ScalarContactField& field,
                           const std::vector<SurfacePoint>& samples,
                           double tau_t, std::string source = "field");

// Region predicate for hand-authored maps.
struct ContactRegion {
  enum class Shape { kSlab, kBall, kBox, kCylinder };
  Shape shape = Shape::kBall;
  int label = kAttractive;
  Vec3 a = Vec3::Zero();  // slab normal, ball or cylinder center, box min
  Vec3 b = Vec3::Zero();  // box max corner, cylinder axis
  double lo = 0.0;        // slab offsets or cylinder radii; ball radius in hi
  double hi = 0.0;
  double h0 = 0.0;        // cylinder extent along its axis
  double h1 = 0.0;

  // lo <= dot(normal, p) <= hi.
  static ContactRegion Slab(const Vec3& normal, double lo, double hi, int label);
  static ContactRegion Ball(const Vec3& center, double radius, int label);
  static ContactRegion Box(const Vec3& min, const Vec3& max, int label);
  // Shell r_min <= radial distance <= r_max, h_min <= axial offset <= h_max.
  static ContactRegion Cylinder(const Vec3& center, const Vec3& axis, double r_min,
                                double r_max, double h_min, double h_max, int label);

  bool Contains(const Vec3& p) const;
};

// Regions apply in order, later ones overriding earlier ones; points outside
// every region are repulsive. An empty region list yields an all-repulsive
// map and a warning.
ContactMap ManualContactMap(const std::vector<SurfacePoint>& samples,
                            const std::vector<ContactRegion>& regions,
                            std::vector<std::string>* warnings = nullptr);

// Region spec text, one region per line:
//   attract|repel slab nx ny nz lo hi
//   attract|repel ball cx cy cz radius
//   attract|repel box minx miny minz maxx maxy maxz
//   attract|repel cylinder cx cy cz ax ay az rmin rmax hmin hmax
std::vector<ContactRegion> ParseRegions(std::string_view text);
std::vector<ContactRegion> LoadRegions(const std::filesystem::path& path);

}  // namespace handgrasp

#endif  // HANDGRASP_CONTACT_H_
