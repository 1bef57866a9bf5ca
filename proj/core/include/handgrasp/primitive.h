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

#ifndef HANDGRASP_PRIMITIVE_H_
#define HANDGRASP_PRIMITIVE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "handgrasp/common.h"
#include "handgrasp/mesh.h"

namespace handgrasp {

enum class PrimitiveKind { kSphere, kCapsule, kBox };

std::string ToString(PrimitiveKind kind);

// Analytic shape centered at its local origin. Capsules run along local z.
class PrimitiveShape {
 public:
  static PrimitiveShape Sphere(double radius);
  // Straight section spans z in [-half_length, half_length].
  static PrimitiveShape Capsule(double radius, double half_length);
  static PrimitiveShape Box(const Vec3& half_extents);

  PrimitiveKind kind() const { return kind_; }
  double radius() const { return radius_; }
  double half_length() const { return half_length_; }
  const Vec3& half_extents() const { return half_extents_; }

  // Exact signed distance and its closed-form gradient.
  SdfSample Evaluate(const Vec3& p) const;

  double SurfaceArea() const;

  // Area-uniform points on the exact surface.
  std::vector<SurfacePoint> SampleSurface(int n, uint64_t rng_seed) const;

  // Triangle mesh for export; `resolution` controls angular subdivision.
  Mesh Tessellate(int resolution = 16) const;

 private:
  PrimitiveShape(PrimitiveKind kind, double radius, double half_length,
                 const Vec3& half_extents);

  PrimitiveKind kind_;
  double radius_ = 0.0;
  double half_length_ = 0.0;
  Vec3 half_extents_ = Vec3::Zero();
};

}  // namespace handgrasp

#endif  // HANDGRASP_PRIMITIVE_H_
