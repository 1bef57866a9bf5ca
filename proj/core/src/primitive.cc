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

#include "handgrasp/primitive.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "handgrasp/sampling.h"

namespace handgrasp {
namespace {

Vec3 UnitSphereSample(Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double z = 2.0 * uniform(rng) - 1.0;
  double phi = 2.0 * std::numbers::pi * uniform(rng);
  double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

}  // namespace

std::string ToString(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::kSphere:
      return "sphere";
    case PrimitiveKind::kCapsule:
      return "capsule";
    case PrimitiveKind::kBox:
      return "box";
  }
  return "unknown";
}

PrimitiveShape::PrimitiveShape(PrimitiveKind kind, double radius,
                               double half_length, const Vec3& half_extents)
    : kind_(kind),
      radius_(radius),
      half_length_(half_length),
      half_extents_(half_extents) {}

PrimitiveShape PrimitiveShape::Sphere(double radius) {
  if (!(radius > 0.0)) throw InputError("sphere radius must be > 0");
  return PrimitiveShape(PrimitiveKind::kSphere, radius, 0.0, Vec3::Zero());
}

PrimitiveShape PrimitiveShape::Capsule(double radius, double half_length) {
  if (!(radius > 0.0) || !(half_length > 0.0)) {
    throw InputError("capsule radius and half length must be > 0");
  }
  return PrimitiveShape(PrimitiveKind::kCapsule, radius, half_length, Vec3::Zero());
}

PrimitiveShape PrimitiveShape::Box(const Vec3& half_extents) {
  if (!(half_extents.minCoeff() > 0.0)) {
    throw InputError("box half extents must be > 0");
  }
  return PrimitiveShape(PrimitiveKind::kBox, 0.0, 0.0, half_extents);
}

SdfSample PrimitiveShape::Evaluate(const Vec3& p) const {
  SdfSample s;
  switch (kind_) {
    case PrimitiveKind::kSphere: {
      double r = p.norm();
      s.value = r - radius_;
      s.gradient = r > 0.0 ? Vec3(p / r) : Vec3::UnitX();
      break;
    }
    case PrimitiveKind::kCapsule: {
      Vec3 c(0.0, 0.0, std::clamp(p.z(), -half_length_, half_length_));
      s.cell = p.z() > half_length_ ? 2 : (p.z() < -half_length_ ? 0 : 1);
      Vec3 d = p - c;
      double r = d.norm();
      s.value = r - radius_;
      s.gradient = r > 0.0 ? Vec3(d / r) : Vec3::UnitX();
      break;
    }
    case PrimitiveKind::kBox: {
      Vec3 q = p.cwiseAbs() - half_extents_;
      Vec3 sign(p.x() < 0 ? -1.0 : 1.0, p.y() < 0 ? -1.0 : 1.0,
                p.z() < 0 ? -1.0 : 1.0);
      if (q.maxCoeff() > 0.0) {
        Vec3 outside = q.cwiseMax(0.0);
        double r = outside.norm();
        s.value = r;
        s.gradient = outside.cwiseProduct(sign) / r;
        s.cell = (q.x() > 0) | (q.y() > 0) << 1 | (q.z() > 0) << 2;
      } else {
        int axis;
        s.value = q.maxCoeff(&axis);
        s.gradient = Vec3::Zero();
        s.gradient[axis] = sign[axis];
        s.cell = 8 + 2 * axis + (sign[axis] > 0);
      }
      break;
    }
  }
  return s;
}

double PrimitiveShape::SurfaceArea() const {
  switch (kind_) {
    case PrimitiveKind::kSphere:
      return 4.0 * std::numbers::pi * radius_ * radius_;
    case PrimitiveKind::kCapsule:
      return 4.0 * std::numbers::pi * radius_ * radius_ +
             2.0 * std::numbers::pi * radius_ * (2.0 * half_length_);
    case PrimitiveKind::kBox: {
      const Vec3& h = half_extents_;
      return 8.0 * (h.x() * h.y() + h.y() * h.z() + h.z() * h.x());
    }
  }
  return 0.0;
}

std::vector<SurfacePoint> PrimitiveShape::SampleSurface(int n,
                                                        uint64_t rng_seed) const {
  Rng rng = MakeRng(rng_seed, 17);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<SurfacePoint> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    SurfacePoint sp;
    switch (kind_) {
      case PrimitiveKind::kSphere: {
        sp.normal = UnitSphereSample(rng);
        sp.position = radius_ * sp.normal;
        break;
      }
      case PrimitiveKind::kCapsule: {
        double caps = 4.0 * std::numbers::pi * radius_ * radius_;
        if (uniform(rng) * SurfaceArea() < caps) {
          sp.normal = UnitSphereSample(rng);
          double z0 = sp.normal.z() >= 0.0 ? half_length_ : -half_length_;
          sp.position = radius_ * sp.normal + Vec3(0, 0, z0);
        } else {
          double phi = 2.0 * std::numbers::pi * uniform(rng);
          double z = (2.0 * uniform(rng) - 1.0) * half_length_;
          sp.normal = Vec3(std::cos(phi), std::sin(phi), 0.0);
          sp.position = radius_ * sp.normal + Vec3(0, 0, z);
        }
        break;
      }
      case PrimitiveKind::kBox: {
        const Vec3& h = half_extents_;
        double areas[3] = {h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
        double pick = uniform(rng) * (areas[0] + areas[1] + areas[2]);
        int axis = pick < areas[0] ? 0 : (pick < areas[0] + areas[1] ? 1 : 2);
        double side = uniform(rng) < 0.5 ? -1.0 : 1.0;
        Vec3 p;
        for (int k = 0; k < 3; ++k) p[k] = (2.0 * uniform(rng) - 1.0) * h[k];
        p[axis] = side * h[axis];
        sp.position = p;
        sp.normal = Vec3::Zero();
        sp.normal[axis] = side;
        break;
      }
    }
    out.push_back(sp);
  }
  return out;
}

Mesh PrimitiveShape::Tessellate(int resolution) const {
  resolution = std::max(resolution, 4);
  switch (kind_) {
    case PrimitiveKind::kSphere:
      return MakeIcosphere(radius_, resolution >= 16 ? 2 : 1);
    case PrimitiveKind::kCapsule:
      return MakeCapsule(radius_, half_length_, resolution, resolution / 4 + 1);
    case PrimitiveKind::kBox:
      return MakeBox(half_extents_);
  }
  return MakeBox(Vec3::Ones());
}

}  // namespace handgrasp
