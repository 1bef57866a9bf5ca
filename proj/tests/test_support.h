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

// Shared fixtures, random generators and reference oracles for the tests.
// Oracles here are written independently of the library code they check.

#ifndef HANDGRASP_TESTS_TEST_SUPPORT_H_
#define HANDGRASP_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <unistd.h>

#include "handgrasp/common.h"
#include "handgrasp/hand.h"
#include "handgrasp/mesh.h"

namespace handgrasp::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("handgrasp_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

using TestRng = std::mt19937_64;

inline double Uniform(TestRng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 UniformInBox(TestRng& rng, const Vec3& lo, const Vec3& hi) {
  return Vec3(Uniform(rng, lo.x(), hi.x()), Uniform(rng, lo.y(), hi.y()),
              Uniform(rng, lo.z(), hi.z()));
}

inline Vec3 RandomUnitVector(TestRng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

// Uniform random rotation (normalized Gaussian quaternion).
inline Quat RandomRotation(TestRng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

inline Rigid RandomRigid(TestRng& rng, double max_translation) {
  return {RandomRotation(rng),
          UniformInBox(rng, Vec3::Constant(-max_translation), Vec3::Constant(max_translation))};
}

// Joint values drawn uniformly within the limits.
inline Eigen::VectorXd RandomJoints(const HandModel& hand, TestRng& rng) {
  Eigen::VectorXd lo = hand.LowerLimits(), hi = hand.UpperLimits();
  Eigen::VectorXd d(hand.num_dofs());
  for (int i = 0; i < d.size(); ++i) d[i] = Uniform(rng, lo[i], hi[i]);
  return d;
}

inline HandPose RandomPose(const HandModel& hand, TestRng& rng, double max_translation) {
  return {RandomRigid(rng, max_translation), RandomJoints(hand, rng)};
}

inline const HandModel& BarrettHand() {
  static const HandModel hand = HandModel::Load(ShippedHandPath("barrett-like"));
  return hand;
}

// Signed distance to an axis-aligned box centered at the origin.
inline double BoxSdf(const Vec3& p, const Vec3& half) {
  Vec3 q = p.cwiseAbs() - half;
  double outside = q.cwiseMax(0.0).norm();
  double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

// Signed distance to a capped cylinder along +z with its base at z = 0.
inline double CylinderSdf(const Vec3& p, double radius, double height) {
  double dr = std::hypot(p.x(), p.y()) - radius;
  double dz = std::abs(p.z() - 0.5 * height) - 0.5 * height;
  double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
  return outside + std::min(std::max(dr, dz), 0.0);
}

// Moller-Trumbore: does the ray o + t d, t > 0, cross triangle (a, b, c)?
inline bool RayHitsTriangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                            const Vec3& c) {
  Vec3 e1 = b - a, e2 = c - a;
  Vec3 p = d.cross(e2);
  double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return false;
  Vec3 s = o - a;
  double u = s.dot(p) / det;
  if (u < 0.0 || u > 1.0) return false;
  Vec3 q = s.cross(e1);
  double v = d.dot(q) / det;
  if (v < 0.0 || u + v > 1.0) return false;
  return e2.dot(q) / det > 0.0;
}

// Inside test by crossing parity along a fixed irrational direction.
inline bool InsideByRayParity(const Mesh& mesh, const Vec3& p) {
  const Vec3 dir = Vec3(0.5773, 0.5774, 0.57735027).normalized();
  int crossings = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    crossings += RayHitsTriangle(p, dir, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2));
  }
  return crossings % 2 == 1;
}

// Homogeneous 4x4 from a rigid transform, built from scratch.
inline Eigen::Matrix4d Homogeneous(const Quat& q, const Vec3& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = q.normalized().toRotationMatrix();
  m.topRightCorner<3, 1>() = t;
  return m;
}

inline bool IsRigidNear(const Rigid& a, const Rigid& b, double tol) {
  return (a.Matrix() - b.Matrix()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace handgrasp::testing

#endif  // HANDGRASP_TESTS_TEST_SUPPORT_H_
