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

#ifndef HANDGRASP_COMMON_H_
#define HANDGRASP_COMMON_H_

#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace handgrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using Box3 = Eigen::AlignedBox3d;

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: files, configs, arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// A configured resource bound (grid node cap) would be exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Rigid transform x -> R x + t, rotation held as a unit quaternion.
struct Rigid {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  static Rigid Identity() { return {}; }
  static Rigid FromTranslation(const Vec3& t) { return {Quat::Identity(), t}; }

  Vec3 Apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 ApplyInverse(const Vec3& p) const {
    return rotation.conjugate() * (p - translation);
  }
  Vec3 Rotate(const Vec3& v) const { return rotation * v; }

  Rigid operator*(const Rigid& other) const {
    return {rotation * other.rotation,
            rotation * other.translation + translation};
  }

  Rigid Inverse() const {
    Quat inv = rotation.conjugate();
    return {inv, -(inv * translation)};
  }

  Eigen::Matrix4d Matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
  }
};

// Rotation by the axis-angle vector w (angle = |w|).
inline Quat ExpMap(const Vec3& w) {
  double angle = w.norm();
  if (angle < 1e-300) return Quat::Identity();
  return Quat(Eigen::AngleAxisd(angle, w / angle));
}

// Geodesic angle between two rotations, in [0, pi].
inline double RotationAngle(const Quat& a, const Quat& b) {
  return a.angularDistance(b);
}

// Intrinsic roll-pitch-yaw (x, then y, then z about the rotated axes is
// equivalent to extrinsic z-y-x); R = Rz(yaw) Ry(pitch) Rx(roll).
inline Quat FromRpy(double roll, double pitch, double yaw) {
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
              Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
              Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

// Result of a signed-distance query. Gradient points outward.
struct SdfSample {
  double value = 0.0;
  Vec3 gradient = Vec3::UnitX();
  // Set when a grid query fell outside the grid and was extrapolated.
  bool outside_extent = false;
  // Identifies the smooth piece of the field that produced the sample (grid
  // cell, or primitive region); used to detect when a finite difference
  // straddles a piece boundary.
  long long cell = -1;
};

}  // namespace handgrasp

#endif  // HANDGRASP_COMMON_H_
