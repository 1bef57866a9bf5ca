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

#ifndef HANDGRASP_HAND_H_
#define HANDGRASP_HAND_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "handgrasp/common.h"
#include "handgrasp/mesh.h"
#include "handgrasp/mesh_io.h"
#include "handgrasp/primitive.h"
#include "handgrasp/sdf_grid.h"

namespace handgrasp {

// One rotational degree of freedom of a joint.
struct JointAxis {
  Vec3 axis = Vec3::UnitX();  // unit, in the joint frame
  double lower = 0.0;
  double upper = 0.0;
  int dof = -1;
  double open = 0.0;        // value used by the open posture
  int close_direction = 1;  // +1/-1 flexes toward the palm; 0 is not closed
};

// Connects a parent segment to a child segment. The child frame is
// parent * origin * Rot(axes[0], d) * Rot(axes[1], d'). A joint without axes
// is rigid.
struct Joint {
  std::string name;
  int parent = -1;
  int child = -1;
  Rigid origin;
  std::vector<JointAxis> axes;
};

// Local sphere used for conservative distance bounds while closing fingers.
struct ClosingProxy {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct HandSegment {
  std::string name;
  // Exactly one of `primitive` or `grid` is set.
  std::optional<PrimitiveShape> primitive;
  Rigid shape_offset;  // primitive frame expressed in the segment frame
  std::shared_ptr<const SdfGrid> grid;
  std::shared_ptr<const Mesh> mesh;  // source mesh of a grid segment
  std::vector<Vec3> check_points;    // segment frame, farthest-point order
  std::vector<ClosingProxy> proxies;
  int parent_joint = -1;

  // Signed distance and gradient in the segment frame.
  SdfSample Query(const Vec3& local) const;
  // Surface mesh in the segment frame.
  Mesh SurfaceMesh() const;
};

// Desired contact location used by the contact energy.
struct ContactSite {
  int segment = -1;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // outward, palm side
};

// Pose Phi = (T, d): palm transform and joint values.
struct HandPose {
  Rigid transform;
  Eigen::VectorXd joints;
};

// World-frame kinematic state for one pose.
struct Kinematics {
  std::vector<Rigid> segments;
  std::vector<Vec3> dof_axis;   // world rotation axis per DOF
  std::vector<Vec3> dof_pivot;  // world point on that axis
};

struct ClosestSegment {
  int segment = -1;
  SdfSample sample;  // world gradient
};

// A digit: the subtree hanging from one palm joint.
struct Finger {
  std::vector<int> closing_dofs;  // root to tip
  std::vector<int> segments;
};

class HandModel {
 public:
  // Parses a .handcfg file; relative mesh paths resolve against its folder.
  static HandModel Load(const std::filesystem::path& path);
  static HandModel Parse(std::string_view text,
                         const std::filesystem::path& base_dir = {});

  const std::string& name() const { return name_; }
  const std::vector<HandSegment>& segments() const { return segments_; }
  // Topologically ordered: every joint follows the joint of its parent.
  const std::vector<Joint>& joints() const { return joints_; }
  int num_segments() const { return static_cast<int>(segments_.size()); }
  int num_dofs() const { return num_dofs_; }
  int palm() const { return palm_; }
  int thumb_segment() const { return thumb_segment_; }
  const Vec3& thumb_point() const { return thumb_point_; }
  const std::vector<ContactSite>& sites() const { return sites_; }
  double palm_offset() const { return palm_offset_; }
  const std::vector<Finger>& fingers() const { return fingers_; }

  const JointAxis& dof_axis(int dof) const;
  // DOFs on the path from the palm to `segment`, including its own joint.
  const std::vector<int>& chain_dofs(int segment) const {
    return chain_dofs_[segment];
  }
  // Parent/child pairs are adjacent and skip self-intersection checks.
  bool Adjacent(int a, int b) const;
  // Segments whose transform depends on `dof`.
  const std::vector<int>& dof_subtree(int dof) const { return dof_subtree_[dof]; }

  Eigen::VectorXd LowerLimits() const;
  Eigen::VectorXd UpperLimits() const;
  Eigen::VectorXd OpenJoints() const;
  Eigen::VectorXd ClampJoints(const Eigen::VectorXd& joints) const;
  HandPose OpenPose(const Rigid& transform) const;

  // Throws InputError unless the joint vector has D entries within limits
  // and the quaternion is unit.
  void ValidatePose(const HandPose& pose) const;

 private:
  void Finalize(int check_points);

  std::string name_;
  std::vector<HandSegment> segments_;
  std::vector<Joint> joints_;
  int num_dofs_ = 0;
  int palm_ = 0;
  int thumb_segment_ = -1;
  Vec3 thumb_point_ = Vec3::Zero();
  std::vector<ContactSite> sites_;
  double palm_offset_ = 0.0;
  std::vector<std::pair<int, int>> dof_location_;  // (joint, axis)
  std::vector<std::vector<int>> chain_dofs_;
  std::vector<std::vector<int>> dof_subtree_;
  std::vector<Finger> fingers_;
};

Kinematics ForwardKinematics(const HandModel& hand, const HandPose& pose);

// Segment k's signed distance at world point p, gradient in world frame.
SdfSample SegmentSdf(const HandModel& hand, const Kinematics& kin, int k,
                     const Vec3& p);
SdfSample SegmentSdf(const HandModel& hand, const HandPose& pose, int k,
                     const Vec3& p);

// argmin over segments of the segment SDF at p; ties go to the lower id.
ClosestSegment FindClosestSegment(const HandModel& hand, const Kinematics& kin,
                                  const Vec3& p);
ClosestSegment FindClosestSegment(const HandModel& hand, const HandPose& pose,
                                  const Vec3& p);

Vec3 ThumbPointWorld(const HandModel& hand, const Kinematics& kin);
Vec3 ThumbPointWorld(const HandModel& hand, const HandPose& pose);

// Velocity Jacobian (3 x (6 + D)) of a point rigidly attached to `segment`
// and currently at world position x. Columns: palm translation, palm rotation
// (world-frame tangent), then joint DOFs.
Eigen::Matrix<double, 3, Eigen::Dynamic> PointJacobian(const HandModel& hand,
                                                       const Kinematics& kin,
                                                       int segment,
                                                       const Vec3& x);

// Posed segment meshes in world coordinates, one per segment.
std::vector<NamedMesh> PosedHandMeshes(const HandModel& hand,
                                       const HandPose& pose);

// Directory holding the shipped example hands.
std::filesystem::path ShippedHandPath(const std::string& name);

}  // namespace handgrasp

#endif  // HANDGRASP_HAND_H_
