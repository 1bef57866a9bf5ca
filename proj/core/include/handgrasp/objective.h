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

#ifndef HANDGRASP_OBJECTIVE_H_
#define HANDGRASP_OBJECTIVE_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "handgrasp/contact.h"
#include "handgrasp/hand.h"
#include "handgrasp/object.h"

namespace handgrasp {

struct ObjectiveConfig {
  double lambda_a = 150.0;  // attractive contact weight
  double lambda_r = 20.0;   // repulsive contact weight
  double lambda_t = 25.0;   // thumb contact weight
  double lambda_i = 100.0;  // intersection weight
  double tau_n = 0.7;       // normal-alignment gate
  double delta_r = 0.01;    // repulsion margin, meters
  int n_int = 50;           // check points per segment

  // Throws InputError on negative weights, tau_n outside (0, 1), delta_r <= 0
  // or n_int < 1.
  void Validate() const;
};

// Per-contact-point activation bits.
enum PointFlag : uint8_t {
  kGateOpen = 1,     // repulsive point with |g . n| > tau_n
  kHingeActive = 2,  // gate open and SDF < delta_r
};

// Squared-residual sums per term. total is their sum.
struct ResidualReport {
  double grasp_attractive = 0.0;
  double grasp_repulsive = 0.0;
  double thumb = 0.0;
  double intersection_object = 0.0;
  double intersection_self = 0.0;
  double total = 0.0;
  std::vector<uint8_t> point_flags;  // one per contact point

  double grasp() const { return grasp_attractive + grasp_repulsive; }
  double intersection() const { return intersection_object + intersection_self; }
};

// Residual vector r(Phi) for L = |r|^2 and its Jacobian with respect to the
// pose tangent (dt, w, dd). Row blocks, in order:
//   contact points (N), thumb (1), hand-object check points (segments x n),
//   self-intersection pairs (check point on j against each non-adjacent k).
// Closest segments, gates and hinges are recomputed on every call and held
// fixed for the Jacobian of that call.
class GraspObjective {
 public:
  // Keeps references to `hand`, `object` and `map`; they must outlive it.
  GraspObjective(const HandModel& hand, const ObjectModel& object,
                 const ContactMap& map, const ObjectiveConfig& config);

  int NumResiduals() const { return num_residuals_; }
  int TangentDim() const { return 6 + hand_.num_dofs(); }
  const ObjectiveConfig& config() const { return config_; }
  const HandModel& hand() const { return hand_; }
  const ObjectModel& object() const { return object_; }
  const ContactMap& contact_map() const { return map_; }

  int thumb_row() const { return map_.size(); }
  int object_rows_begin() const { return map_.size() + 1; }
  int self_rows_begin() const { return self_begin_; }

  // Any output may be null. `pieces` receives one signature per row that
  // changes whenever the row switches smooth piece (closest segment, gate,
  // hinge or field cell).
  void Evaluate(const HandPose& pose, Eigen::VectorXd* residuals,
                Eigen::MatrixXd* jacobian, ResidualReport* report,
                std::vector<int64_t>* pieces = nullptr) const;

  ResidualReport Report(const HandPose& pose) const;
  double Total(const HandPose& pose) const { return Report(pose).total; }

 private:
  struct SelfPair {
    int segment;  // owner of the check point
    int point;    // index into its check points
    int other;    // segment whose SDF is queried
  };

  const HandModel& hand_;
  const ObjectModel& object_;
  const ContactMap& map_;
  ObjectiveConfig config_;
  int checks_per_segment_ = 0;
  std::vector<SelfPair> self_pairs_;
  int self_begin_ = 0;
  int num_residuals_ = 0;
};

// Repulsive-term gate and residual for a single contact point; exposed for
// tests and tools.
bool RepulsiveGateOpen(const Vec3& sdf_gradient, const Vec3& normal, double tau_n);
double RepulsiveResidual(double sdf, const Vec3& sdf_gradient, const Vec3& normal,
                         const ObjectiveConfig& config);

}  // namespace handgrasp

#endif  // HANDGRASP_OBJECTIVE_H_
