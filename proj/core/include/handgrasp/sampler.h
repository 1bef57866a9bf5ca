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

#ifndef HANDGRASP_SAMPLER_H_
#define HANDGRASP_SAMPLER_H_

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

#include "handgrasp/hand.h"
#include "handgrasp/object.h"

namespace handgrasp {

inline constexpr std::array<double, 4> kSeedRolls = {
    0.0, 0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi};
inline constexpr std::array<double, 4> kSeedStandoffs = {0.0, 0.01, 0.02, 0.03};

// Coarse grasp: approach point, roll about the approach axis, standoff.
struct GraspSeed {
  int index = 0;
  SurfacePoint approach;
  double roll = 0.0;
  double standoff = 0.0;
};

// n_approach surface points crossed with every roll and standoff, ordered
// approach-major. Throws InputError when n_approach < 1.
std::vector<GraspSeed> GenerateSeeds(const ObjectModel& object, int n_approach,
                                     uint64_t rng_seed);

// Palm rotation whose +z (approach) axis is -normal, rolled by `roll`.
Quat ApproachRotation(const Vec3& normal, double roll);

// Palm placed at a + (d + palm_offset) n facing the surface; open joints.
HandPose SeedToPose(const GraspSeed& seed, const HandModel& hand);

struct ContactEnergyParams {
  double beta = 0.05;          // meters per unit misalignment
  double cap_depth = 0.005;    // penetration beyond this returns `cap_value`
  double cap_value = 1000.0;
};

// Sum over contact sites of max(SDF, 0) + beta (1 - g . (-m)), replaced by
// cap_value when any site or closing proxy penetrates deeper than cap_depth.
double ContactEnergy(const HandPose& pose, const ObjectModel& object,
                     const HandModel& hand, const ContactEnergyParams& params = {});

struct CloseParams {
  double epsilon = 0.001;   // contact distance, meters
  double min_step = 0.004;  // radians
  int max_steps = 200;      // per DOF
};

// Flexes every closing DOF, root to tip per digit, until its subtree touches
// the object (within epsilon) or the joint reaches its closing limit.
HandPose CloseFingers(const HandPose& pose, const ObjectModel& object,
                      const HandModel& hand, const CloseParams& params = {});

struct AnnealParams {
  int iterations = 45000;
  double initial_temperature = 0.1;
  // Per-step factor at the reference budget; rescaled so that any budget
  // ends at the same final temperature.
  double cooling_rate = 0.9997;
  int reference_iterations = 45000;
  double translation_step = 0.005;  // meters
  double rotation_step = 0.05;      // radians
  double joint_step = 0.05;         // radians
  double rigid_probability = 0.7;   // else a joint-space proposal
  double cone_half_angle = 0.5235987755982988;  // 30 degrees
  double distinct_translation = 0.01;
  double distinct_rotation = 0.2;
  int keep = 2;
  uint64_t seed = 0;
  ContactEnergyParams energy;
  CloseParams close;

  void Validate() const;
};

struct SampledGrasp {
  HandPose pose;
  double energy = 0.0;
};

// sqrt((|dt| / translation)^2 + (angle / rotation)^2); > 1 means distinct.
double PoseDistance(const HandPose& a, const HandPose& b, double translation,
                    double rotation);

// Simulated annealing of the contact energy from a seed pose whose approach
// axis must stay within the cone around `approach_axis`. Returns up to
// params.keep distinct lowest-energy poses, best first. `rng_stream`
// separates the random streams of different seeds.
std::vector<SampledGrasp> Anneal(const HandPose& seed_pose, const Vec3& approach_axis,
                                 const ObjectModel& object, const HandModel& hand,
                                 const AnnealParams& params, uint64_t rng_stream = 0);

}  // namespace handgrasp

#endif  // HANDGRASP_SAMPLER_H_
