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

#include "handgrasp/sampler.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "handgrasp/sampling.h"

namespace handgrasp {
namespace {

constexpr uint64_t kSeedStream = 101;
constexpr uint64_t kAnnealStreamBase = 1 << 20;

Vec3 ApproachAxis(const HandPose& pose) {
  return pose.transform.rotation * Vec3::UnitZ();
}

// Up to `keep` lowest-energy poses, pairwise distinct, best first.
class EliteSet {
 public:
  EliteSet(const AnnealParams& params) : params_(params) {}

  void Offer(const HandPose& pose, double energy) {
    for (SampledGrasp& e : elites_) {
      if (Distance(e.pose, pose) <= 1.0) {
        if (energy < e.energy) {
          e = {pose, energy};
          Normalize();
        }
        return;
      }
    }
    if (static_cast<int>(elites_.size()) < params_.keep ||
        energy < elites_.back().energy) {
      elites_.push_back({pose, energy});
      Normalize();
    }
  }

  std::vector<SampledGrasp> Take() { return std::move(elites_); }

 private:
  double Distance(const HandPose& a, const HandPose& b) const {
    return PoseDistance(a, b, params_.distinct_translation, params_.distinct_rotation);
  }

  void Normalize() {
    std::stable_sort(elites_.begin(), elites_.end(),
                     [](const auto& a, const auto& b) { return a.energy < b.energy; });
    std::vector<SampledGrasp> kept;
    for (SampledGrasp& e : elites_) {
      bool clash = std::any_of(kept.begin(), kept.end(), [&](const SampledGrasp& k) {
        return Distance(k.pose, e.pose) <= 1.0;
      });
      if (!clash) kept.push_back(std::move(e));
    }
    if (static_cast<int>(kept.size()) > params_.keep) kept.resize(params_.keep);
    elites_ = std::move(kept);
  }

  const AnnealParams& params_;
  std::vector<SampledGrasp> elites_;
};

}  // namespace

std::vector<GraspSeed> GenerateSeeds(const ObjectModel& object, int n_approach,
                                     uint64_t rng_seed) {
  if (n_approach < 1) throw InputError("n_approach must be >= 1");
  const auto& samples = object.samples();
  if (samples.empty()) throw InputError("object has no surface samples");
  Rng rng = MakeRng(rng_seed, kSeedStream);
  std::uniform_int_distribution<size_t> pick(0, samples.size() - 1);
  std::vector<GraspSeed> seeds;
  seeds.reserve(static_cast<size_t>(n_approach) * 16);
  for (int a = 0; a < n_approach; ++a) {
    const SurfacePoint& approach = samples[pick(rng)];
    for (double roll : kSeedRolls) {
      for (double standoff : kSeedStandoffs) {
        GraspSeed seed;
        seed.index = static_cast<int>(seeds.size());
        seed.approach = approach;
        seed.roll = roll;
        seed.standoff = standoff;
        seeds.push_back(seed);
      }
    }
  }
  return seeds;
}

Quat ApproachRotation(const Vec3& normal, double roll) {
  Vec3 z = -normal.normalized();
  Vec3 ref = std::abs(z.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  Vec3 x0 = (ref - ref.dot(z) * z).normalized();
  Vec3 y0 = z.cross(x0);
  Vec3 x = std::cos(roll) * x0 + std::sin(roll) * y0;
  Mat3 r;
  r.col(0) = x;
  r.col(1) = z.cross(x);
  r.col(2) = z;
  return Quat(r).normalized();
}

HandPose SeedToPose(const GraspSeed& seed, const HandModel& hand) {
  Vec3 n = seed.approach.normal.normalized();
  Rigid t;
  t.rotation = ApproachRotation(n, seed.roll);
  t.translation = seed.approach.position + (seed.standoff + hand.palm_offset()) * n;
  return hand.OpenPose(t);
}

double ContactEnergy(const HandPose& pose, const ObjectModel& object,
                     const HandModel& hand, const ContactEnergyParams& params) {
  Kinematics kin = ForwardKinematics(hand, pose);
  double energy = 0.0;
  for (const ContactSite& site : hand.sites()) {
    const Rigid& frame = kin.segments[site.segment];
    SdfSample s = object.Query(frame.Apply(site.point));
    if (s.value < -params.cap_depth) return params.cap_value;
    double norm = s.gradient.norm();
    double align = norm > 0.0 ? s.gradient.dot(-frame.Rotate(site.normal)) / norm : 0.0;
    energy += std::max(s.value, 0.0) + params.beta * (1.0 - align);
  }
  for (int k = 0; k < hand.num_segments(); ++k) {
    for (const ClosingProxy& p : hand.segments()[k].proxies) {
      if (object.Query(kin.segments[k].Apply(p.center)).value - p.radius <
          -params.cap_depth) {
        return params.cap_value;
      }
    }
  }
  return energy;
}

HandPose CloseFingers(const HandPose& pose, const ObjectModel& object,
                      const HandModel& hand, const CloseParams& params) {
  HandPose out = pose;
  for (const Finger& finger : hand.fingers()) {
    for (int dof : finger.closing_dofs) {
      const JointAxis& axis = hand.dof_axis(dof);
      const double dir = axis.close_direction;
      const double limit = dir > 0 ? axis.upper : axis.lower;
      for (int step = 0; step < params.max_steps; ++step) {
        if ((limit - out.joints[dof]) * dir <= 0.0) break;
        Kinematics kin = ForwardKinematics(hand, out);
        const Vec3& w = kin.dof_axis[dof];
        const Vec3& pivot = kin.dof_pivot[dof];
        double gap = std::numeric_limits<double>::infinity();
        double lever = 0.0;
        for (int s : hand.dof_subtree(dof)) {
          for (const ClosingProxy& p : hand.segments()[s].proxies) {
            Vec3 c = kin.segments[s].Apply(p.center);
            gap = std::min(gap, object.Query(c).value - p.radius);
            lever = std::max(lever, w.cross(c - pivot).norm());
          }
        }
        if (gap <= params.epsilon) break;
        double delta = std::max(gap / std::max(lever, 1e-9), params.min_step);
        double next = out.joints[dof] + dir * delta;
        out.joints[dof] = dir > 0 ? std::min(next, limit) : std::max(next, limit);
      }
    }
  }
  return out;
}

void AnnealParams::Validate() const {
  if (iterations < 0) throw InputError("anneal iterations must be >= 0");
  if (!(initial_temperature > 0)) throw InputError("initial temperature must be > 0");
  if (!(cooling_rate > 0 && cooling_rate <= 1)) throw InputError("cooling rate must lie in (0, 1]");
  if (reference_iterations < 1) throw InputError("reference iterations must be >= 1");
  if (!(translation_step > 0 && rotation_step > 0 && joint_step > 0)) {
    throw InputError("proposal scales must be > 0");
  }
  if (!(rigid_probability >= 0 && rigid_probability <= 1)) {
    throw InputError("rigid proposal probability must lie in [0, 1]");
  }
  if (!(cone_half_angle > 0)) throw InputError("cone half angle must be > 0");
  if (!(distinct_translation > 0 && distinct_rotation > 0)) {
    throw InputError("distinctness radii must be > 0");
  }
  if (keep < 1) throw InputError("keep must be >= 1");
}

double PoseDistance(const HandPose& a, const HandPose& b, double translation,
                    double rotation) {
  double dt = (a.transform.translation - b.transform.translation).norm() / translation;
  double dr = RotationAngle(a.transform.rotation, b.transform.rotation) / rotation;
  return std::sqrt(dt * dt + dr * dr);
}

std::vector<SampledGrasp> Anneal(const HandPose& seed_pose, const Vec3& approach_axis,
                                 const ObjectModel& object, const HandModel& hand,
                                 const AnnealParams& params, uint64_t rng_stream) {
  params.Validate();
  const Vec3 cone_axis = approach_axis.normalized();
  auto in_cone = [&](const HandPose& p) {
    double c = std::clamp(ApproachAxis(p).dot(cone_axis), -1.0, 1.0);
    return std::acos(c) <= params.cone_half_angle + 1e-12;
  };
  if (!in_cone(seed_pose)) throw InputError("seed pose lies outside the approach cone");

  Rng rng = MakeRng(params.seed, kAnnealStreamBase + rng_stream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double cooling = std::pow(
      params.cooling_rate,
      static_cast<double>(params.reference_iterations) / std::max(params.iterations, 1));

  EliteSet elites(params);
  HandPose current = CloseFingers(seed_pose, object, hand, params.close);
  double energy = ContactEnergy(current, object, hand, params.energy);
  elites.Offer(current, energy);

  double temperature = params.initial_temperature;
  const Eigen::VectorXd open = hand.OpenJoints();
  for (int k = 0; k < params.iterations; ++k, temperature *= cooling) {
    HandPose candidate = current;
    if (uniform(rng) < params.rigid_probability) {
      Vec3 dt(gauss(rng), gauss(rng), gauss(rng));
      Vec3 dw(gauss(rng), gauss(rng), gauss(rng));
      candidate.transform.translation += params.translation_step * dt;
      candidate.transform.rotation =
          (ExpMap(params.rotation_step * dw) * candidate.transform.rotation).normalized();
      if (!in_cone(candidate)) continue;
      candidate.joints = open;
      candidate = CloseFingers(candidate, object, hand, params.close);
    } else {
      for (int d = 0; d < candidate.joints.size(); ++d) {
        candidate.joints[d] += params.joint_step * gauss(rng);
      }
      candidate.joints = hand.ClampJoints(candidate.joints);
    }
    double e = ContactEnergy(candidate, object, hand, params.energy);
    elites.Offer(candidate, e);
    if (e <= energy || uniform(rng) < std::exp(-(e - energy) / temperature)) {
      current = std::move(candidate);
      energy = e;
    }
  }
  return elites.Take();
}

}  // namespace handgrasp
