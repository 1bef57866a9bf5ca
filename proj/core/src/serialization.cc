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

#include "handgrasp/serialization.h"

#include <algorithm>
#include <string>

namespace handgrasp {
namespace {

Json Array(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json Array(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing JSON field '") + key + "'");
  }
  return j.at(key);
}

std::vector<double> Numbers(const Json& j, const char* key, size_t expected) {
  const Json& a = Field(j, key);
  if (!a.is_array() || (expected > 0 && a.size() != expected)) {
    throw InputError(std::string("JSON field '") + key + "' has the wrong shape");
  }
  std::vector<double> out;
  for (const Json& v : a) {
    if (!v.is_number()) throw InputError(std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

template <typename T>
void Overlay(const Json& j, const char* key, T* value) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if constexpr (std::is_same_v<T, int>) {
    if (!v.is_number_integer()) throw InputError(std::string("'") + key + "' must be an integer");
  } else if constexpr (std::is_same_v<T, uint64_t>) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
      throw InputError(std::string("'") + key + "' must be a non-negative integer");
    }
  } else {
    if (!v.is_number()) throw InputError(std::string("'") + key + "' must be a number");
  }
  *value = v.get<T>();
}

void CheckKeys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw InputError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      throw InputError(std::string("unknown ") + what + " key '" + key + "'");
    }
  }
}

}  // namespace

Json ToJson(const HandPose& pose) {
  const Quat& q = pose.transform.rotation;
  return {{"translation", Array(pose.transform.translation)},
          {"rotation_wxyz", Json::array({q.w(), q.x(), q.y(), q.z()})},
          {"joints", Array(pose.joints)}};
}

HandPose PoseFromJson(const Json& j) {
  std::vector<double> t = Numbers(j, "translation", 3);
  std::vector<double> q = Numbers(j, "rotation_wxyz", 4);
  std::vector<double> d = Numbers(j, "joints", 0);
  HandPose pose;
  pose.transform.translation = Vec3(t[0], t[1], t[2]);
  pose.transform.rotation = Quat(q[0], q[1], q[2], q[3]);
  if (pose.transform.rotation.norm() < 1e-12) throw InputError("zero quaternion in pose");
  pose.transform.rotation.normalize();
  pose.joints = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<int>(d.size()));
  return pose;
}

Json ToJson(const ResidualReport& report) {
  int gated = 0, hinges = 0;
  for (uint8_t f : report.point_flags) {
    gated += (f & kGateOpen) != 0;
    hinges += (f & kHingeActive) != 0;
  }
  return {{"total", report.total},
          {"grasp", report.grasp()},
          {"grasp_attractive", report.grasp_attractive},
          {"grasp_repulsive", report.grasp_repulsive},
          {"thumb", report.thumb},
          {"intersection", report.intersection()},
          {"intersection_object", report.intersection_object},
          {"intersection_self", report.intersection_self},
          {"gated_points", gated},
          {"active_hinges", hinges}};
}

Json ToJson(const GraspSeed& seed) {
  return {{"index", seed.index},
          {"approach_point", Array(seed.approach.position)},
          {"approach_normal", Array(seed.approach.normal)},
          {"roll", seed.roll},
          {"standoff", seed.standoff}};
}

Json ToJson(const std::vector<SampledGrasp>& samples) {
  Json out = Json::array();
  for (const SampledGrasp& s : samples) {
    out.push_back({{"pose", ToJson(s.pose)}, {"energy", s.energy}});
  }
  return out;
}

Json ToJson(const RankedEntry& entry) {
  Json j = {{"rank", entry.rank},
            {"index", entry.index},
            {"L", entry.report.total},
            {"pose", ToJson(entry.pose)},
            {"report", ToJson(entry.report)},
            {"sampled_pose", ToJson(entry.sampled_pose)},
            {"sampled_report", ToJson(entry.sampled_report)},
            {"contact_energy", entry.contact_energy},
            {"injected", entry.injected},
            {"lm_reason", ToString(entry.lm_reason)},
            {"lm_iterations", entry.lm_iterations},
            {"flagged", entry.flagged}};
  j["seed"] = entry.injected ? Json(nullptr) : ToJson(entry.seed);
  if (!entry.error.empty()) j["error"] = entry.error;
  return j;
}

Json ToJson(const RankedGraspSet& set) {
  Json entries = Json::array();
  for (const RankedEntry& e : set.entries) entries.push_back(ToJson(e));
  return {{"metric", ToString(set.metric)},
          {"num_entries", set.entries.size()},
          {"entries", std::move(entries)}};
}

Json ToJson(const ScenarioResult& r) {
  return {{"name", r.name},
          {"num_entries", r.num_entries},
          {"residual_rank", r.residual_rank},
          {"residual_rank_flagged", r.residual_flagged},
          {"contact_energy_rank", r.contact_energy_rank},
          {"contact_energy_rank_flagged", r.contact_energy_flagged},
          {"top1_grasp_by_residual", r.top1_grasp_by_residual},
          {"top1_grasp_by_contact_energy", r.top1_grasp_by_contact_energy},
          {"mean_sampled_L", r.mean_sampled_total},
          {"mean_refined_L", r.mean_refined_total}};
}

Json ToJson(const EvalReport& report) {
  Json scenarios = Json::array();
  for (const ScenarioResult& r : report.scenarios) scenarios.push_back(ToJson(r));
  return {{"scenarios", std::move(scenarios)},
          {"median_residual_rank", report.median_residual_rank},
          {"median_contact_energy_rank", report.median_contact_energy_rank},
          {"median_top1_grasp_by_residual", report.median_top1_grasp_by_residual},
          {"median_top1_grasp_by_contact_energy",
           report.median_top1_grasp_by_contact_energy}};
}

Json ToJson(const ObjectiveConfig& c) {
  return {{"lambda_a", c.lambda_a}, {"lambda_r", c.lambda_r}, {"lambda_t", c.lambda_t},
          {"lambda_i", c.lambda_i}, {"tau_n", c.tau_n},       {"delta_r", c.delta_r},
          {"n_int", c.n_int}};
}

Json ToJson(const LmParams& p) {
  return {{"max_iters", p.max_iters},
          {"initial_damping", p.initial_damping},
          {"damping_up", p.damping_up},
          {"damping_down", p.damping_down},
          {"step_tolerance", p.step_tolerance},
          {"objective_tolerance", p.objective_tolerance},
          {"gradient_tolerance", p.gradient_tolerance}};
}

Json ToJson(const AnnealParams& p) {
  return {{"iterations", p.iterations},
          {"initial_temperature", p.initial_temperature},
          {"cooling_rate", p.cooling_rate},
          {"reference_iterations", p.reference_iterations},
          {"translation_step", p.translation_step},
          {"rotation_step", p.rotation_step},
          {"joint_step", p.joint_step},
          {"rigid_probability", p.rigid_probability},
          {"cone_half_angle", p.cone_half_angle},
          {"distinct_translation", p.distinct_translation},
          {"distinct_rotation", p.distinct_rotation},
          {"keep", p.keep},
          {"energy_beta", p.energy.beta},
          {"energy_cap_depth", p.energy.cap_depth},
          {"energy_cap_value", p.energy.cap_value},
          {"close_epsilon", p.close.epsilon},
          {"close_min_step", p.close.min_step},
          {"close_max_steps", p.close.max_steps}};
}

void UpdateFromJson(const Json& j, ObjectiveConfig* c) {
  CheckKeys(j, {"lambda_a", "lambda_r", "lambda_t", "lambda_i", "tau_n", "delta_r", "n_int"},
            "objective");
  Overlay(j, "lambda_a", &c->lambda_a);
  Overlay(j, "lambda_r", &c->lambda_r);
  Overlay(j, "lambda_t", &c->lambda_t);
  Overlay(j, "lambda_i", &c->lambda_i);
  Overlay(j, "tau_n", &c->tau_n);
  Overlay(j, "delta_r", &c->delta_r);
  Overlay(j, "n_int", &c->n_int);
}

void UpdateFromJson(const Json& j, LmParams* p) {
  CheckKeys(j, {"max_iters", "initial_damping", "damping_up", "damping_down",
                "step_tolerance", "objective_tolerance", "gradient_tolerance"},
            "lm");
  Overlay(j, "max_iters", &p->max_iters);
  Overlay(j, "initial_damping", &p->initial_damping);
  Overlay(j, "damping_up", &p->damping_up);
  Overlay(j, "damping_down", &p->damping_down);
  Overlay(j, "step_tolerance", &p->step_tolerance);
  Overlay(j, "objective_tolerance", &p->objective_tolerance);
  Overlay(j, "gradient_tolerance", &p->gradient_tolerance);
}

void UpdateFromJson(const Json& j, AnnealParams* p) {
  CheckKeys(j, {"iterations", "initial_temperature", "cooling_rate", "reference_iterations",
                "translation_step", "rotation_step", "joint_step", "rigid_probability",
                "cone_half_angle", "distinct_translation", "distinct_rotation", "keep",
                "energy_beta", "energy_cap_depth", "energy_cap_value", "close_epsilon",
                "close_min_step", "close_max_steps"},
            "anneal");
  Overlay(j, "iterations", &p->iterations);
  Overlay(j, "initial_temperature", &p->initial_temperature);
  Overlay(j, "cooling_rate", &p->cooling_rate);
  Overlay(j, "reference_iterations", &p->reference_iterations);
  Overlay(j, "translation_step", &p->translation_step);
  Overlay(j, "rotation_step", &p->rotation_step);
  Overlay(j, "joint_step", &p->joint_step);
  Overlay(j, "rigid_probability", &p->rigid_probability);
  Overlay(j, "cone_half_angle", &p->cone_half_angle);
  Overlay(j, "distinct_translation", &p->distinct_translation);
  Overlay(j, "distinct_rotation", &p->distinct_rotation);
  Overlay(j, "keep", &p->keep);
  Overlay(j, "energy_beta", &p->energy.beta);
  Overlay(j, "energy_cap_depth", &p->energy.cap_depth);
  Overlay(j, "energy_cap_value", &p->energy.cap_value);
  Overlay(j, "close_epsilon", &p->close.epsilon);
  Overlay(j, "close_min_step", &p->close.min_step);
  Overlay(j, "close_max_steps", &p->close.max_steps);
}

}  // namespace handgrasp
