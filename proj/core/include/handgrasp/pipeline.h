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

#ifndef HANDGRASP_PIPELINE_H_
#define HANDGRASP_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "handgrasp/contact.h"
#include "handgrasp/hand.h"
#include "handgrasp/object.h"
#include "handgrasp/objective.h"
#include "handgrasp/optimizer.h"
#include "handgrasp/sampler.h"

namespace handgrasp {

struct SynthesisConfig {
  ObjectiveConfig objective;
  LmParams lm;
  AnnealParams anneal;  // anneal.seed is overwritten by `seed`
  int n_approach = 10;
  uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

struct RankedEntry {
  int rank = 0;
  int index = 0;  // stable candidate id: 2 * seed index + slot, then injected
  HandPose pose;  // refined
  ResidualReport report;
  HandPose sampled_pose;  // before refinement
  ResidualReport sampled_report;
  double contact_energy = 0.0;  // of the sampled pose
  GraspSeed seed;               // index -1 for injected poses
  bool injected = false;
  LmStopReason lm_reason = LmStopReason::kMaxIters;
  int lm_iterations = 0;
  std::vector<LmIteration> lm_log;
  bool flagged = false;  // refinement failed; pose is the best found
  std::string error;
};

enum class RankMetric { kResidual, kContactEnergy };
RankMetric ParseRankMetric(const std::string& name);
std::string ToString(RankMetric metric);

struct RankedGraspSet {
  RankMetric metric = RankMetric::kResidual;
  std::vector<RankedEntry> entries;
};

// Stable re-sort with dense ranks 1..M. Residual: (L, contact energy,
// index). Contact energy: (energy, L, index).
RankedGraspSet RankBy(RankMetric metric, RankedGraspSet set);

// Seeds, anneals (top poses per seed), refines every candidate with LM and
// ranks by converged L. `injected` poses join the candidate set after the
// sampled ones; this is meant for evaluation only. Deterministic for a fixed
// config regardless of thread count.
RankedGraspSet Synthesize(const ObjectModel& object, const ContactMap& map,
                          const HandModel& hand, const SynthesisConfig& config,
                          const std::vector<HandPose>& injected = {});

struct ContactAgreement {
  double coverage = 0.0;  // attractive points within distance of the hand
  int violations = 0;     // gated repulsive points within distance
};

ContactAgreement MeasureContactAgreement(const HandModel& hand, const HandPose& pose,
                                         const ContactMap& map, double distance,
                                         double tau_n);

struct TargetPredicate {
  enum class Kind { kInjected, kPoseBall, kContactAgreement };
  Kind kind = Kind::kContactAgreement;
  HandPose target;          // kPoseBall
  double radius = 1.0;      // pose-distance units (distinctness radii)
  double coverage = 0.9;    // kContactAgreement
  double distance = 0.003;  // kContactAgreement, meters
};

struct EvalScenario {
  std::string name;
  ObjectModel object;
  ContactMap map;
  std::vector<HandPose> injected;
  TargetPredicate target;
};

struct ScenarioResult {
  std::string name;
  int num_entries = 0;
  int residual_rank = 0;  // num_entries + 1 when no entry qualifies
  bool residual_flagged = false;
  int contact_energy_rank = 0;
  bool contact_energy_flagged = false;
  double top1_grasp_by_residual = 0.0;        // refined pose
  double top1_grasp_by_contact_energy = 0.0;  // sampled pose
  double mean_sampled_total = 0.0;
  double mean_refined_total = 0.0;
};

struct EvalReport {
  std::vector<ScenarioResult> scenarios;
  double median_residual_rank = 0.0;
  double median_contact_energy_rank = 0.0;
  double median_top1_grasp_by_residual = 0.0;
  double median_top1_grasp_by_contact_energy = 0.0;
};

// Whether `entry` satisfies the predicate. Residual rankings judge the
// refined pose, contact-energy rankings the sampled pose.
bool SatisfiesTarget(const RankedEntry& entry, RankMetric metric,
                     const TargetPredicate& target, const HandModel& hand,
                     const ContactMap& map, const SynthesisConfig& config);

ScenarioResult EvaluateScenario(const EvalScenario& scenario, const HandModel& hand,
                                const SynthesisConfig& config,
                                RankedGraspSet* ranked = nullptr);

// Throws InputError on an empty scenario list.
EvalReport Evaluate(const std::vector<EvalScenario>& scenarios,
                    const HandModel& hand, const SynthesisConfig& config);

double Median(std::vector<double> values);

}  // namespace handgrasp

#endif  // HANDGRASP_PIPELINE_H_
