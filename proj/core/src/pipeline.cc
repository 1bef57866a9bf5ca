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

#include "handgrasp/pipeline.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <utility>

#include "parallel.h"

namespace handgrasp {
namespace {

struct Candidate {
  HandPose pose;
  double energy = 0.0;
  GraspSeed seed;
  bool injected = false;
};

void CheckMonotone(const std::vector<double>& trace) {
  for (size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1]) {
      throw Error("LM accepted-cost trace increased at step " + std::to_string(i));
    }
  }
}

}  // namespace

RankMetric ParseRankMetric(const std::string& name) {
  if (name == "residual") return RankMetric::kResidual;
  if (name == "contact_energy") return RankMetric::kContactEnergy;
  throw InputError("unknown rank metric '" + name + "'");
}

std::string ToString(RankMetric metric) {
  return metric == RankMetric::kResidual ? "residual" : "contact_energy";
}

RankedGraspSet RankBy(RankMetric metric, RankedGraspSet set) {
  auto key = [metric](const RankedEntry& e) {
    return metric == RankMetric::kResidual
               ? std::make_tuple(e.report.total, e.contact_energy, e.index)
               : std::make_tuple(e.contact_energy, e.report.total, e.index);
  };
  std::stable_sort(set.entries.begin(), set.entries.end(),
                   [&](const RankedEntry& a, const RankedEntry& b) { return key(a) < key(b); });
  for (size_t i = 0; i < set.entries.size(); ++i) {
    set.entries[i].rank = static_cast<int>(i) + 1;
  }
  set.metric = metric;
  return set;
}

RankedGraspSet Synthesize(const ObjectModel& object, const ContactMap& map,
                          const HandModel& hand, const SynthesisConfig& config,
                          const std::vector<HandPose>& injected) {
  config.objective.Validate();
  config.lm.Validate();
  AnnealParams anneal = config.anneal;
  anneal.seed = config.seed;
  anneal.Validate();
  for (const HandPose& p : injected) hand.ValidatePose(p);

  std::vector<GraspSeed> seeds = GenerateSeeds(object, config.n_approach, config.seed);
  std::vector<std::vector<SampledGrasp>> sampled(seeds.size());
  internal::ParallelFor(static_cast<int>(seeds.size()), config.threads, [&](int i) {
    const GraspSeed& seed = seeds[i];
    sampled[i] = Anneal(SeedToPose(seed, hand), -seed.approach.normal, object, hand,
                        anneal, static_cast<uint64_t>(i));
  });

  std::vector<Candidate> candidates;
  std::vector<int> indices;
  for (size_t i = 0; i < seeds.size(); ++i) {
    for (size_t slot = 0; slot < sampled[i].size(); ++slot) {
      candidates.push_back({sampled[i][slot].pose, sampled[i][slot].energy, seeds[i], false});
      indices.push_back(static_cast<int>(i * anneal.keep + slot));
    }
  }
  const int injected_base = static_cast<int>(seeds.size()) * anneal.keep;
  for (size_t k = 0; k < injected.size(); ++k) {
    GraspSeed none;
    none.index = -1;
    candidates.push_back(
        {injected[k], ContactEnergy(injected[k], object, hand, anneal.energy), none, true});
    indices.push_back(injected_base + static_cast<int>(k));
  }
  if (candidates.empty()) throw Error("sampling produced no candidates");

  GraspObjective objective(hand, object, map, config.objective);
  RankedGraspSet set;
  set.entries.resize(candidates.size());
  internal::ParallelFor(static_cast<int>(candidates.size()), config.threads, [&](int i) {
    const Candidate& c = candidates[i];
    RankedEntry& e = set.entries[i];
    e.index = indices[i];
    e.sampled_pose = c.pose;
    e.sampled_report = objective.Report(c.pose);
    e.contact_energy = c.energy;
    e.seed = c.seed;
    e.injected = c.injected;
    try {
      PoseRefinement refined = RefinePose(objective, c.pose, config.lm);
      CheckMonotone(refined.lm.trace);
      e.pose = refined.pose;
      e.report = refined.report;
      e.lm_reason = refined.lm.reason;
      e.lm_iterations = refined.lm.iterations;
      e.lm_log = std::move(refined.lm.log);
      e.flagged = refined.lm.reason == LmStopReason::kSolveFailed;
    } catch (const Error& err) {
      e.pose = c.pose;
      e.report = e.sampled_report;
      e.lm_reason = LmStopReason::kSolveFailed;
      e.flagged = true;
      e.error = err.what();
    }
  });
  return RankBy(RankMetric::kResidual, std::move(set));
}

ContactAgreement MeasureContactAgreement(const HandModel& hand, const HandPose& pose,
                                         const ContactMap& map, double distance,
                                         double tau_n) {
  Kinematics kin = ForwardKinematics(hand, pose);
  int attractive = 0, covered = 0;
  ContactAgreement out;
  for (const ContactPoint& p : map.points()) {
    ClosestSegment c = FindClosestSegment(hand, kin, p.position);
    if (p.label == kAttractive) {
      ++attractive;
      if (c.sample.value <= distance) ++covered;
    } else if (c.sample.value <= distance &&
               RepulsiveGateOpen(c.sample.gradient, p.normal, tau_n)) {
      ++out.violations;
    }
  }
  out.coverage = attractive > 0 ? static_cast<double>(covered) / attractive : 0.0;
  return out;
}

bool SatisfiesTarget(const RankedEntry& entry, RankMetric metric,
                     const TargetPredicate& target, const HandModel& hand,
                     const ContactMap& map, const SynthesisConfig& config) {
  const HandPose& pose =
      metric == RankMetric::kResidual ? entry.pose : entry.sampled_pose;
  switch (target.kind) {
    case TargetPredicate::Kind::kInjected:
      return entry.injected;
    case TargetPredicate::Kind::kPoseBall:
      return PoseDistance(pose, target.target, config.anneal.distinct_translation,
                          config.anneal.distinct_rotation) <= target.radius;
    case TargetPredicate::Kind::kContactAgreement: {
      ContactAgreement a = MeasureContactAgreement(hand, pose, map, target.distance,
                                                   config.objective.tau_n);
      return a.coverage >= target.coverage && a.violations == 0;
    }
  }
  return false;
}

ScenarioResult EvaluateScenario(const EvalScenario& scenario, const HandModel& hand,
                                const SynthesisConfig& config, RankedGraspSet* ranked) {
  RankedGraspSet by_residual =
      Synthesize(scenario.object, scenario.map, hand, config, scenario.injected);
  RankedGraspSet by_energy = RankBy(RankMetric::kContactEnergy, by_residual);

  ScenarioResult result;
  result.name = scenario.name;
  const int m = static_cast<int>(by_residual.entries.size());
  result.num_entries = m;
  auto first_rank = [&](const RankedGraspSet& set, bool* flagged) {
    for (const RankedEntry& e : set.entries) {
      if (SatisfiesTarget(e, set.metric, scenario.target, hand, scenario.map, config)) {
        *flagged = false;
        return e.rank;
      }
    }
    *flagged = true;
    return m + 1;
  };
  result.residual_rank = first_rank(by_residual, &result.residual_flagged);
  result.contact_energy_rank = first_rank(by_energy, &result.contact_energy_flagged);
  result.top1_grasp_by_residual = by_residual.entries.front().report.grasp();
  result.top1_grasp_by_contact_energy = by_energy.entries.front().sampled_report.grasp();
  for (const RankedEntry& e : by_residual.entries) {
    result.mean_sampled_total += e.sampled_report.total / m;
    result.mean_refined_total += e.report.total / m;
  }
  if (ranked != nullptr) *ranked = std::move(by_residual);
  return result;
}

EvalReport Evaluate(const std::vector<EvalScenario>& scenarios,
                    const HandModel& hand, const SynthesisConfig& config) {
  if (scenarios.empty()) throw InputError("evaluation needs at least one scenario");
  EvalReport report;
  std::vector<double> rr, cr, gr, gc;
  for (const EvalScenario& s : scenarios) {
    ScenarioResult r = EvaluateScenario(s, hand, config);
    rr.push_back(r.residual_rank);
    cr.push_back(r.contact_energy_rank);
    gr.push_back(r.top1_grasp_by_residual);
    gc.push_back(r.top1_grasp_by_contact_energy);
    report.scenarios.push_back(std::move(r));
  }
  report.median_residual_rank = Median(rr);
  report.median_contact_energy_rank = Median(cr);
  report.median_top1_grasp_by_residual = Median(gr);
  report.median_top1_grasp_by_contact_energy = Median(gc);
  return report;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty list");
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace handgrasp
