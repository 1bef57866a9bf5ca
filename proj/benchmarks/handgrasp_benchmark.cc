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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "handgrasp/hand.h"
#include "handgrasp/mesh.h"
#include "handgrasp/objective.h"
#include "handgrasp/optimizer.h"
#include "handgrasp/sampler.h"
#include "handgrasp/scenes.h"
#include "handgrasp/sdf_grid.h"

namespace handgrasp {
namespace {

const HandModel& Barrett() {
  static const HandModel hand = HandModel::Load(ShippedHandPath("barrett-like"));
  return hand;
}

const Scene& Cylinder() {
  static const Scene scene = MakeCylinderScene(Barrett(), 0, SceneOptions{});
  return scene;
}

std::vector<Vec3> RandomPoints(int n, double extent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Vec3> points(n);
  for (Vec3& p : points) p = Vec3(u(rng), u(rng), u(rng));
  return points;
}

void BM_SdfGridBuild(benchmark::State& state) {
  Mesh mesh = MakeIcosphere(0.05, 3);
  SdfGridOptions options{0.001 * state.range(0), 0.01};
  for (auto _ : state) benchmark::DoNotOptimize(BuildSdfGrid(mesh, options));
}
BENCHMARK(BM_SdfGridBuild)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SdfGridQuery(benchmark::State& state) {
  SdfGrid grid = BuildSdfGrid(MakeIcosphere(0.05, 3), {0.002, 0.01});
  std::vector<Vec3> points = RandomPoints(4096, 0.06);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid.Query(points[i++ & 4095]));
  }
}
BENCHMARK(BM_SdfGridQuery);

void BM_ForwardKinematics(benchmark::State& state) {
  const HandModel& hand = Barrett();
  HandPose pose = hand.OpenPose(Rigid::Identity());
  for (auto _ : state) benchmark::DoNotOptimize(ForwardKinematics(hand, pose));
}
BENCHMARK(BM_ForwardKinematics);

void BM_ObjectiveEvaluate(benchmark::State& state) {
  const Scene& scene = Cylinder();
  GraspObjective objective(Barrett(), scene.object, scene.map, ObjectiveConfig{});
  const bool with_jacobian = state.range(0) != 0;
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  for (auto _ : state) {
    objective.Evaluate(*scene.planted, &r, with_jacobian ? &j : nullptr, nullptr);
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(BM_ObjectiveEvaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_RefinePose(benchmark::State& state) {
  const Scene& scene = Cylinder();
  GraspObjective objective(Barrett(), scene.object, scene.map, ObjectiveConfig{});
  HandPose start = *scene.planted;
  start.transform.translation += Vec3(0.004, -0.003, 0.002);
  for (auto _ : state) benchmark::DoNotOptimize(RefinePose(objective, start, LmParams{}));
}
BENCHMARK(BM_RefinePose)->Unit(benchmark::kMillisecond);

void BM_ContactEnergy(benchmark::State& state) {
  const Scene& scene = Cylinder();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ContactEnergy(*scene.planted, scene.object, Barrett()));
  }
}
BENCHMARK(BM_ContactEnergy);

void BM_CloseFingers(benchmark::State& state) {
  const Scene& scene = Cylinder();
  HandPose open = *scene.planted;
  open.joints = Barrett().OpenJoints();
  for (auto _ : state) {
    benchmark::DoNotOptimize(CloseFingers(open, scene.object, Barrett()));
  }
}
BENCHMARK(BM_CloseFingers)->Unit(benchmark::kMicrosecond);

void BM_Anneal(benchmark::State& state) {
  const Scene& scene = Cylinder();
  std::vector<GraspSeed> seeds = GenerateSeeds(scene.object, 1, 0);
  HandPose start = SeedToPose(seeds[0], Barrett());
  AnnealParams params;
  params.iterations = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        Anneal(start, -seeds[0].approach.normal, scene.object, Barrett(), params));
  }
}
BENCHMARK(BM_Anneal)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace handgrasp

BENCHMARK_MAIN();
