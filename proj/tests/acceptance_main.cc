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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. `--only N` runs a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "handgrasp/contact.h"
#include "handgrasp/mesh.h"
#include "handgrasp/objective.h"
#include "handgrasp/optimizer.h"
#include "handgrasp/pipeline.h"
#include "handgrasp/sampling.h"
#include "handgrasp/scenes.h"
#include "handgrasp/sdf_grid.h"
#include "jacobian_check.h"
#include "test_support.h"

#ifdef HANDGRASP_HAVE_CLI
#include "cli.h"
#endif

namespace handgrasp {
namespace {

namespace fs = std::filesystem;
using testing::BarrettHand;
using testing::TestRng;

// Pinned tolerances and budgets.
constexpr double kSdfSpacing = 0.002;           // h for criterion 1
constexpr int kSdfProbes = 1000;                // per mesh
constexpr double kGradientNormTolerance = 0.1;  // |‖∇‖ - 1|
constexpr double kSdfBudgetSeconds = 10.0;
constexpr int kJacobianPoses = 20;
constexpr double kJacobianTolerance = 1e-4;
constexpr double kJacobianBudgetSeconds = 30.0;
constexpr double kLinearTolerance = 1e-10;
constexpr int kLinearMaxIterations = 3;
constexpr double kRosenbrockTolerance = 1e-6;
constexpr int kRankSeeds = 10;
constexpr int kRankMinCandidates = 100;
constexpr double kMaxMedianResidualRank = 5.0;
constexpr double kRankSeparation = 5.0;
constexpr double kRankBudgetSeconds = 15 * 60.0;
constexpr int kDominanceRequired = 4;  // of 5 scenes
constexpr double kDominanceBudgetSeconds = 30 * 60.0;
constexpr int kEquivarianceTrials = 50;

// Scaled-down annealing budget used by criteria 5 and 6.
constexpr int kApproachPoints = 4;
constexpr int kAnnealIterations = 5000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const Scene& CylinderScene() {
  static const Scene scene = MakeCylinderScene(BarrettHand(), 0, SceneOptions{});
  return scene;
}

// Poses near the planted wrap with joints strictly inside their limits.
HandPose NearPlanted(TestRng& rng) {
  const HandModel& hand = BarrettHand();
  HandPose pose = *CylinderScene().planted;
  pose.transform.translation +=
      testing::UniformInBox(rng, Vec3::Constant(-0.01), Vec3::Constant(0.01));
  pose.transform.rotation =
      (ExpMap(0.2 * testing::RandomUnitVector(rng) * testing::Uniform(rng, 0, 1)) *
       pose.transform.rotation).normalized();
  Eigen::VectorXd mid = 0.5 * (hand.LowerLimits() + hand.UpperLimits());
  Eigen::VectorXd half = 0.5 * (hand.UpperLimits() - hand.LowerLimits());
  for (int d = 0; d < hand.num_dofs(); ++d) {
    double v = pose.joints[d] + testing::Uniform(rng, -0.2, 0.2);
    pose.joints[d] = std::clamp(v, mid[d] - 0.95 * half[d], mid[d] + 0.95 * half[d]);
  }
  return pose;
}

// --- 1: SDF oracle -----------------------------------------------------------

// Analytic field, plus the distance from p to the field's medial set (where
// the exact gradient is undefined).
struct AnalyticField {
  std::function<double(const Vec3&)> sdf;
  std::function<double(const Vec3&)> medial_distance;
  Vec3 lo, hi;
};

Outcome SdfOracle() {
  Stopwatch timer;
  const double h = kSdfSpacing;
  const double r = 0.05;
  const Vec3 half(0.03, 0.02, 0.04);
  struct Case {
    const char* name;
    Mesh mesh;
    AnalyticField field;
  };
  std::vector<Case> cases;
  cases.push_back({"icosphere", MakeIcosphere(r, 4),
                   {[r](const Vec3& p) { return p.norm() - r; },
                    [](const Vec3& p) { return p.norm(); }, Vec3::Constant(-0.07),
                    Vec3::Constant(0.07)}});
  cases.push_back(
      {"box", MakeBox(half),
       {[half](const Vec3& p) { return testing::BoxSdf(p, half); },
        [half](const Vec3& p) {
          // Inside, the medial set is where the two nearest faces tie.
          if (testing::BoxSdf(p, half) >= 0) return std::numeric_limits<double>::infinity();
          std::vector<double> d;
          for (int a = 0; a < 3; ++a) {
            d.push_back(half[a] - p[a]);
            d.push_back(half[a] + p[a]);
          }
          std::sort(d.begin(), d.end());
          return (d[1] - d[0]) / std::sqrt(2.0);
        },
        -half - Vec3::Constant(0.02), half + Vec3::Constant(0.02)}});

  // The tricubic stencil spans two nodes on each side of a query.
  const double stencil_reach = 2.0 * std::sqrt(3.0) * h;
  double worst_value = 0.0, worst_norm = 0.0;
  int gradient_checked = 0, gradient_excluded = 0, literal_failures = 0;
  for (const Case& c : cases) {
    SdfGrid grid = BuildSdfGrid(c.mesh, {h, 0.02});
    TestRng rng(101);
    for (int i = 0; i < kSdfProbes; ++i) {
      Vec3 p = testing::UniformInBox(rng, c.field.lo, c.field.hi);
      SdfSample s = grid.Query(p);
      double exact = c.field.sdf(p);
      worst_value = std::max(worst_value, std::abs(s.value - exact));
      if (std::abs(exact) <= 2 * h) continue;
      double norm_error = std::abs(s.gradient.norm() - 1.0);
      literal_failures += norm_error > kGradientNormTolerance;
      if (c.field.medial_distance(p) < stencil_reach) {
        ++gradient_excluded;
        continue;
      }
      ++gradient_checked;
      worst_norm = std::max(worst_norm, norm_error);
    }
  }
  double seconds = timer.Seconds();
  bool pass = worst_value <= h && worst_norm <= kGradientNormTolerance &&
              seconds < kSdfBudgetSeconds;
  return {pass,
          Format("max |SDF err| %.2e m (tol %.0e); max |norm-1| %.3f (tol %.1f) over %d "
                 "probes, %d within stencil reach of the medial set excluded (%d literal "
                 "misses incl. those); %.1f s (budget %.0f s)",
                 worst_value, h, worst_norm, kGradientNormTolerance, gradient_checked,
                 gradient_excluded, literal_failures, seconds, kSdfBudgetSeconds)};
}

// --- 2: Jacobian ----------------------------------------------------------

Outcome ObjectiveJacobian() {
  Stopwatch timer;
  const Scene& scene = CylinderScene();
  GraspObjective objective(BarrettHand(), scene.object, scene.map, ObjectiveConfig{});
  TestRng rng(202);
  double worst = 0.0;
  int checked = 0, unstable = 0;
  for (int i = 0; i < kJacobianPoses; ++i) {
    testing::JacobianCheck c = testing::CheckObjectiveJacobian(objective, NearPlanted(rng));
    worst = std::max(worst, c.max_relative_error);
    checked += c.rows_checked;
    unstable += c.rows_unstable;
  }
  double seconds = timer.Seconds();
  bool pass = worst < kJacobianTolerance && checked > 0 && seconds < kJacobianBudgetSeconds;
  return {pass, Format("max relative error %.2e (tol %.0e) over %d stable rows, %d rows "
                       "skipped as activation-unstable; %.1f s (budget %.0f s)",
                       worst, kJacobianTolerance, checked, unstable, seconds,
                       kJacobianBudgetSeconds)};
}

// --- 3: Threshold and gate semantics ------------------------------------------

Outcome UnitSemantics() {
  int cases = 0, failures = 0;
  std::string first_failure;
  auto expect = [&](bool ok, const std::string& what) {
    ++cases;
    if (!ok && failures++ == 0) first_failure = what;
  };

  // Contact-map thresholding: attractive iff t >= tau_t, boundary included.
  Mesh mesh = MakeIcosphere(0.05, 2);
  std::vector<SurfacePoint> samples = SampleSurface(mesh, 200, 3);
  for (double tau : {0.1, 0.3, 0.5, 0.9}) {
    for (double t : {0.0, std::nextafter(tau, -1.0), tau, std::nextafter(tau, 2.0), 1.0}) {
      if (t < 0.0 || t > 1.0) continue;
      ScalarContactField field(mesh, std::vector<double>(mesh.vertices().size(), t));
      ContactMap map = BuildContactMap(field, samples, tau);
      int expected = t >= tau ? map.size() : 0;
      expect(map.NumAttractive() == expected, Format("threshold t=%.17g tau=%g", t, tau));
    }
  }

  // Repulsive residual: zero iff the gate is closed (|cos| <= tau_n) or the
  // part is at least delta_r away.
  ObjectiveConfig config;
  const Vec3 n = Vec3::UnitZ();
  const double eps = 1e-9;
  std::vector<double> cosines = {0.0, 0.3, config.tau_n - eps, config.tau_n,
                                 config.tau_n + eps, 0.9, 1.0};
  std::vector<double> distances = {-0.02, -eps, 0.0, config.delta_r - eps, config.delta_r,
                                   config.delta_r + eps, 0.5};
  for (double scale : {0.5, 1.0, 3.0}) {
    for (double sign : {-1.0, 1.0}) {
      for (double cosine : cosines) {
        Vec3 g = scale * Vec3(std::sqrt(1 - cosine * cosine), 0, sign * cosine);
        bool open = std::abs(g.normalized().dot(n)) > config.tau_n;
        expect(RepulsiveGateOpen(g, n, config.tau_n) == open, Format("gate cos=%g", cosine));
        for (double sdf : distances) {
          double r = RepulsiveResidual(sdf, g, n, config);
          double expected =
              open && sdf < config.delta_r ? std::sqrt(config.lambda_r) * (config.delta_r - sdf)
                                           : 0.0;
          expect(r == expected, Format("residual cos=%g sdf=%g", sign * cosine, sdf));
        }
      }
    }
  }

  // The same table through the full objective: a sphere palm over one
  // repulsive point, the object far away.
  HandModel ball = HandModel::Parse(R"(
hand ball
palm palm
check_points 1
segment palm sphere 0.03
thumb palm 0.03 0 0
)");
  ObjectOptions options;
  options.num_samples = 10;
  ObjectModel far = ObjectModel::FromPrimitive(PrimitiveShape::Sphere(0.01),
                                               Rigid::FromTranslation(Vec3(1, 1, 1)), options);
  for (double cosine : {0.0, 0.5, 0.69, 0.71, 1.0}) {
    for (double sdf : {-0.005, 0.0, 0.005, config.delta_r, 0.02}) {
      // Palm center along -u from the point, so the gradient at the point is u.
      Vec3 u(std::sqrt(1 - cosine * cosine), 0, cosine);
      HandPose pose{Rigid::FromTranslation(-u * (0.03 + sdf)), Eigen::VectorXd(0)};
      ContactMap map({{Vec3::Zero(), n, kRepulsive}}, 0.3, "table");
      GraspObjective objective(ball, far, map, config);
      SdfSample s = SegmentSdf(ball, pose, 0, Vec3::Zero());
      double r = RepulsiveResidual(s.value, s.gradient, n, config);
      double reported = objective.Report(pose).grasp_repulsive;
      bool zero_expected = cosine <= config.tau_n || sdf >= config.delta_r;
      expect(std::abs(reported - r * r) <= 1e-15 && (reported == 0.0) == zero_expected,
             Format("objective cos=%g sdf=%g", cosine, sdf));
    }
  }
  return {failures == 0,
          failures == 0 ? Format("%d truth-table cases hold", cases)
                        : Format("%d of %d cases fail, first: %s", failures, cases,
                                 first_failure.c_str())};
}

// --- 4: LM ---------------------------------------------------------------

class LinearProblem : public LeastSquaresProblem {
 public:
  LinearProblem(Eigen::MatrixXd a, Eigen::VectorXd b) : a_(std::move(a)), b_(std::move(b)) {}
  int NumResiduals() const override { return a_.rows(); }
  int TangentDim() const override { return a_.cols(); }
  void Evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* r,
                Eigen::MatrixXd* j) const override {
    if (r) *r = a_ * x - b_;
    if (j) *j = a_;
  }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
};

class RosenbrockProblem : public LeastSquaresProblem {
 public:
  int NumResiduals() const override { return 2; }
  int TangentDim() const override { return 2; }
  void Evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* r,
                Eigen::MatrixXd* j) const override {
    if (r) {
      r->resize(2);
      *r << 10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0];
    }
    if (j) {
      j->resize(2, 2);
      *j << -20.0 * x[0], 10.0, -1.0, 0.0;
    }
  }
};

Outcome LmCorrectness() {
  std::vector<std::string> problems;
  // Linear: r(x) = x - x*, whose Gauss-Newton step is exact.
  TestRng rng(404);
  int worst_iterations = 0;
  double worst_error = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 5;
    Eigen::VectorXd target(n);
    for (int i = 0; i < n; ++i) target[i] = testing::Uniform(rng, -1, 1);
    LmResult result = LevenbergMarquardt(
        LinearProblem(Eigen::MatrixXd::Identity(n, n), target), Eigen::VectorXd::Zero(n),
        LmParams{});
    worst_iterations = std::max(worst_iterations, result.iterations);
    worst_error = std::max(worst_error, (result.x - target).norm());
  }
  if (worst_iterations > kLinearMaxIterations || !(worst_error < kLinearTolerance)) {
    problems.push_back("linear");
  }

  LmParams params;
  params.max_iters = 200;
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  LmResult rosen = LevenbergMarquardt(RosenbrockProblem(), x0, params);
  double rosen_error = (rosen.x - Eigen::Vector2d(1, 1)).cwiseAbs().maxCoeff();
  if (!(rosen_error < kRosenbrockTolerance)) problems.push_back("rosenbrock");

  // Every refinement of a pipeline run has a non-increasing accepted trace.
  const Scene& scene = CylinderScene();
  SynthesisConfig config;
  config.n_approach = 1;
  config.anneal.iterations = 500;
  RankedGraspSet ranked =
      Synthesize(scene.object, scene.map, BarrettHand(), config, {*scene.planted});
  int runs = 0, violations = 0;
  for (const RankedEntry& e : ranked.entries) {
    ++runs;
    double last = std::numeric_limits<double>::infinity();
    bool ok = e.error.empty() && e.report.total <= e.sampled_report.total;
    for (const LmIteration& it : e.lm_log) {
      if (!it.accepted) continue;
      ok &= it.cost <= last;
      last = it.cost;
    }
    violations += !ok;
  }
  if (violations > 0) problems.push_back("pipeline monotonicity");

  std::string detail = Format(
      "linear: <= %d iterations, max error %.1e (tol %.0e, <= %d iterations); rosenbrock "
      "error %.1e (tol %.0e); %d/%d pipeline refinements monotone",
      worst_iterations, worst_error, kLinearTolerance, kLinearMaxIterations, rosen_error,
      kRosenbrockTolerance, runs - violations, runs);
  return {problems.empty(), detail};
}

// --- 5: Rank separation ------------------------------------------------------

Outcome RankSeparation() {
  Stopwatch timer;
  const HandModel& hand = BarrettHand();
  std::vector<double> residual_ranks, energy_ranks;
  int min_entries = std::numeric_limits<int>::max();
  std::string per_seed;
  for (int s = 0; s < kRankSeeds; ++s) {
    Scene scene = MakeCylinderScene(hand, s, SceneOptions{});
    EvalScenario scenario{"cylinder", scene.object, scene.map, {*scene.planted}, {}};
    scenario.target.kind = TargetPredicate::Kind::kInjected;
    SynthesisConfig config;
    config.n_approach = kApproachPoints;
    config.anneal.iterations = kAnnealIterations;
    config.seed = s;
    ScenarioResult r = EvaluateScenario(scenario, hand, config);
    residual_ranks.push_back(r.residual_rank);
    energy_ranks.push_back(r.contact_energy_rank);
    min_entries = std::min(min_entries, r.num_entries);
    per_seed += Format(" %d/%d", r.residual_rank, r.contact_energy_rank);
  }
  double seconds = timer.Seconds();
  double residual = Median(residual_ranks), energy = Median(energy_ranks);
  bool pass = residual <= kMaxMedianResidualRank && energy >= kRankSeparation * residual &&
              min_entries - 1 >= kRankMinCandidates && seconds < kRankBudgetSeconds;
  return {pass, Format("median residual rank %.1f (<= %.0f), median contact-energy rank %.1f "
                       "(>= %.0fx); %d annealed candidates per seed; ranks%s; %.0f s "
                       "(budget %.0f s)",
                       residual, kMaxMedianResidualRank, energy, kRankSeparation,
                       min_entries - 1, per_seed.c_str(), seconds, kRankBudgetSeconds)};
}

// --- 6: L_grasp dominance ---------------------------------------------------

Outcome GraspDominance() {
  Stopwatch timer;
  const HandModel& hand = BarrettHand();
  int wins = 0;
  std::string per_scene;
  for (const std::string& name : SceneNames()) {
    Scene scene = MakeScene(name, hand, 0, SceneOptions{});
    EvalScenario scenario{name, scene.object, scene.map, {}, {}};
    SynthesisConfig config;
    config.n_approach = kApproachPoints;
    config.anneal.iterations = kAnnealIterations;
    ScenarioResult r = EvaluateScenario(scenario, hand, config);
    bool win = r.top1_grasp_by_residual < r.top1_grasp_by_contact_energy;
    wins += win;
    per_scene += Format(" %s %.3g%s%.3g;", name.c_str(), r.top1_grasp_by_residual,
                        win ? "<" : ">=", r.top1_grasp_by_contact_energy);
  }
  double seconds = timer.Seconds();
  bool pass = wins >= kDominanceRequired && seconds < kDominanceBudgetSeconds;
  return {pass, Format("%d/%zu scenes (need %d):%s %.0f s (budget %.0f s)", wins,
                       SceneNames().size(), kDominanceRequired, per_scene.c_str(), seconds,
                       kDominanceBudgetSeconds)};
}

// --- 7: Determinism -----------------------------------------------------------

Outcome Determinism() {
#ifdef HANDGRASP_HAVE_CLI
  testing::TempDir dir;
  fs::path data = ShippedManifestPath().parent_path();
  auto run = [&](const std::string& name, int threads) -> std::vector<std::string> {
    std::vector<std::string> args = {
        "synthesize", "--object", (data / "mug.obj").string(), "--regions",
        (data / "mug_body.regions").string(), "--seed", "42", "--n-approach", "1",
        "--anneal-iterations", "1000", "--threads", std::to_string(threads), "--out",
        (dir / name).string()};
    std::ostringstream out, err;
    if (cli::Run(args, out, err) != cli::kExitOk) return {};
    std::vector<std::string> files;
    for (const char* file : {"ranked.json", "samples.json", "config.json"}) {
      std::ifstream in(dir / name / file, std::ios::binary);
      files.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return files;
  };
  std::vector<std::string> a = run("t1a", 1), b = run("t1b", 1), c = run("t4", 4);
  bool ran = !a.empty() && !b.empty() && !c.empty();
  bool same = ran && a == b && a == c;
  size_t bytes = 0;
  for (const std::string& f : a) bytes += f.size();
  return {same, ran ? Format("synthesize --seed 42: threads 1, 1 and 4 give %s output "
                             "(%zu bytes of JSON)",
                             same ? "byte-identical" : "DIFFERENT", bytes)
                    : std::string("synthesize run failed")};
#else
  return {false, "built without the command line tool"};
#endif
}

// --- 8: Rigid equivariance ---------------------------------------------------

Outcome RigidEquivariance() {
  const HandModel& hand = BarrettHand();
  const Scene& scene = CylinderScene();
  const double h = scene.object.spacing();
  ObjectiveConfig config;
  GraspObjective base(hand, scene.object, scene.map, config);
  TestRng rng(808);
  int passed = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < kEquivarianceTrials; ++trial) {
    HandPose pose = NearPlanted(rng);
    double total = base.Total(pose);
    // "2h-equivalent": the largest change of L from moving the hand by 2h
    // along any axis, in the original frame.
    double tolerance = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      for (double sign : {-1.0, 1.0}) {
        HandPose moved = pose;
        moved.transform.translation[axis] += sign * 2 * h;
        tolerance = std::max(tolerance, std::abs(base.Total(moved) - total));
      }
    }
    Rigid t = testing::RandomRigid(rng, 0.5);
    ObjectModel object = scene.object.Transformed(t);
    ContactMap map = scene.map.Transformed(t);
    GraspObjective transformed(hand, object, map, config);
    HandPose moved_pose = pose;
    moved_pose.transform = t * pose.transform;
    double diff = std::abs(transformed.Total(moved_pose) - total);
    passed += diff < tolerance;
    worst_ratio = std::max(worst_ratio, diff / tolerance);
  }
  return {passed == kEquivarianceTrials,
          Format("%d/%d trials within the 2h-equivalent tolerance (h = %.3g m); worst "
                 "|dL| / tolerance %.3f",
                 passed, kEquivarianceTrials, h, worst_ratio)};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {1, "SDF oracle", SdfOracle},
    {2, "Objective Jacobian", ObjectiveJacobian},
    {3, "Threshold and gate semantics", UnitSemantics},
    {4, "LM correctness", LmCorrectness},
    {5, "Rank separation", RankSeparation},
    {6, "L_grasp dominance", GraspDominance},
    {7, "Determinism", Determinism},
    {8, "Rigid equivariance", RigidEquivariance},
};

}  // namespace
}  // namespace handgrasp

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  bool all_pass = true;
  int ran = 0;
  for (const handgrasp::Criterion& c : handgrasp::kCriteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    handgrasp::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all_pass &= outcome.pass;
    std::printf("%s %d %s: %s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all_pass ? 0 : 1;
}
