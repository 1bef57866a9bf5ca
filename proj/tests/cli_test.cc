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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "handgrasp/contact.h"
#include "handgrasp/mesh_io.h"
#include "test_support.h"

namespace handgrasp::cli {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Result {
  int code = -1;
  std::string out, err;
};

Result RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json ReadJsonFile(const fs::path& path) { return Json::parse(ReadFile(path)); }

// Sphere mesh plus a region spec making its +x half attractive.
struct SphereInputs {
  TempDir dir;
  fs::path mesh = dir / "ball.obj";
  fs::path regions = dir / "ball.regions";

  SphereInputs() {
    WriteObj(mesh, {{"ball", MakeIcosphere(0.04, 3)}});
    std::ofstream(regions) << "attract slab 1 0 0  0 1\n";
  }
};

// Flags for a synthesis run small enough for a unit test.
std::vector<std::string> QuickSynthesis(const SphereInputs& in, const fs::path& out) {
  return {"synthesize",     "--object",          in.mesh.string(),
          "--regions",      in.regions.string(), "--out",
          out.string(),     "--n-approach",      "1",
          "--anneal-iterations", "60",           "--lm-max-iters",
          "5",              "--num-samples",     "400",
          "--grid-spacing", "0.004",             "--threads",
          "1"};
}

TEST(ContactMapCommandTest, UnitFieldIsFullyAttractive) {
  TempDir dir;
  Mesh mesh = MakeIcosphere(0.05, 2);
  WritePly(dir / "field.ply", mesh, false, "quality",
           std::vector<double>(mesh.vertices().size(), 1.0));
  Result r = RunCli({"contactmap", "--field", (dir / "field.ply").string(), "--num-samples",
                     "500", "-o", (dir / "m.contactmap").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("points 500 attractive 500 (100.00%)"), std::string::npos) << r.out;
}

TEST(ContactMapCommandTest, ThresholdFlagAndRoundTripCounts) {
  TempDir dir;
  Mesh mesh = MakeIcosphere(0.05, 2);
  std::vector<double> values;
  for (const Vec3& v : mesh.vertices()) values.push_back(v.z() > 0 ? 0.6 : 0.2);
  WritePly(dir / "field.ply", mesh, true, "contact", values);
  auto make = [&](const std::string& tau) {
    return RunCli({"contactmap", "--field", (dir / "field.ply").string(), "--property",
                   "contact", "--tau-t", tau, "--num-samples", "800", "-o",
                   (dir / ("m" + tau + ".contactmap")).string()});
  };
  Result low = make("0.1"), high = make("0.7");
  ASSERT_EQ(low.code, kExitOk) << low.err;
  ASSERT_EQ(high.code, kExitOk) << high.err;
  EXPECT_NE(low.out.find("attractive 800 "), std::string::npos) << low.out;
  EXPECT_NE(high.out.find("attractive 0 "), std::string::npos) << high.out;

  Result mid = make("0.3");
  ASSERT_EQ(mid.code, kExitOk);
  ContactMap map = ContactMap::Load(dir / "m0.3.contactmap");
  EXPECT_EQ(map.tau_t(), 0.3);
  EXPECT_GT(map.NumAttractive(), 300);
  EXPECT_LT(map.NumAttractive(), 500);
  Result inspect = RunCli({"contactmap", "--inspect", (dir / "m0.3.contactmap").string()});
  ASSERT_EQ(inspect.code, kExitOk);
  // The summary of the reloaded map is the last line of the creating run.
  std::string created = mid.out.substr(mid.out.find("points"));
  EXPECT_EQ(inspect.out, created);
}

TEST(ContactMapCommandTest, InputErrorsExitWithTwo) {
  TempDir dir;
  EXPECT_EQ(RunCli({"contactmap", "--field", (dir / "missing.ply").string(), "-o",
                    (dir / "m.contactmap").string()})
                .code,
            kExitInput);
  EXPECT_EQ(RunCli({"contactmap", "-o", (dir / "m.contactmap").string()}).code, kExitInput);
  EXPECT_EQ(RunCli({"contactmap", "--tau-t", "abc"}).code, kExitInput);
  EXPECT_EQ(RunCli({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(RunCli({"--help"}).code, kExitOk);
}

TEST(SynthesizeCommandTest, SameSeedGivesByteIdenticalOutput) {
  SphereInputs in;
  std::vector<std::string> a = QuickSynthesis(in, in.dir / "a");
  std::vector<std::string> b = QuickSynthesis(in, in.dir / "b");
  for (auto* args : {&a, &b}) {
    args->insert(args->end(), {"--seed", "42"});
  }
  ASSERT_EQ(RunCli(a).code, kExitOk);
  ASSERT_EQ(RunCli(b).code, kExitOk);
  for (const char* file : {"ranked.json", "samples.json", "config.json"}) {
    EXPECT_EQ(ReadFile(in.dir / "a" / file), ReadFile(in.dir / "b" / file)) << file;
  }
}

TEST(SynthesizeCommandTest, TopKExportsThatManyObjFiles) {
  SphereInputs in;
  std::vector<std::string> args = QuickSynthesis(in, in.dir / "run");
  args.insert(args.end(), {"--top-k", "5"});
  Result r = RunCli(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  int objs = 0;
  for (const auto& entry : fs::directory_iterator(in.dir / "run" / "grasps")) {
    objs += entry.path().extension() == ".obj";
  }
  EXPECT_EQ(objs, 5);
  EXPECT_TRUE(fs::exists(in.dir / "run" / "grasps" / "grasp_rank001.obj"));
  // The object group comes first.
  std::string text = ReadFile(in.dir / "run" / "grasps" / "grasp_rank001.obj");
  EXPECT_EQ(text.find("o object"), text.find("o "));

  Result exported = RunCli({"export", "--run", (in.dir / "run").string(), "--top-k", "2",
                            "--metric", "contact_energy", "-o", (in.dir / "ce").string()});
  ASSERT_EQ(exported.code, kExitOk) << exported.err;
  EXPECT_TRUE(fs::exists(in.dir / "ce" / "grasp_rank002.obj"));
  EXPECT_FALSE(fs::exists(in.dir / "ce" / "grasp_rank003.obj"));
}

TEST(SynthesizeCommandTest, ConfigEchoMatchesFlagsAndReproducesRun) {
  SphereInputs in;
  std::vector<std::string> args = QuickSynthesis(in, in.dir / "first");
  args.insert(args.end(), {"--lambda-a", "120", "--tau-n", "0.6", "--seed", "7"});
  ASSERT_EQ(RunCli(args).code, kExitOk);
  Json echo = ReadJsonFile(in.dir / "first" / "config.json");
  EXPECT_EQ(echo["objective"]["lambda_a"], 120.0);
  EXPECT_EQ(echo["objective"]["tau_n"], 0.6);
  EXPECT_EQ(echo["seed"], 7);
  EXPECT_EQ(echo["n_approach"], 1);
  EXPECT_EQ(echo["anneal"]["iterations"], 60);
  EXPECT_EQ(echo["lm"]["max_iters"], 5);
  EXPECT_EQ(echo["object"], fs::absolute(in.mesh).lexically_normal().string());
  EXPECT_FALSE(echo.contains("threads"));
  EXPECT_EQ(ReadJsonFile(in.dir / "first" / "ranked.json")["config"], echo);

  Result again = RunCli({"synthesize", "--config", (in.dir / "first" / "config.json").string(),
                         "--out", (in.dir / "second").string(), "--threads", "2"});
  ASSERT_EQ(again.code, kExitOk) << again.err;
  EXPECT_EQ(ReadFile(in.dir / "first" / "ranked.json"),
            ReadFile(in.dir / "second" / "ranked.json"));
}

TEST(SynthesizeCommandTest, ExitCodes) {
  SphereInputs in;
  std::vector<std::string> args = QuickSynthesis(in, in.dir / "x");
  args[2] = (in.dir / "nope.obj").string();
  Result missing = RunCli(args);
  EXPECT_EQ(missing.code, kExitInput);
  EXPECT_NE(missing.err.find("nope.obj"), std::string::npos);
  EXPECT_FALSE(fs::exists(in.dir / "x"));

  args = QuickSynthesis(in, in.dir / "y");
  args.insert(args.end(), {"--lm-damping-down", "2"});
  EXPECT_EQ(RunCli(args).code, kExitInput);

  std::ofstream(in.dir / "bad.json") << R"({"lambda_q": 1})";
  args = QuickSynthesis(in, in.dir / "z");
  args.insert(args.end(), {"--config", (in.dir / "bad.json").string()});
  Result unknown = RunCli(args);
  EXPECT_EQ(unknown.code, kExitInput);
  EXPECT_NE(unknown.err.find("lambda_q"), std::string::npos);

  // A contact map from a different object fails validation as an input error.
  ContactMap far({{Vec3(5, 5, 5), Vec3::UnitZ(), kAttractive}}, 0.3, "far");
  far.Save(in.dir / "far.contactmap");
  args = {"synthesize", "--object", in.mesh.string(), "--contactmap",
          (in.dir / "far.contactmap").string(), "--out", (in.dir / "w").string()};
  EXPECT_EQ(RunCli(args).code, kExitInput);
}

std::vector<std::string> QuickEval(const fs::path& out) {
  return {"eval", "--out", out.string(), "--n-approach", "1", "--anneal-iterations", "40",
          "--lm-max-iters", "3", "--num-samples", "400", "--grid-spacing", "0.004",
          "--threads", "1"};
}

TEST(EvalCommandTest, ShippedManifestReportsEveryScenario) {
  TempDir dir;
  Result r = RunCli(QuickEval(dir / "report.json"));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json report = ReadJsonFile(dir / "report.json");
  ASSERT_EQ(report["scenarios"].size(), 3u);
  for (const Json& s : report["scenarios"]) {
    EXPECT_TRUE(s.contains("residual_rank"));
    EXPECT_TRUE(s.contains("contact_energy_rank"));
    EXPECT_GE(s["residual_rank"].get<int>(), 1);
    EXPECT_LE(s["residual_rank"].get<int>(), s["num_entries"].get<int>() + 1);
  }
  for (const char* key : {"median_residual_rank", "median_contact_energy_rank",
                          "median_top1_grasp_by_residual",
                          "median_top1_grasp_by_contact_energy"}) {
    EXPECT_TRUE(report[key].is_number()) << key;
  }
  EXPECT_TRUE(report["errors"].empty());
  EXPECT_FALSE(report["config"].contains("object"));
}

TEST(EvalCommandTest, MissingMeshNamesTheScenario) {
  TempDir dir;
  std::ofstream(dir / "manifest.json") << R"({"scenarios": [
    {"name": "ghost", "object": {"mesh": "ghost.obj"},
     "contacts": {"regions": "ghost.regions"}},
    {"name": "ball", "scene": "sphere"}]})";
  std::vector<std::string> args = QuickEval(dir / "report.json");
  args.insert(args.end(), {"--manifest", (dir / "manifest.json").string()});
  Result r = RunCli(args);
  EXPECT_EQ(r.code, kExitEval);
  EXPECT_NE(r.err.find("ghost"), std::string::npos) << r.err;
  Json report = ReadJsonFile(dir / "report.json");
  ASSERT_EQ(report["errors"].size(), 1u);
  EXPECT_EQ(report["errors"][0]["scenario"], "ghost");
  EXPECT_EQ(report["scenarios"].size(), 1u);
}

}  // namespace
}  // namespace handgrasp::cli
