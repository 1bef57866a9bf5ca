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

#include "handgrasp/scenes.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "handgrasp/mesh_io.h"
#include "handgrasp/sampler.h"
#include "handgrasp/sampling.h"
#include "handgrasp/serialization.h"

namespace handgrasp {
namespace {

using Profile = std::vector<Eigen::Vector2d>;

double Number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw InputError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::string Text(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw InputError(std::string("'") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? base / path : path;
}

ObjectModel BuildObject(const Json& j, const std::filesystem::path& base,
                        const ObjectOptions& options, std::optional<Mesh>* field_mesh,
                        std::vector<double>* field_values, const Json& contacts) {
  if (!j.is_object()) throw InputError("'object' must be a JSON object");
  if (j.contains("mesh")) {
    std::filesystem::path path = Resolve(base, Text(j, "mesh"));
    if (!std::filesystem::exists(path)) throw InputError("mesh not found: " + path.string());
    if (contacts.contains("field")) {
      throw InputError("use either an object mesh or a contact field, not both");
    }
    return ObjectModel::FromMesh(LoadMesh(path), options);
  }
  if (j.contains("field_mesh")) {
    std::filesystem::path path = Resolve(base, Text(j, "field_mesh"));
    if (!std::filesystem::exists(path)) throw InputError("mesh not found: " + path.string());
    std::string property = contacts.value("property", std::string());
    auto [mesh, values] = LoadPlyWithScalar(path, property);
    *field_mesh = mesh;
    *field_values = std::move(values);
    return ObjectModel::FromMesh(mesh, options);
  }
  std::string generator = Text(j, "generator");
  if (generator == "cylinder") {
    return ObjectModel::FromMesh(
        MakeCylinder(Number(j, "radius", kCylinderRadius), Number(j, "height", kCylinderHeight),
                     64),
        options);
  }
  if (generator == "box") {
    Vec3 half(Number(j, "hx", 0.035), Number(j, "hy", 0.025), Number(j, "hz", 0.07));
    return ObjectModel::FromMesh(MakeBox(half), options);
  }
  if (generator == "sphere") {
    return ObjectModel::FromPrimitive(PrimitiveShape::Sphere(Number(j, "radius", 0.04)),
                                      Rigid::Identity(), options);
  }
  if (generator == "mug") return ObjectModel::FromMesh(MakeMugMesh(), options);
  if (generator == "flashlight") return ObjectModel::FromMesh(MakeFlashlightMesh(), options);
  throw InputError("unknown object generator '" + generator + "'");
}

}  // namespace

Mesh MakeMugMesh(int segments) {
  const double r = 0.04, h = 0.1, wall = 0.005, floor = 0.008;
  Profile profile = {{0, 0}, {r, 0}, {r, h}, {r - wall, h}, {r - wall, floor}, {0, floor}};
  return MakeLathe(profile, segments);
}

Mesh MakeFlashlightMesh(int segments) {
  Profile profile = {{0, 0},        {0.017, 0},    {0.017, 0.11},
                     {0.025, 0.125}, {0.025, 0.16}, {0, 0.16}};
  return MakeLathe(profile, segments);
}

ContactMap PlantedContactMap(const ObjectModel& object, const HandModel& hand,
                             const HandPose& pose, double distance) {
  Kinematics kin = ForwardKinematics(hand, pose);
  std::vector<ContactPoint> points;
  points.reserve(object.samples().size());
  for (const SurfacePoint& s : object.samples()) {
    ClosestSegment c = FindClosestSegment(hand, kin, s.position);
    points.push_back({s.position, s.normal,
                      c.sample.value <= distance ? kAttractive : kRepulsive});
  }
  ContactMap map(std::move(points), kNoThreshold, "planted");
  if (map.NumAttractive() == 0) throw Error("planted pose touches no sample points");
  return map;
}

HandPose PlantCylinderWrap(const ObjectModel& cylinder, const HandModel& hand,
                           uint64_t seed, double standoff) {
  Rng rng = MakeRng(seed, 7);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double azimuth = 2.0 * std::numbers::pi * uniform(rng);
  const double height = kCylinderHeight * (0.35 + 0.3 * uniform(rng));
  const double roll = 0.3 * (uniform(rng) - 0.5);
  Vec3 n(std::cos(azimuth), std::sin(azimuth), 0.0);
  Vec3 a = kCylinderRadius * n + Vec3(0, 0, height);
  Rigid t;
  t.rotation = ApproachRotation(n, roll);
  t.translation = a + (standoff + hand.palm_offset()) * n;
  return CloseFingers(hand.OpenPose(t), cylinder, hand);
}

Scene MakeCylinderScene(const HandModel& hand, uint64_t seed, const SceneOptions& options) {
  ObjectModel object = ObjectModel::FromMesh(
      MakeCylinder(kCylinderRadius, kCylinderHeight, 64), options.object);
  HandPose planted = PlantCylinderWrap(object, hand, seed, options.planted_standoff);
  ContactMap map = PlantedContactMap(object, hand, planted, options.contact_distance);
  return {"cylinder-wrap", std::move(object), std::move(map), planted};
}

Scene MakeBoxButtonScene(const SceneOptions& options) {
  const Vec3 half(0.035, 0.025, 0.07);
  ObjectModel object = ObjectModel::FromMesh(MakeBox(half), options.object);
  std::vector<ContactRegion> regions = {
      // Button near the top of the front face, and a grip patch on the back.
      ContactRegion::Ball(Vec3(0, half.y(), 0.045), 0.012, kAttractive),
      ContactRegion::Ball(Vec3(0, -half.y(), 0.03), 0.022, kAttractive),
  };
  ContactMap map = ManualContactMap(object.samples(), regions);
  return {"box-button", std::move(object), std::move(map), std::nullopt};
}

Scene MakeSphereScene(const SceneOptions& options) {
  ObjectModel object = ObjectModel::FromPrimitive(PrimitiveShape::Sphere(0.04),
                                                  Rigid::Identity(), options.object);
  std::vector<ContactRegion> regions = {
      ContactRegion::Slab(Vec3::UnitX(), 0.025, 1.0, kAttractive),
      ContactRegion::Slab(-Vec3::UnitX(), 0.025, 1.0, kAttractive),
  };
  ContactMap map = ManualContactMap(object.samples(), regions);
  return {"sphere", std::move(object), std::move(map), std::nullopt};
}

Scene MakeMugScene(const SceneOptions& options) {
  ObjectModel object = ObjectModel::FromMesh(MakeMugMesh(), options.object);
  std::vector<ContactRegion> regions = {ContactRegion::Cylinder(
      Vec3::Zero(), Vec3::UnitZ(), 0.038, 0.042, 0.025, 0.085, kAttractive)};
  ContactMap map = ManualContactMap(object.samples(), regions);
  return {"mug", std::move(object), std::move(map), std::nullopt};
}

Scene MakeFlashlightScene(const SceneOptions& options) {
  ObjectModel object = ObjectModel::FromMesh(MakeFlashlightMesh(), options.object);
  std::vector<ContactRegion> regions = {ContactRegion::Cylinder(
      Vec3::Zero(), Vec3::UnitZ(), 0.015, 0.019, 0.02, 0.1, kAttractive)};
  ContactMap map = ManualContactMap(object.samples(), regions);
  return {"flashlight", std::move(object), std::move(map), std::nullopt};
}

std::vector<std::string> SceneNames() {
  return {"cylinder-wrap", "box-button", "sphere", "mug", "flashlight"};
}

Scene MakeScene(const std::string& name, const HandModel& hand, uint64_t seed,
                const SceneOptions& options) {
  if (name == "cylinder-wrap") return MakeCylinderScene(hand, seed, options);
  if (name == "box-button") return MakeBoxButtonScene(options);
  if (name == "sphere") return MakeSphereScene(options);
  if (name == "mug") return MakeMugScene(options);
  if (name == "flashlight") return MakeFlashlightScene(options);
  throw InputError("unknown scene '" + name + "'");
}

std::filesystem::path ShippedManifestPath() {
  std::vector<std::filesystem::path> roots;
  if (const char* env = std::getenv("HANDGRASP_DATA_DIR")) roots.emplace_back(env);
  roots.emplace_back(HANDGRASP_DATA_DIR);
  for (const auto& root : roots) {
    if (root.empty()) continue;
    std::filesystem::path p = root / "scenarios" / "manifest.json";
    if (std::filesystem::exists(p)) return p;
  }
  throw InputError("shipped scenario manifest not found");
}

std::vector<ScenarioSpec> ReadScenarioManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario manifest " + path.string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("scenarios") ||
      !manifest["scenarios"].is_array()) {
    throw InputError(path.string() + ": expected {\"scenarios\": [...]}");
  }
  std::vector<ScenarioSpec> specs;
  for (const Json& s : manifest["scenarios"]) {
    if (!s.is_object() || !s.contains("name") || !s["name"].is_string()) {
      throw InputError(path.string() + ": every scenario needs a string 'name'");
    }
    specs.push_back({s["name"].get<std::string>(), s, path.parent_path()});
  }
  if (specs.empty()) throw InputError(path.string() + ": no scenarios");
  return specs;
}

EvalScenario BuildScenario(const ScenarioSpec& spec, const HandModel& hand,
                           const SceneOptions& options) {
  const Json& j = spec.spec;
  std::optional<ObjectModel> object;
  std::optional<ContactMap> map;
  std::vector<HandPose> injected;
  if (j.contains("scene")) {
    uint64_t seed = j.value("seed", uint64_t{0});
    Scene scene = MakeScene(Text(j, "scene"), hand, seed, options);
    object = scene.object;
    map = scene.map;
    if (scene.planted && j.value("inject_planted", false)) injected.push_back(*scene.planted);
  } else {
    if (!j.contains("object")) throw InputError("scenario needs 'scene' or 'object'");
    Json contacts = j.value("contacts", Json::object());
    std::optional<Mesh> field_mesh;
    std::vector<double> field_values;
    object = BuildObject(j["object"], spec.base_dir, options.object, &field_mesh,
                         &field_values, contacts);
    if (contacts.contains("contactmap")) {
      map = ContactMap::Load(Resolve(spec.base_dir, Text(contacts, "contactmap")));
    } else if (field_mesh) {
      ScalarContactField field(*field_mesh, field_values);
      map = BuildContactMap(field, object->samples(), Number(contacts, "tau_t", 0.3));
    } else if (contacts.contains("regions")) {
      std::vector<ContactRegion> regions;
      const Json& r = contacts["regions"];
      if (r.is_string()) {
        regions = LoadRegions(Resolve(spec.base_dir, r.get<std::string>()));
      } else if (r.is_array()) {
        std::string text;
        for (const Json& line : r) {
          if (!line.is_string()) throw InputError("region entries must be strings");
          text += line.get<std::string>() + "\n";
        }
        regions = ParseRegions(text);
      } else {
        throw InputError("'regions' must be a file name or a list of lines");
      }
      map = ManualContactMap(object->samples(), regions);
    } else {
      throw InputError("scenario needs 'contacts' (contactmap, regions or a field mesh)");
    }
  }
  if (j.contains("inject")) {
    for (const Json& p : j["inject"]) injected.push_back(PoseFromJson(p));
  }

  TargetPredicate target;
  std::string kind = j.value("target", injected.empty() ? "contact_agreement" : "injected");
  if (kind == "injected") {
    if (injected.empty()) throw InputError("target 'injected' needs injected poses");
    target.kind = TargetPredicate::Kind::kInjected;
  } else if (kind == "pose_ball") {
    target.kind = TargetPredicate::Kind::kPoseBall;
    if (!j.contains("target_pose")) throw InputError("target 'pose_ball' needs 'target_pose'");
    target.target = PoseFromJson(j["target_pose"]);
    target.radius = Number(j, "radius", 1.0);
  } else if (kind == "contact_agreement") {
    target.kind = TargetPredicate::Kind::kContactAgreement;
    target.coverage = Number(j, "coverage", 0.9);
    target.distance = Number(j, "distance", 0.003);
  } else {
    throw InputError("unknown target '" + kind + "'");
  }
  return {spec.name, std::move(*object), std::move(*map), std::move(injected), target};
}

}  // namespace handgrasp
