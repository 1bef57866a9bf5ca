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

// Synthetic evaluation objects with contact maps, and the scenario manifest
// reader used by `handgrasp eval`.

#ifndef HANDGRASP_SCENES_H_
#define HANDGRASP_SCENES_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "handgrasp/contact.h"
#include "handgrasp/hand.h"
#include "handgrasp/object.h"
#include "handgrasp/pipeline.h"

namespace handgrasp {

struct SceneOptions {
  ObjectOptions object;
  double contact_distance = 0.003;   // planted maps: attractive within this
  double planted_standoff = 0.002;   // palm surface to object, meters
};

struct Scene {
  std::string name;
  ObjectModel object;
  ContactMap map;
  std::optional<HandPose> planted;
};

inline constexpr double kCylinderRadius = 0.02;
inline constexpr double kCylinderHeight = 0.15;

// Open mug: outer radius 4 cm, height 10 cm, 5 mm wall, 8 mm floor.
Mesh MakeMugMesh(int segments = 64);
// Body radius 1.7 cm flaring to a 2.5 cm head; 16 cm long.
Mesh MakeFlashlightMesh(int segments = 64);

// Marks samples within `distance` of the posed hand attractive.
ContactMap PlantedContactMap(const ObjectModel& object, const HandModel& hand,
                             const HandPose& pose, double distance);

// Side wrap on the upright cylinder (base at z = 0): palm facing the axis at
// a random azimuth and height, fingers closed onto the surface.
HandPose PlantCylinderWrap(const ObjectModel& cylinder, const HandModel& hand,
                           uint64_t seed, double standoff);

// Cylinder with the planted wrap's contacts attractive; caps and the rest of
// the side repulsive.
Scene MakeCylinderScene(const HandModel& hand, uint64_t seed, const SceneOptions& options);
Scene MakeBoxButtonScene(const SceneOptions& options);
Scene MakeSphereScene(const SceneOptions& options);
Scene MakeMugScene(const SceneOptions& options);
Scene MakeFlashlightScene(const SceneOptions& options);

// Built-in scene by name: cylinder-wrap, box-button, sphere, mug, flashlight.
Scene MakeScene(const std::string& name, const HandModel& hand, uint64_t seed,
                const SceneOptions& options);
std::vector<std::string> SceneNames();

// Scenario manifest: {"scenarios": [{...}, ...]}. See docs/scenarios.md.
struct ScenarioSpec {
  std::string name;
  nlohmann::json spec;
  std::filesystem::path base_dir;
};

// The manifest shipped in data/scenarios.
std::filesystem::path ShippedManifestPath();

std::vector<ScenarioSpec> ReadScenarioManifest(const std::filesystem::path& path);
EvalScenario BuildScenario(const ScenarioSpec& spec, const HandModel& hand,
                           const SceneOptions& options);

}  // namespace handgrasp

#endif  // HANDGRASP_SCENES_H_
