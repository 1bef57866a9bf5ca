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

// JSON forms of the library's result and configuration types. Readers throw
// InputError on missing or mistyped fields; configuration readers accept
// partial objects and keep defaults for absent keys.

#ifndef HANDGRASP_SERIALIZATION_H_
#define HANDGRASP_SERIALIZATION_H_

#include <vector>

#include <nlohmann/json.hpp>

#include "handgrasp/hand.h"
#include "handgrasp/objective.h"
#include "handgrasp/optimizer.h"
#include "handgrasp/pipeline.h"
#include "handgrasp/sampler.h"

namespace handgrasp {

using Json = nlohmann::json;

Json ToJson(const HandPose& pose);
HandPose PoseFromJson(const Json& j);

Json ToJson(const ResidualReport& report);
Json ToJson(const GraspSeed& seed);
Json ToJson(const std::vector<SampledGrasp>& samples);
Json ToJson(const RankedEntry& entry);
Json ToJson(const RankedGraspSet& set);
Json ToJson(const ScenarioResult& result);
Json ToJson(const EvalReport& report);

Json ToJson(const ObjectiveConfig& config);
Json ToJson(const LmParams& params);
Json ToJson(const AnnealParams& params);
// Overlays the keys present in `j` onto `config`.
void UpdateFromJson(const Json& j, ObjectiveConfig* config);
void UpdateFromJson(const Json& j, LmParams* params);
void UpdateFromJson(const Json& j, AnnealParams* params);

}  // namespace handgrasp

#endif  // HANDGRASP_SERIALIZATION_H_
