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

// The `handgrasp` command line: contactmap, synthesize, eval and export.

#ifndef HANDGRASP_TOOLS_CLI_H_
#define HANDGRASP_TOOLS_CLI_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "handgrasp/object.h"
#include "handgrasp/pipeline.h"
#include "handgrasp/serialization.h"

namespace handgrasp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSynthesis = 3;
inline constexpr int kExitEval = 4;

// Everything a synthesize run depends on. Threads and the output directory
// are deliberately absent: neither changes the results.
struct RunConfig {
  std::string object;      // mesh path
  std::string contactmap;  // .contactmap path
  std::string regions;     // region spec path
  std::string field;       // PLY with a per-vertex contact value
  std::string property;    // scalar property name in `field`; empty = quality
  double tau_t = 0.3;
  std::string hand = "barrett-like";
  int num_samples = 5000;
  double grid_spacing = 0.002;
  double grid_padding = 0.02;
  SynthesisConfig synthesis;

  ObjectOptions object_options() const;
};

Json ToJson(const RunConfig& config);
// Overlays `j` onto `config`. Unknown keys throw InputError.
void UpdateFromJson(const Json& j, RunConfig* config);

// Runs the command line; returns the process exit code.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace handgrasp::cli

#endif  // HANDGRASP_TOOLS_CLI_H_
