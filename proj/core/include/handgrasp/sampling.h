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

#ifndef HANDGRASP_SAMPLING_H_
#define HANDGRASP_SAMPLING_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "handgrasp/mesh.h"

namespace handgrasp {

// The engine used for every random stream in the library.
using Rng = std::mt19937_64;

// Independent stream for (seed, stream index).
Rng MakeRng(uint64_t seed, uint64_t stream = 0);

// Uniform point in triangle (a, b, c) from two uniforms in [0, 1).
Vec3 UniformInTriangle(const Vec3& a, const Vec3& b, const Vec3& c, double u,
                       double v);

// `n` points distributed by area over the mesh surface. Faces are chosen by
// systematic sampling of the area CDF; positions within a face are uniform.
// Deterministic in `rng_seed`.
std::vector<SurfacePoint> SampleSurface(const Mesh& mesh, int n,
                                        uint64_t rng_seed);

// Greedy farthest-point subset of `points`, starting from index 0. Returns
// indices in selection order, so every prefix is itself well spread.
std::vector<int> FarthestPointOrder(std::span<const Vec3> points, int count);

}  // namespace handgrasp

#endif  // HANDGRASP_SAMPLING_H_
