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

#ifndef HANDGRASP_SDF_GRID_H_
#define HANDGRASP_SDF_GRID_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "handgrasp/common.h"
#include "handgrasp/mesh.h"

namespace handgrasp {

struct SdfGridOptions {
  double spacing = 0.002;  // h, meters
  // Margin around the mesh bounds; raised to 2h when smaller.
  double padding = 0.01;
  // Upper bound on the node count.
  size_t max_nodes = size_t{1} << 27;
};

enum class SignMethod { kRayCrossings, kWindingNumber };

struct SdfBuildReport {
  bool watertight = true;
  SignMethod sign_method = SignMethod::kRayCrossings;
  std::array<int, 3> dims{};
};

// Regular grid of signed distances (negative inside), sampled at nodes
// origin + (i, j, k) * spacing. Values are stored row-major with k fastest.
// Immutable; safe for concurrent queries.
class SdfGrid {
 public:
  SdfGrid(const Vec3& origin, double spacing, const std::array<int, 3>& dims,
          std::vector<float> values);

  const Vec3& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  const std::array<int, 3>& dims() const { return dims_; }
  const std::vector<float>& values() const { return values_; }
  Box3 Extent() const;

  float at(int i, int j, int k) const {
    return values_[(static_cast<size_t>(i) * dims_[1] + j) * dims_[2] + k];
  }

  // Tricubic (Catmull-Rom) value, which passes through the node values and
  // is C1, and the exact gradient of that interpolant. Outside the extent
  // the query clamps to the boundary and adds the distance to it, flagging
  // the sample.
  SdfSample Query(const Vec3& p) const;

  // Binary .sdfgrid: origin (3 x f64), spacing (f64), dims (3 x i32), then
  // row-major f32 values, all little endian.
  void Save(const std::filesystem::path& path) const;
  static SdfGrid Load(const std::filesystem::path& path);

 private:
  Vec3 origin_;
  double spacing_;
  std::array<int, 3> dims_;
  std::vector<float> values_;
};

// Samples the exact signed distance to `mesh` at every node. Magnitudes come
// from exact point-triangle distances; signs from ray crossings when the mesh
// is watertight, else from the generalized winding number. Throws
// CapacityError when the node count would exceed `options.max_nodes`.
SdfGrid BuildSdfGrid(const Mesh& mesh, const SdfGridOptions& options,
                     SdfBuildReport* report = nullptr);

// BuildSdfGrid with an on-disk cache. When the HANDGRASP_SDF_CACHE
// environment variable names a directory, grids are stored there keyed by the
// mesh content hash, spacing and padding.
SdfGrid CachedSdfGrid(const Mesh& mesh, const SdfGridOptions& options);

// Generalized winding number of `mesh` at p (1 inside a closed outward mesh,
// 0 outside).
double WindingNumber(const Mesh& mesh, const Vec3& p);

}  // namespace handgrasp

#endif  // HANDGRASP_SDF_GRID_H_
