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

#ifndef HANDGRASP_OBJECT_H_
#define HANDGRASP_OBJECT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "handgrasp/common.h"
#include "handgrasp/mesh.h"
#include "handgrasp/primitive.h"
#include "handgrasp/sdf_grid.h"

namespace handgrasp {

struct ObjectOptions {
  SdfGridOptions grid = {0.002, 0.02, size_t{1} << 27};
  int num_samples = 5000;  // surface samples kept for contact maps and seeds
  uint64_t seed = 0;
};

// Object geometry: a surface mesh, its signed distance field and area-uniform
// surface samples. The field is either a grid built from the mesh or an exact
// primitive. Cheap to copy; the heavy parts are shared and immutable.
class ObjectModel {
 public:
  static ObjectModel FromMesh(const Mesh& mesh, const ObjectOptions& options);
  static ObjectModel FromPrimitive(const PrimitiveShape& shape,
                                   const Rigid& placement,
                                   const ObjectOptions& options);

  const Mesh& mesh() const { return *mesh_; }
  const std::vector<SurfacePoint>& samples() const { return *samples_; }
  const SdfGrid* grid() const { return grid_.get(); }
  bool is_primitive() const { return primitive_.has_value(); }
  // Grid spacing, or 0 for exact fields.
  double spacing() const { return grid_ ? grid_->spacing() : 0.0; }

  SdfSample Query(const Vec3& p) const;

  // Same object moved by `transform`. Grid objects rebuild their grid from
  // the moved mesh.
  ObjectModel Transformed(const Rigid& transform) const;

 private:
  ObjectModel() = default;

  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const std::vector<SurfacePoint>> samples_;
  std::shared_ptr<const SdfGrid> grid_;
  std::optional<PrimitiveShape> primitive_;
  Rigid placement_;
  ObjectOptions options_;
};

}  // namespace handgrasp

#endif  // HANDGRASP_OBJECT_H_
