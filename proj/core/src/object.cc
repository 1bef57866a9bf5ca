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

#include "handgrasp/object.h"

#include <utility>

#include "handgrasp/sampling.h"

namespace handgrasp {

ObjectModel ObjectModel::FromMesh(const Mesh& mesh, const ObjectOptions& options) {
  ObjectModel object;
  object.options_ = options;
  object.mesh_ = std::make_shared<Mesh>(mesh);
  object.grid_ = std::make_shared<SdfGrid>(CachedSdfGrid(mesh, options.grid));
  object.samples_ = std::make_shared<std::vector<SurfacePoint>>(
      SampleSurface(mesh, options.num_samples, options.seed));
  return object;
}

ObjectModel ObjectModel::FromPrimitive(const PrimitiveShape& shape,
                                       const Rigid& placement,
                                       const ObjectOptions& options) {
  ObjectModel object;
  object.options_ = options;
  object.primitive_ = shape;
  object.placement_ = placement;
  object.mesh_ = std::make_shared<Mesh>(shape.Tessellate(48).Transformed(placement));
  std::vector<SurfacePoint> samples = shape.SampleSurface(options.num_samples, options.seed);
  for (SurfacePoint& s : samples) {
    s.position = placement.Apply(s.position);
    s.normal = placement.Rotate(s.normal);
  }
  object.samples_ = std::make_shared<std::vector<SurfacePoint>>(std::move(samples));
  return object;
}

SdfSample ObjectModel::Query(const Vec3& p) const {
  if (grid_) return grid_->Query(p);
  SdfSample s = primitive_->Evaluate(placement_.ApplyInverse(p));
  s.gradient = placement_.Rotate(s.gradient);
  return s;
}

ObjectModel ObjectModel::Transformed(const Rigid& transform) const {
  if (primitive_) {
    ObjectModel moved = *this;
    moved.placement_ = transform * placement_;
    moved.mesh_ = std::make_shared<Mesh>(mesh_->Transformed(transform));
    std::vector<SurfacePoint> samples = *samples_;
    for (SurfacePoint& s : samples) {
      s.position = transform.Apply(s.position);
      s.normal = transform.Rotate(s.normal);
    }
    moved.samples_ = std::make_shared<std::vector<SurfacePoint>>(std::move(samples));
    return moved;
  }
  return FromMesh(mesh_->Transformed(transform), options_);
}

}  // namespace handgrasp
