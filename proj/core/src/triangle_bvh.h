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

#ifndef HANDGRASP_SRC_TRIANGLE_BVH_H_
#define HANDGRASP_SRC_TRIANGLE_BVH_H_

#include <vector>

#include "handgrasp/mesh.h"

namespace handgrasp::internal {

// Static AABB tree over mesh faces for exact closest-point queries.
class TriangleBvh {
 public:
  explicit TriangleBvh(const Mesh& mesh);

  struct Hit {
    double distance_sq;
    int face;
    Vec3 point;
  };

  // Closest face to p. `hint_face` (may be -1) seeds the search bound.
  Hit Closest(const Vec3& p, int hint_face = -1) const;

 private:
  struct Node {
    Box3 box;
    int left = -1;   // child index, or -1 for leaves
    int right = -1;
    int begin = 0;   // leaf face range into order_
    int end = 0;
  };

  int BuildNode(int begin, int end, std::vector<Vec3>& centroids);

  const Mesh& mesh_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace handgrasp::internal

#endif  // HANDGRASP_SRC_TRIANGLE_BVH_H_
