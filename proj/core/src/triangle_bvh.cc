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

#include "triangle_bvh.h"

#include <algorithm>
#include <limits>
#include <numeric>

namespace handgrasp::internal {
namespace {

constexpr int kLeafSize = 4;

double BoxDistanceSq(const Box3& box, const Vec3& p) {
  Vec3 d = (box.min() - p).cwiseMax(p - box.max()).cwiseMax(0.0);
  return d.squaredNorm();
}

}  // namespace

TriangleBvh::TriangleBvh(const Mesh& mesh) : mesh_(mesh) {
  const int n = mesh.num_faces();
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::vector<Vec3> centroids(n);
  for (int f = 0; f < n; ++f) {
    centroids[f] = (mesh.corner(f, 0) + mesh.corner(f, 1) + mesh.corner(f, 2)) / 3.0;
  }
  nodes_.reserve(2 * n / kLeafSize + 2);
  BuildNode(0, n, centroids);
}

int TriangleBvh::BuildNode(int begin, int end, std::vector<Vec3>& centroids) {
  Node node;
  node.begin = begin;
  node.end = end;
  Box3 centroid_box;
  for (int i = begin; i < end; ++i) {
    int f = order_[i];
    for (int c = 0; c < 3; ++c) node.box.extend(mesh_.corner(f, c));
    centroid_box.extend(centroids[f]);
  }
  int index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return index;

  int axis;
  centroid_box.diagonal().maxCoeff(&axis);
  int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     return centroids[a][axis] < centroids[b][axis];
                   });
  int left = BuildNode(begin, mid, centroids);
  int right = BuildNode(mid, end, centroids);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

TriangleBvh::Hit TriangleBvh::Closest(const Vec3& p, int hint_face) const {
  Hit best{std::numeric_limits<double>::infinity(), -1, Vec3::Zero()};
  auto test_face = [&](int f) {
    Vec3 q = ClosestPointOnTriangle(p, mesh_.corner(f, 0), mesh_.corner(f, 1),
                                    mesh_.corner(f, 2));
    double d2 = (q - p).squaredNorm();
    if (d2 < best.distance_sq) best = {d2, f, q};
  };
  if (hint_face >= 0) test_face(hint_face);

  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (BoxDistanceSq(node.box, p) >= best.distance_sq) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) test_face(order_[i]);
      continue;
    }
    double dl = BoxDistanceSq(nodes_[node.left].box, p);
    double dr = BoxDistanceSq(nodes_[node.right].box, p);
    // Push the farther child first so the nearer one is visited next.
    if (dl < dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best;
}

}  // namespace handgrasp::internal
