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

#include "handgrasp/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace handgrasp {

Rng MakeRng(uint64_t seed, uint64_t stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream),
                    static_cast<uint32_t>(stream >> 32), 0x9e3779b9u};
  return Rng(seq);
}

Vec3 UniformInTriangle(const Vec3& a, const Vec3& b, const Vec3& c, double u,
                       double v) {
  double su = std::sqrt(u);
  return (1.0 - su) * a + su * (1.0 - v) * b + su * v * c;
}

std::vector<SurfacePoint> SampleSurface(const Mesh& mesh, int n,
                                        uint64_t rng_seed) {
  if (n < 1) throw InputError("sample count must be >= 1, got " + std::to_string(n));
  std::vector<double> cdf(mesh.num_faces());
  double total = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    total += mesh.FaceArea(f);
    cdf[f] = total;
  }
  // Systematic selection: one uniform offset places n evenly spaced targets
  // on the area CDF, so every face receives its area share to within one
  // point. The order is then shuffled.
  Rng rng = MakeRng(rng_seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double offset = uniform(rng);
  std::vector<int> faces(n);
  int face = 0;
  for (int i = 0; i < n; ++i) {
    double target = (i + offset) / n * total;
    while (face < mesh.num_faces() - 1 && cdf[face] <= target) ++face;
    faces[i] = face;
  }
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(uniform(rng) * (i + 1));
    std::swap(faces[i], faces[std::min(j, i)]);
  }
  std::vector<SurfacePoint> out;
  out.reserve(n);
  for (int f : faces) {
    double u = uniform(rng);
    double v = uniform(rng);
    out.push_back({UniformInTriangle(mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2),
                                     u, v),
                   mesh.face_normals()[f], f});
  }
  return out;
}

std::vector<int> FarthestPointOrder(std::span<const Vec3> points, int count) {
  const int n = static_cast<int>(points.size());
  count = std::min(count, n);
  std::vector<int> order;
  if (count <= 0) return order;
  order.reserve(count);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  int next = 0;
  for (int k = 0; k < count; ++k) {
    order.push_back(next);
    const Vec3& p = points[next];
    int best = -1;
    double best_d = -1.0;
    for (int i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], (points[i] - p).squaredNorm());
      if (dist[i] > best_d) {
        best_d = dist[i];
        best = i;
      }
    }
    next = best;
  }
  return order;
}

}  // namespace handgrasp
