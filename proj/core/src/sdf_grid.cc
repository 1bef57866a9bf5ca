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

#include "handgrasp/sdf_grid.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "triangle_bvh.h"

namespace handgrasp {
namespace {

// Sub-node offsets for the crossing rays; irrational multiples of h keep the
// rays off mesh vertices and edges that sit on grid lines.
constexpr double kRayOffsetY = 1.4142135623730951e-5;
constexpr double kRayOffsetZ = 1.7320508075688772e-5;

double Orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
  return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

// Signed winding count along +x rays from every node of each (j, k) line.
std::vector<int> RayCrossingWinding(const Mesh& mesh, const Vec3& origin,
                                    double h, const std::array<int, 3>& dims) {
  const int nx = dims[0], ny = dims[1], nz = dims[2];
  const double oy = origin.y() + kRayOffsetY * h;
  const double oz = origin.z() + kRayOffsetZ * h;
  std::vector<std::vector<std::pair<double, int>>> lines(
      static_cast<size_t>(ny) * nz);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Vec3& a = mesh.corner(f, 0);
    const Vec3& b = mesh.corner(f, 1);
    const Vec3& c = mesh.corner(f, 2);
    double area2 = Orient2d(a.y(), a.z(), b.y(), b.z(), c.y(), c.z());
    if (area2 == 0.0) continue;
    double ylo = std::min({a.y(), b.y(), c.y()}), yhi = std::max({a.y(), b.y(), c.y()});
    double zlo = std::min({a.z(), b.z(), c.z()}), zhi = std::max({a.z(), b.z(), c.z()});
    int j0 = std::max(0, static_cast<int>(std::ceil((ylo - oy) / h)));
    int j1 = std::min(ny - 1, static_cast<int>(std::floor((yhi - oy) / h)));
    int k0 = std::max(0, static_cast<int>(std::ceil((zlo - oz) / h)));
    int k1 = std::min(nz - 1, static_cast<int>(std::floor((zhi - oz) / h)));
    for (int j = j0; j <= j1; ++j) {
      double y = oy + j * h;
      for (int k = k0; k <= k1; ++k) {
        double z = oz + k * h;
        double w0 = Orient2d(b.y(), b.z(), c.y(), c.z(), y, z);
        double w1 = Orient2d(c.y(), c.z(), a.y(), a.z(), y, z);
        double w2 = Orient2d(a.y(), a.z(), b.y(), b.z(), y, z);
        bool inside = area2 > 0 ? (w0 > 0 && w1 > 0 && w2 > 0)
                                : (w0 < 0 && w1 < 0 && w2 < 0);
        if (!inside) continue;
        double x = (w0 * a.x() + w1 * b.x() + w2 * c.x()) / area2;
        lines[static_cast<size_t>(j) * nz + k].emplace_back(x, area2 > 0 ? 1 : -1);
      }
    }
  }
  std::vector<int> winding(static_cast<size_t>(nx) * ny * nz, 0);
  for (int j = 0; j < ny; ++j) {
    for (int k = 0; k < nz; ++k) {
      auto& crossings = lines[static_cast<size_t>(j) * nz + k];
      std::sort(crossings.begin(), crossings.end());
      int next = static_cast<int>(crossings.size()) - 1;
      int w = 0;
      for (int i = nx - 1; i >= 0; --i) {
        double x = origin.x() + i * h;
        while (next >= 0 && crossings[next].first > x) w += crossings[next--].second;
        winding[(static_cast<size_t>(i) * ny + j) * nz + k] = w;
      }
    }
  }
  return winding;
}

}  // namespace

SdfGrid::SdfGrid(const Vec3& origin, double spacing,
                 const std::array<int, 3>& dims, std::vector<float> values)
    : origin_(origin), spacing_(spacing), dims_(dims), values_(std::move(values)) {
  if (!(spacing > 0.0)) throw InputError("grid spacing must be > 0");
  for (int d : dims) {
    if (d < 2) throw InputError("grid dims must be >= 2");
  }
  size_t n = static_cast<size_t>(dims[0]) * dims[1] * dims[2];
  if (values_.size() != n) throw InputError("grid value count does not match dims");
}

Box3 SdfGrid::Extent() const {
  Vec3 size(dims_[0] - 1, dims_[1] - 1, dims_[2] - 1);
  return Box3(origin_, origin_ + spacing_ * size);
}

namespace {

// Catmull-Rom weights and their derivatives for nodes i-1 .. i+2 at offset t
// in [0, 1] from node i. Missing nodes past either end of an axis are
// linear extrapolations of the two nearest ones; the weights absorb them.
struct AxisStencil {
  int node[4];
  double w[4];
  double dw[4];
};

AxisStencil MakeStencil(int i, double t, int n) {
  const double t2 = t * t, t3 = t2 * t;
  AxisStencil s;
  s.w[0] = 0.5 * (-t3 + 2 * t2 - t);
  s.w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  s.w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  s.w[3] = 0.5 * (t3 - t2);
  s.dw[0] = 0.5 * (-3 * t2 + 4 * t - 1);
  s.dw[1] = 0.5 * (9 * t2 - 10 * t);
  s.dw[2] = 0.5 * (-9 * t2 + 8 * t + 1);
  s.dw[3] = 0.5 * (3 * t2 - 2 * t);
  for (int k = 0; k < 4; ++k) s.node[k] = i - 1 + k;
  if (s.node[0] < 0) {  // f(i-1) = 2 f(i) - f(i+1)
    s.w[1] += 2 * s.w[0], s.w[2] -= s.w[0], s.w[0] = 0;
    s.dw[1] += 2 * s.dw[0], s.dw[2] -= s.dw[0], s.dw[0] = 0;
    s.node[0] = i;
  }
  if (s.node[3] > n - 1) {  // f(i+2) = 2 f(i+1) - f(i)
    s.w[2] += 2 * s.w[3], s.w[1] -= s.w[3], s.w[3] = 0;
    s.dw[2] += 2 * s.dw[3], s.dw[1] -= s.dw[3], s.dw[3] = 0;
    s.node[3] = i + 1;
  }
  return s;
}

}  // namespace

SdfSample SdfGrid::Query(const Vec3& p) const {
  const double inv_h = 1.0 / spacing_;
  Vec3 u = (p - origin_) * inv_h;
  int idx[3];
  AxisStencil st[3];
  int clamp_mask = 0;
  Vec3 uc;
  for (int a = 0; a < 3; ++a) {
    double hi = dims_[a] - 1;
    uc[a] = u[a];
    if (u[a] < 0.0) {
      uc[a] = 0.0;
      clamp_mask |= 1 << a;
    } else if (u[a] > hi) {
      uc[a] = hi;
      clamp_mask |= 1 << a;
    }
    idx[a] = std::min(static_cast<int>(std::floor(uc[a])), dims_[a] - 2);
    st[a] = MakeStencil(idx[a], uc[a] - idx[a], dims_[a]);
  }
  const size_t sy = dims_[2];
  const size_t sx = static_cast<size_t>(dims_[1]) * dims_[2];

  // Contract z, then y, then x, carrying the derivative weights alongside.
  double value = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
  for (int a = 0; a < 4; ++a) {
    if (st[0].w[a] == 0.0 && st[0].dw[a] == 0.0) continue;
    double v_y = 0.0, dy_y = 0.0, dz_y = 0.0;
    for (int b = 0; b < 4; ++b) {
      const size_t row = st[0].node[a] * sx + st[1].node[b] * sy;
      double v_z = 0.0, dz_z = 0.0;
      for (int c = 0; c < 4; ++c) {
        const double f = values_[row + st[2].node[c]];
        v_z += st[2].w[c] * f;
        dz_z += st[2].dw[c] * f;
      }
      v_y += st[1].w[b] * v_z;
      dy_y += st[1].dw[b] * v_z;
      dz_y += st[1].w[b] * dz_z;
    }
    value += st[0].w[a] * v_y;
    gx += st[0].dw[a] * v_y;
    gy += st[0].w[a] * dy_y;
    gz += st[0].w[a] * dz_y;
  }

  SdfSample s;
  s.value = value;
  s.gradient = Vec3(gx, gy, gz) * inv_h;
  const long long cells = static_cast<long long>(dims_[0] - 1) * (dims_[1] - 1) *
                          (dims_[2] - 1);
  s.cell = (static_cast<long long>(idx[0]) * (dims_[1] - 1) + idx[1]) * (dims_[2] - 1) +
           idx[2] + cells * clamp_mask;
  if (clamp_mask != 0) {
    Vec3 c = origin_ + spacing_ * uc;
    Vec3 delta = p - c;
    double dist = delta.norm();
    s.value += dist;
    for (int a = 0; a < 3; ++a) {
      if (clamp_mask & (1 << a)) s.gradient[a] = 0.0;
    }
    if (dist > 0.0) s.gradient += delta / dist;
    s.outside_extent = true;
  }
  return s;
}

void SdfGrid::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(origin_.data()), 3 * sizeof(double));
  out.write(reinterpret_cast<const char*>(&spacing_), sizeof(double));
  for (int d : dims_) {
    int32_t v = d;
    out.write(reinterpret_cast<const char*>(&v), sizeof(int32_t));
  }
  out.write(reinterpret_cast<const char*>(values_.data()),
            static_cast<std::streamsize>(values_.size() * sizeof(float)));
  if (!out) throw InputError("write failed for " + path.string());
}

SdfGrid SdfGrid::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  Vec3 origin;
  double spacing = 0.0;
  int32_t dims32[3] = {0, 0, 0};
  in.read(reinterpret_cast<char*>(origin.data()), 3 * sizeof(double));
  in.read(reinterpret_cast<char*>(&spacing), sizeof(double));
  in.read(reinterpret_cast<char*>(dims32), sizeof(dims32));
  if (!in) throw InputError(path.string() + ": truncated .sdfgrid header");
  std::array<int, 3> dims = {dims32[0], dims32[1], dims32[2]};
  for (int d : dims) {
    if (d < 2 || d > (1 << 20)) throw InputError(path.string() + ": bad grid dims");
  }
  size_t n = static_cast<size_t>(dims[0]) * dims[1] * dims[2];
  std::vector<float> values(n);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw InputError(path.string() + ": truncated .sdfgrid values");
  return SdfGrid(origin, spacing, dims, std::move(values));
}

double WindingNumber(const Mesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    Vec3 a = mesh.corner(f, 0) - p;
    Vec3 b = mesh.corner(f, 1) - p;
    Vec3 c = mesh.corner(f, 2) - p;
    double la = a.norm(), lb = b.norm(), lc = c.norm();
    double num = a.dot(b.cross(c));
    double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

SdfGrid BuildSdfGrid(const Mesh& mesh, const SdfGridOptions& options,
                     SdfBuildReport* report) {
  const double h = options.spacing;
  if (!(h > 0.0)) throw InputError("grid spacing must be > 0");
  const double pad = std::max(options.padding, 2.0 * h);
  Box3 bounds = mesh.Bounds();
  Vec3 origin = bounds.min() - Vec3::Constant(pad);
  Vec3 size = bounds.diagonal() + Vec3::Constant(2.0 * pad);
  std::array<int, 3> dims;
  double nodes = 1.0;
  for (int a = 0; a < 3; ++a) {
    double n = std::ceil(size[a] / h) + 1.0;
    nodes *= n;
    dims[a] = static_cast<int>(std::min(n, 2e9));
  }
  if (nodes > static_cast<double>(options.max_nodes)) {
    throw CapacityError("SDF grid would need " + std::to_string(nodes) +
                        " nodes, cap is " + std::to_string(options.max_nodes));
  }

  const bool watertight = mesh.IsWatertight();
  std::vector<int> winding;
  if (watertight) winding = RayCrossingWinding(mesh, origin, h, dims);

  internal::TriangleBvh bvh(mesh);
  std::vector<float> values(static_cast<size_t>(dims[0]) * dims[1] * dims[2]);
  int hint = -1;
  size_t n = 0;
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k, ++n) {
        Vec3 p = origin + h * Vec3(i, j, k);
        internal::TriangleBvh::Hit hit = bvh.Closest(p, hint);
        hint = hit.face;
        bool inside = watertight ? winding[n] != 0 : WindingNumber(mesh, p) > 0.5;
        double d = std::sqrt(hit.distance_sq);
        values[n] = static_cast<float>(inside ? -d : d);
      }
    }
  }
  if (report != nullptr) {
    report->watertight = watertight;
    report->sign_method =
        watertight ? SignMethod::kRayCrossings : SignMethod::kWindingNumber;
    report->dims = dims;
  }
  return SdfGrid(origin, h, dims, std::move(values));
}

SdfGrid CachedSdfGrid(const Mesh& mesh, const SdfGridOptions& options) {
  const char* dir = std::getenv("HANDGRASP_SDF_CACHE");
  if (dir == nullptr || *dir == '\0') return BuildSdfGrid(mesh, options);
  char key[96];
  std::snprintf(key, sizeof(key), "%016llx_%.6g_%.6g.sdfgrid",
                static_cast<unsigned long long>(mesh.ContentHash()),
                options.spacing, options.padding);
  std::filesystem::path path = std::filesystem::path(dir) / key;
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    try {
      return SdfGrid::Load(path);
    } catch (const InputError&) {
      // Corrupt entry; rebuild below and overwrite it.
    }
  }
  SdfGrid grid = BuildSdfGrid(mesh, options);
  std::filesystem::create_directories(dir, ec);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  try {
    grid.Save(tmp);
    std::filesystem::rename(tmp, path, ec);
  } catch (const InputError&) {
    // Cache writes are best effort.
  }
  return grid;
}

}  // namespace handgrasp
