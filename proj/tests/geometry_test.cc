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

#include <array>
#include <cstring>
#include <fstream>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "handgrasp/mesh.h"
#include "handgrasp/mesh_io.h"
#include "handgrasp/primitive.h"
#include "handgrasp/sampling.h"
#include "handgrasp/sdf_grid.h"
#include "test_support.h"

namespace handgrasp {
namespace {

using testing::TempDir;
using testing::TestRng;

// --- meshes and I/O -----------------------------------------------------------

TEST(MeshTest, ProceduralMeshesAreClosedWithUnitNormals) {
  std::vector<Mesh> meshes = {MakeIcosphere(1.0, 3), MakeBox(Vec3(0.1, 0.2, 0.3)),
                              MakeCylinder(0.02, 0.15, 32), MakeCapsule(0.01, 0.03, 16, 4)};
  for (const Mesh& m : meshes) {
    EXPECT_TRUE(m.IsWatertight());
    for (const Vec3& n : m.face_normals()) EXPECT_NEAR(n.norm(), 1.0, 1e-6);
  }
}

TEST(MeshTest, OutOfRangeIndexIsRejected) {
  EXPECT_THROW(Mesh::Build({Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()}, {{0, 1, 3}}),
               InputError);
}

TEST(MeshTest, ContentHashTracksGeometry) {
  Mesh a = MakeBox(Vec3(0.1, 0.1, 0.1));
  EXPECT_EQ(a.ContentHash(), MakeBox(Vec3(0.1, 0.1, 0.1)).ContentHash());
  EXPECT_NE(a.ContentHash(), MakeBox(Vec3(0.1, 0.1, 0.2)).ContentHash());
}

TEST(MeshIoTest, IcosphereObjHasUnitRadius) {
  TempDir dir;
  WriteObj(dir / "sphere.obj", {{"sphere", MakeIcosphere(1.0, 3)}});
  Mesh m = LoadMesh(dir / "sphere.obj");
  ASSERT_GT(m.num_vertices(), 100);
  for (const Vec3& v : m.vertices()) EXPECT_NEAR(v.norm(), 1.0, 1e-5);
}

TEST(MeshIoTest, ZeroAreaFaceIsDroppedAndCounted) {
  TempDir dir;
  // 100 triangles in a strip; one collapses onto a line.
  std::ofstream out(dir / "strip.obj");
  for (int i = 0; i <= 51; ++i) out << "v " << i * 0.01 << " 0 0\nv " << i * 0.01 << " 0.01 0\n";
  for (int i = 0; i < 50; ++i) {
    int a = 2 * i + 1, b = a + 1, c = a + 2, d = a + 3;
    out << "f " << a << " " << c << " " << b << "\n";
    if (i == 20) {
      out << "f " << a << " " << c << " " << c + 2 << "\n";  // collinear
    } else {
      out << "f " << b << " " << c << " " << d << "\n";
    }
  }
  out.close();
  MeshStats stats;
  Mesh m = LoadMesh(dir / "strip.obj", &stats);
  EXPECT_EQ(m.num_faces(), 99);
  EXPECT_EQ(stats.dropped_faces, 1);
}

TEST(MeshIoTest, CylinderPlyBounds) {
  TempDir dir;
  Mesh cylinder = MakeCylinder(0.02, 0.15, 64);
  WritePly(dir / "cyl.ply", cylinder, /*binary=*/true);
  Mesh m = LoadMesh(dir / "cyl.ply");
  // Oracle: extents straight from the generated vertex list.
  Vec3 lo = Vec3::Constant(1e9), hi = Vec3::Constant(-1e9);
  for (const Vec3& v : cylinder.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  Box3 box = m.Bounds();
  EXPECT_TRUE(box.min().isApprox(lo, 1e-6));
  EXPECT_NEAR(box.sizes().x(), 0.04, 1e-6);
  EXPECT_NEAR(box.sizes().y(), 0.04, 1e-6);
  EXPECT_NEAR(box.sizes().z(), 0.15, 1e-6);
}

TEST(MeshIoTest, AsciiAndBinaryPlyAgree) {
  TempDir dir;
  Mesh m = MakeIcosphere(0.05, 2);
  std::vector<double> values(m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) values[i] = i / double(m.num_vertices());
  WritePly(dir / "a.ply", m, false, "quality", values);
  WritePly(dir / "b.ply", m, true, "quality", values);
  auto [ma, va] = LoadPlyWithScalar(dir / "a.ply");
  auto [mb, vb] = LoadPlyWithScalar(dir / "b.ply");
  ASSERT_EQ(ma.num_faces(), mb.num_faces());
  for (int i = 0; i < ma.num_vertices(); ++i) {
    EXPECT_NEAR((ma.vertices()[i] - mb.vertices()[i]).norm(), 0.0, 1e-6);
    EXPECT_NEAR(va[i], vb[i], 1e-6);
    EXPECT_NEAR(va[i], values[i], 1e-6);
  }
  EXPECT_THROW(LoadPlyWithScalar(dir / "a.ply", "temperature"), InputError);
}

TEST(MeshIoTest, ObjPolygonsAreFanTriangulated) {
  TempDir dir;
  std::ofstream(dir / "quad.obj") << "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                                     "vn 0 0 1\nf 1//1 2//1 3//1 4//1\n";
  Mesh m = LoadMesh(dir / "quad.obj");
  EXPECT_EQ(m.num_faces(), 2);
  EXPECT_NEAR(m.SurfaceArea(), 1.0, 1e-12);
}

TEST(MeshIoTest, BadInputsThrow) {
  TempDir dir;
  EXPECT_THROW(LoadMesh(dir / "missing.obj"), InputError);
  std::ofstream(dir / "empty.obj") << "# nothing\n";
  EXPECT_THROW(LoadMesh(dir / "empty.obj"), InputError);
  std::ofstream(dir / "junk.ply") << "ply\nformat ascii 1.0\nelement vertex 3\nend_header\n1 2\n";
  EXPECT_THROW(LoadMesh(dir / "junk.ply"), InputError);
  std::ofstream(dir / "x.stl") << "solid\n";
  EXPECT_THROW(LoadMesh(dir / "x.stl"), InputError);
}

// --- sampling -----------------------------------------------------------------

// Which of the six cube sides a point on MakeBox(0.5) lies on.
int CubeSide(const Vec3& p) {
  int axis;
  p.cwiseAbs().maxCoeff(&axis);
  return 2 * axis + (p[axis] > 0);
}

TEST(SamplingTest, CubeSidesGetEqualShares) {
  Mesh cube = MakeBox(Vec3(0.5, 0.5, 0.5));
  std::vector<SurfacePoint> points = SampleSurface(cube, 6000, 7);
  std::array<int, 6> counts{};
  for (const SurfacePoint& p : points) ++counts[CubeSide(p.position)];
  for (int c : counts) EXPECT_NEAR(c, 1000, 50);
}

TEST(SamplingTest, FaceFrequenciesMatchAreaFractions) {
  // Skewed areas: a lathe with rings of very different radii.
  std::vector<Eigen::Vector2d> profile = {{0, 0}, {0.05, 0}, {0.05, 0.02}, {0.01, 0.08}, {0, 0.08}};
  Mesh mesh = MakeLathe(profile, 12);
  const int n = 100000;
  std::vector<SurfacePoint> points = SampleSurface(mesh, n, 11);
  std::vector<double> observed(mesh.num_faces(), 0.0);
  for (const SurfacePoint& p : points) observed[p.face] += 1;
  double total_area = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) total_area += mesh.FaceArea(f);
  double chi2 = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    double expected = n * mesh.FaceArea(f) / total_area;
    chi2 += (observed[f] - expected) * (observed[f] - expected) / expected;
  }
  boost::math::chi_squared dist(mesh.num_faces() - 1);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.01);
}

TEST(SamplingTest, PointsLieOnTheirFaces) {
  Mesh mesh = MakeIcosphere(0.1, 2);
  for (const SurfacePoint& p : SampleSurface(mesh, 500, 3)) {
    ASSERT_GE(p.face, 0);
    EXPECT_NEAR(p.normal.norm(), 1.0, 1e-6);
    Vec3 b = Barycentric(p.position, mesh.corner(p.face, 0), mesh.corner(p.face, 1),
                         mesh.corner(p.face, 2));
    EXPECT_NEAR(b.sum(), 1.0, 1e-9);
    EXPECT_GE(b.minCoeff(), -1e-9);
    EXPECT_LE(b.maxCoeff(), 1.0 + 1e-9);
    EXPECT_TRUE(p.normal.isApprox(mesh.face_normals()[p.face], 1e-12));
  }
}

TEST(SamplingTest, SinglePointAndDeterminism) {
  Mesh mesh = MakeBox(Vec3(0.1, 0.2, 0.3));
  std::vector<SurfacePoint> one = SampleSurface(mesh, 1, 99);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_GE(one[0].face, 0);
  EXPECT_LT(one[0].face, mesh.num_faces());
  std::vector<SurfacePoint> a = SampleSurface(mesh, 200, 5), b = SampleSurface(mesh, 200, 5);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::memcmp(a[i].position.data(), b[i].position.data(), sizeof(Vec3)), 0);
    EXPECT_EQ(a[i].face, b[i].face);
  }
  EXPECT_THROW(SampleSurface(mesh, 0, 1), InputError);
}

TEST(SamplingTest, FarthestPointPrefixesStaySpread) {
  TestRng rng(4);
  std::vector<Vec3> pts;
  for (int i = 0; i < 400; ++i) pts.push_back(testing::UniformInBox(rng, Vec3::Zero(), Vec3::Ones()));
  std::vector<int> order = FarthestPointOrder(pts, 50);
  ASSERT_EQ(order.size(), 50u);
  EXPECT_EQ(order[0], 0);
  // The selection distance (distance of each new point to the chosen set) is
  // non-increasing.
  double previous = 1e9;
  for (size_t i = 1; i < order.size(); ++i) {
    double d = 1e9;
    for (size_t j = 0; j < i; ++j) d = std::min(d, (pts[order[i]] - pts[order[j]]).norm());
    EXPECT_LE(d, previous + 1e-12);
    previous = d;
  }
}

// --- primitives -----------------------------------------------------------------

TEST(PrimitiveTest, SphereQueryIsExact) {
  SdfSample s = PrimitiveShape::Sphere(0.05).Evaluate(Vec3(0.1, 0, 0));
  EXPECT_EQ(s.value, 0.05);
  EXPECT_EQ(s.gradient, Vec3(1, 0, 0));
}

TEST(PrimitiveTest, CapsuleAxisMidpointIsMinusRadius) {
  SdfSample s = PrimitiveShape::Capsule(0.01, 0.03).Evaluate(Vec3::Zero());
  EXPECT_DOUBLE_EQ(s.value, -0.01);
}

TEST(PrimitiveTest, BoxMatchesOracle) {
  Vec3 half(0.03, 0.02, 0.05);
  PrimitiveShape box = PrimitiveShape::Box(half);
  TestRng rng(2);
  for (int i = 0; i < 1000; ++i) {
    Vec3 p = testing::UniformInBox(rng, Vec3::Constant(-0.1), Vec3::Constant(0.1));
    EXPECT_NEAR(box.Evaluate(p).value, testing::BoxSdf(p, half), 1e-12);
  }
}

TEST(PrimitiveTest, GradientsMatchFiniteDifferences) {
  std::vector<PrimitiveShape> shapes = {PrimitiveShape::Sphere(0.03),
                                        PrimitiveShape::Capsule(0.01, 0.02),
                                        PrimitiveShape::Box(Vec3(0.02, 0.03, 0.01))};
  TestRng rng(8);
  const double eps = 1e-7;
  for (const PrimitiveShape& s : shapes) {
    for (int i = 0; i < 300; ++i) {
      Vec3 p = testing::UniformInBox(rng, Vec3::Constant(-0.06), Vec3::Constant(0.06));
      SdfSample e = s.Evaluate(p);
      Vec3 fd;
      bool same_piece = true;
      for (int a = 0; a < 3; ++a) {
        Vec3 d = Vec3::Zero();
        d[a] = eps;
        SdfSample plus = s.Evaluate(p + d), minus = s.Evaluate(p - d);
        same_piece &= plus.cell == e.cell && minus.cell == e.cell;
        fd[a] = (plus.value - minus.value) / (2 * eps);
      }
      if (!same_piece) continue;
      EXPECT_NEAR((fd - e.gradient).norm(), 0.0, 1e-5) << ToString(s.kind());
    }
  }
}

TEST(PrimitiveTest, SurfaceSamplesLieOnSurface) {
  std::vector<PrimitiveShape> shapes = {PrimitiveShape::Sphere(0.03),
                                        PrimitiveShape::Capsule(0.01, 0.02),
                                        PrimitiveShape::Box(Vec3(0.02, 0.03, 0.01))};
  for (const PrimitiveShape& s : shapes) {
    for (const SurfacePoint& p : s.SampleSurface(300, 1)) {
      SdfSample q = s.Evaluate(p.position);
      EXPECT_NEAR(q.value, 0.0, 1e-12);
      EXPECT_NEAR(p.normal.norm(), 1.0, 1e-9);
    }
    Mesh m = s.Tessellate(24);
    EXPECT_TRUE(m.IsWatertight());
    EXPECT_NEAR(m.SurfaceArea(), s.SurfaceArea(), 0.03 * s.SurfaceArea());
  }
}

TEST(PrimitiveTest, NonPositiveDimensionsThrow) {
  EXPECT_THROW(PrimitiveShape::Sphere(0.0), InputError);
  EXPECT_THROW(PrimitiveShape::Capsule(0.01, -1), InputError);
  EXPECT_THROW(PrimitiveShape::Box(Vec3(0.1, 0, 0.1)), InputError);
}

// --- SDF grids -------------------------------------------------------------------

TEST(SdfGridTest, SphereCenterAndFarPoint) {
  SdfGrid grid = BuildSdfGrid(MakeIcosphere(0.05, 4), {0.002, 0.01});
  EXPECT_NEAR(grid.Query(Vec3::Zero()).value, -0.05, 0.002);
  SdfSample far = grid.Query(Vec3(0.1, 0, 0));
  EXPECT_NEAR(far.value, 0.05, 0.002);
  EXPECT_TRUE(far.outside_extent);
  EXPECT_NEAR(far.gradient.normalized().x(), 1.0, 0.01);
}

TEST(SdfGridTest, BoxMatchesAnalyticSdf) {
  const double h = 0.002;
  Vec3 half(0.05, 0.05, 0.05);
  SdfGrid grid = BuildSdfGrid(MakeBox(half), {h, 0.01});
  TestRng rng(17);
  Box3 extent = grid.Extent();
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    Vec3 p = testing::UniformInBox(rng, extent.min(), extent.max());
    worst = std::max(worst, std::abs(grid.Query(p).value - testing::BoxSdf(p, half)));
  }
  EXPECT_LE(worst, h);
}

TEST(SdfGridTest, CoversBoundsWithTwoCellPadding) {
  const double h = 0.003;
  Mesh mesh = MakeCylinder(0.02, 0.1, 24);
  SdfBuildReport report;
  SdfGrid grid = BuildSdfGrid(mesh, {h, 0.0}, &report);
  Box3 extent = grid.Extent(), bounds = mesh.Bounds();
  EXPECT_TRUE((bounds.min() - extent.min()).minCoeff() >= 2 * h - 1e-12);
  EXPECT_TRUE((extent.max() - bounds.max()).minCoeff() >= 2 * h - 1e-12);
  EXPECT_TRUE(report.watertight);
  EXPECT_EQ(report.sign_method, SignMethod::kRayCrossings);
  for (const Vec3& v : mesh.vertices()) EXPECT_LE(std::abs(grid.Query(v).value), h);
}

TEST(SdfGridTest, SignsAgreeWithRayParity) {
  std::vector<Eigen::Vector2d> profile = {{0, 0}, {0.04, 0}, {0.04, 0.1}, {0.035, 0.1},
                                          {0.035, 0.008}, {0, 0.008}};
  Mesh mug = MakeLathe(profile, 32);
  const double h = 0.002;
  SdfGrid grid = BuildSdfGrid(mug, {h, 0.01});
  TestRng rng(23);
  Box3 bounds = mug.Bounds();
  int checked = 0;
  while (checked < 200) {
    Vec3 p = testing::UniformInBox(rng, bounds.min() - Vec3::Constant(0.01),
                                   bounds.max() + Vec3::Constant(0.01));
    double v = grid.Query(p).value;
    if (std::abs(v) < 2 * h) continue;  // sign is not meaningful at the surface
    EXPECT_EQ(v < 0, testing::InsideByRayParity(mug, p)) << p.transpose();
    ++checked;
  }
}

TEST(SdfGridTest, GradientNormIsNearOne) {
  const double h = 0.002;
  SdfGrid grid = BuildSdfGrid(MakeIcosphere(0.05, 4), {h, 0.01});
  TestRng rng(5);
  int checked = 0;
  while (checked < 500) {
    Vec3 p = testing::UniformInBox(rng, Vec3::Constant(-0.06), Vec3::Constant(0.06));
    SdfSample s = grid.Query(p);
    if (std::abs(s.value) <= 2 * h) continue;
    // The field of a sphere is singular at its center.
    if (p.norm() < 2 * h) continue;
    EXPECT_NEAR(s.gradient.norm(), 1.0, 0.05) << p.transpose();
    ++checked;
  }
}

TEST(SdfGridTest, GradientIsDerivativeOfInterpolant) {
  SdfGrid grid = BuildSdfGrid(MakeBox(Vec3(0.03, 0.02, 0.04)), {0.002, 0.01});
  TestRng rng(29);
  const double eps = 1e-7;
  for (int i = 0; i < 200; ++i) {
    Vec3 p = testing::UniformInBox(rng, Vec3::Constant(-0.04), Vec3::Constant(0.04));
    SdfSample s = grid.Query(p);
    for (int a = 0; a < 3; ++a) {
      Vec3 d = Vec3::Zero();
      d[a] = eps;
      SdfSample plus = grid.Query(p + d), minus = grid.Query(p - d);
      if (plus.cell != s.cell || minus.cell != s.cell) continue;
      EXPECT_NEAR((plus.value - minus.value) / (2 * eps), s.gradient[a], 1e-5);
    }
  }
}

TEST(SdfGridTest, OpenMeshFallsBackToWindingNumber) {
  Mesh closed = MakeIcosphere(0.05, 3);
  std::vector<Face> faces(closed.faces().begin() + 1, closed.faces().end());
  Mesh open = Mesh::Build(closed.vertices(), faces);
  ASSERT_FALSE(open.IsWatertight());
  SdfBuildReport report;
  SdfGrid grid = BuildSdfGrid(open, {0.003, 0.01}, &report);
  EXPECT_FALSE(report.watertight);
  EXPECT_EQ(report.sign_method, SignMethod::kWindingNumber);
  EXPECT_LT(grid.Query(Vec3::Zero()).value, -0.04);
  EXPECT_GT(grid.Query(Vec3(0.0, 0.0, -0.058)).value, 0.0);
  EXPECT_NEAR(WindingNumber(closed, Vec3::Zero()), 1.0, 1e-9);
  EXPECT_NEAR(WindingNumber(closed, Vec3(0.2, 0, 0)), 0.0, 1e-9);
}

TEST(SdfGridTest, NodeCapIsEnforced) {
  SdfGridOptions options{0.001, 0.01, 1000};
  EXPECT_THROW(BuildSdfGrid(MakeIcosphere(0.05, 2), options), CapacityError);
}

TEST(SdfGridTest, SaveLoadRoundTripAndLayout) {
  TempDir dir;
  SdfGrid grid = BuildSdfGrid(MakeBox(Vec3(0.02, 0.01, 0.015)), {0.004, 0.008});
  grid.Save(dir / "box.sdfgrid");
  SdfGrid loaded = SdfGrid::Load(dir / "box.sdfgrid");
  EXPECT_EQ(loaded.origin(), grid.origin());
  EXPECT_EQ(loaded.spacing(), grid.spacing());
  EXPECT_EQ(loaded.dims(), grid.dims());
  EXPECT_EQ(loaded.values(), grid.values());

  // Header: 3 x f64 origin, f64 spacing, 3 x i32 dims, then f32 values.
  std::ifstream in(dir / "box.sdfgrid", std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  size_t n = grid.values().size();
  ASSERT_EQ(bytes.size(), 4 * 8 + 3 * 4 + 4 * n);
  double spacing;
  std::memcpy(&spacing, bytes.data() + 24, 8);
  EXPECT_EQ(spacing, grid.spacing());
  int32_t dims[3];
  std::memcpy(dims, bytes.data() + 32, 12);
  EXPECT_EQ(dims[0], grid.dims()[0]);
  EXPECT_EQ(dims[2], grid.dims()[2]);

  std::ofstream(dir / "short.sdfgrid", std::ios::binary).write(bytes.data(), 40);
  EXPECT_THROW(SdfGrid::Load(dir / "short.sdfgrid"), InputError);
}

TEST(SdfGridTest, RigidEquivarianceAfterRebuild) {
  const double h = 0.002;
  Mesh mesh = MakeCylinder(0.02, 0.08, 32);
  SdfGrid grid = BuildSdfGrid(mesh, {h, 0.01});
  TestRng rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    Rigid t = testing::RandomRigid(rng, 0.1);
    SdfGrid moved = BuildSdfGrid(mesh.Transformed(t), {h, 0.01});
    for (int i = 0; i < 100; ++i) {
      Vec3 p = testing::UniformInBox(rng, Vec3(-0.025, -0.025, -0.005), Vec3(0.025, 0.025, 0.085));
      EXPECT_NEAR(moved.Query(t.Apply(p)).value, grid.Query(p).value, 2 * h);
    }
  }
}

TEST(SdfGridTest, CacheReturnsIdenticalGrid) {
  TempDir dir;
  ::setenv("HANDGRASP_SDF_CACHE", dir.path().c_str(), 1);
  Mesh mesh = MakeIcosphere(0.03, 2);
  SdfGrid first = CachedSdfGrid(mesh, {0.004, 0.01});
  SdfGrid second = CachedSdfGrid(mesh, {0.004, 0.01});
  ::unsetenv("HANDGRASP_SDF_CACHE");
  EXPECT_EQ(first.values(), second.values());
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    files += e.path().extension() == ".sdfgrid";
  }
  EXPECT_EQ(files, 1);
}

}  // namespace
}  // namespace handgrasp
