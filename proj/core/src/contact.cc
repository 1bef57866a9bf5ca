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

#include "handgrasp/contact.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace handgrasp {
namespace {

constexpr int kFormatVersion = 1;
constexpr size_t kRecordSize = 25;

std::string SingleLine(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

}  // namespace

ContactMap::ContactMap(std::vector<ContactPoint> points, double tau_t,
                       std::string source)
    : points_(std::move(points)), tau_t_(tau_t), source_(SingleLine(std::move(source))) {
  if (points_.empty()) throw InputError("contact map needs at least one point");
  for (ContactPoint& p : points_) {
    if (p.label != kAttractive && p.label != kRepulsive) {
      throw InputError("contact labels must be +1 or -1");
    }
    if (!p.position.allFinite() || !p.normal.allFinite()) {
      throw InputError("contact point has non-finite coordinates");
    }
  }
}

int ContactMap::NumAttractive() const {
  return static_cast<int>(std::count_if(points_.begin(), points_.end(), [](const auto& p) {
    return p.label == kAttractive;
  }));
}

ContactMap ContactMap::Transformed(const Rigid& transform) const {
  std::vector<ContactPoint> out = points_;
  for (ContactPoint& p : out) {
    p.position = transform.Apply(p.position);
    p.normal = transform.Rotate(p.normal);
  }
  return ContactMap(std::move(out), tau_t_, source_);
}

void ContactMap::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  char tau[64];
  std::snprintf(tau, sizeof(tau), "%.17g", tau_t_);
  out << "contactmap " << kFormatVersion << "\n"
      << "N " << points_.size() << "\n"
      << "tau_t " << tau << "\n"
      << "source " << source_ << "\n"
      << "end\n";
  char record[kRecordSize];
  for (const ContactPoint& p : points_) {
    float values[6] = {static_cast<float>(p.position.x()), static_cast<float>(p.position.y()),
                       static_cast<float>(p.position.z()), static_cast<float>(p.normal.x()),
                       static_cast<float>(p.normal.y()),   static_cast<float>(p.normal.z())};
    std::memcpy(record, values, sizeof(values));
    record[24] = static_cast<char>(static_cast<int8_t>(p.label));
    out.write(record, kRecordSize);
  }
  if (!out) throw InputError("write failed for " + path.string());
}

ContactMap ContactMap::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  auto fail = [&](const std::string& what) -> InputError {
    return InputError(path.string() + ": " + what);
  };
  std::string line;
  if (!std::getline(in, line)) throw fail("empty contact map file");
  {
    std::istringstream head(line);
    std::string magic;
    int version = 0;
    if (!(head >> magic >> version) || magic != "contactmap") {
      throw fail("not a contact map");
    }
    if (version != kFormatVersion) {
      throw fail("unsupported contact map version " + std::to_string(version));
    }
  }
  long long n = -1;
  double tau_t = kNoThreshold;
  std::string source;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "end") {
      ended = true;
      break;
    }
    auto space = line.find(' ');
    std::string key = line.substr(0, space);
    std::string value = space == std::string::npos ? "" : line.substr(space + 1);
    if (key == "N") {
      char* end = nullptr;
      n = std::strtoll(value.c_str(), &end, 10);
      if (end == value.c_str() || *end != '\0') throw fail("bad point count");
    } else if (key == "tau_t") {
      char* end = nullptr;
      tau_t = std::strtod(value.c_str(), &end);
      if (end == value.c_str()) throw fail("bad tau_t");
    } else if (key == "source") {
      source = value;
    } else {
      throw fail("unknown header field '" + key + "'");
    }
  }
  if (!ended) throw fail("truncated header");
  if (n < 1 || n > (1LL << 28)) throw fail("bad point count");
  std::vector<ContactPoint> points(static_cast<size_t>(n));
  char record[kRecordSize];
  for (ContactPoint& p : points) {
    if (!in.read(record, kRecordSize)) throw fail("truncated point records");
    float values[6];
    std::memcpy(values, record, sizeof(values));
    p.position = Vec3(values[0], values[1], values[2]);
    p.normal = Vec3(values[3], values[4], values[5]);
    p.label = static_cast<int8_t>(record[24]);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw fail("trailing bytes after records");
  try {
    return ContactMap(std::move(points), tau_t, source);
  } catch (const InputError& e) {
    throw fail(e.what());
  }
}

ScalarContactField::ScalarContactField(Mesh mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != mesh_.num_vertices()) {
    throw InputError("contact field has " + std::to_string(values_.size()) +
                     " values for " + std::to_string(mesh_.num_vertices()) + " vertices");
  }
  for (double& v : values_) {
    if (!std::isfinite(v)) throw InputError("contact field has non-finite values");
    v = std::clamp(v, 0.0, 1.0);
  }
}

double ScalarContactField::Interpolate(int face, const Vec3& p) const {
  const Face& f = mesh_.faces()[face];
  Vec3 w = Barycentric(p, mesh_.vertices()[f[0]], mesh_.vertices()[f[1]],
                       mesh_.vertices()[f[2]]);
  w = w.cwiseMax(0.0);
  w /= w.sum();
  const double a = values_[f[0]], b = values_[f[1]], c = values_[f[2]];
  // Clamping to the corner range keeps a constant face exact.
  return std::clamp(w[0] * a + w[1] * b + w[2] * c, std::min({a, b, c}),
                    std::max({a, b, c}));
}

ContactMap BuildContactMap(const ScalarContactField& field,
                           const std::vector<SurfacePoint>& samples,
                           double tau_t, std::string source) {
  if (!(tau_t > 0.0 && tau_t < 1.0)) throw InputError("tau_t must lie in (0, 1)");
  std::vector<ContactPoint> points;
  points.reserve(samples.size());
  for (const SurfacePoint& s : samples) {
    if (s.face < 0 || s.face >= field.mesh().num_faces()) {
      throw InputError("sample face id does not belong to the field's mesh");
    }
    double t = field.Interpolate(s.face, s.position);
    points.push_back({s.position, s.normal, t >= tau_t ? kAttractive : kRepulsive});
  }
  return ContactMap(std::move(points), tau_t, std::move(source));
}

ContactRegion ContactRegion::Slab(const Vec3& normal, double lo, double hi, int label) {
  if (normal.norm() < 1e-12) throw InputError("slab normal must be non-zero");
  if (!(lo <= hi)) throw InputError("slab needs lo <= hi");
  ContactRegion r;
  r.shape = Shape::kSlab;
  r.a = normal.normalized();
  r.lo = lo;
  r.hi = hi;
  r.label = label;
  return r;
}

ContactRegion ContactRegion::Ball(const Vec3& center, double radius, int label) {
  if (!(radius > 0.0)) throw InputError("ball radius must be > 0");
  ContactRegion r;
  r.shape = Shape::kBall;
  r.a = center;
  r.hi = radius;
  r.label = label;
  return r;
}

ContactRegion ContactRegion::Box(const Vec3& min, const Vec3& max, int label) {
  if (!(min.array() <= max.array()).all()) throw InputError("box needs min <= max");
  ContactRegion r;
  r.shape = Shape::kBox;
  r.a = min;
  r.b = max;
  r.label = label;
  return r;
}

ContactRegion ContactRegion::Cylinder(const Vec3& center, const Vec3& axis,
                                      double r_min, double r_max, double h_min,
                                      double h_max, int label) {
  if (axis.norm() < 1e-12) throw InputError("cylinder axis must be non-zero");
  if (!(0.0 <= r_min && r_min <= r_max) || !(h_min <= h_max)) {
    throw InputError("cylinder needs 0 <= rmin <= rmax and hmin <= hmax");
  }
  ContactRegion r;
  r.shape = Shape::kCylinder;
  r.a = center;
  r.b = axis.normalized();
  r.lo = r_min;
  r.hi = r_max;
  r.h0 = h_min;
  r.h1 = h_max;
  r.label = label;
  return r;
}

bool ContactRegion::Contains(const Vec3& p) const {
  switch (shape) {
    case Shape::kSlab: {
      double s = a.dot(p);
      return s >= lo && s <= hi;
    }
    case Shape::kBall:
      return (p - a).norm() <= hi;
    case Shape::kBox:
      return (p.array() >= a.array()).all() && (p.array() <= b.array()).all();
    case Shape::kCylinder: {
      Vec3 v = p - a;
      double h = v.dot(b);
      double radial = (v - h * b).norm();
      return h >= h0 && h <= h1 && radial >= lo && radial <= hi;
    }
  }
  return false;
}

ContactMap ManualContactMap(const std::vector<SurfacePoint>& samples,
                            const std::vector<ContactRegion>& regions,
                            std::vector<std::string>* warnings) {
  if (regions.empty() && warnings != nullptr) {
    warnings->push_back("no contact regions given; every point is repulsive");
  }
  std::vector<ContactPoint> points;
  points.reserve(samples.size());
  for (const SurfacePoint& s : samples) {
    int label = kRepulsive;
    for (const ContactRegion& r : regions) {
      if (r.Contains(s.position)) label = r.label;
    }
    points.push_back({s.position, s.normal, label});
  }
  ContactMap map(std::move(points), kNoThreshold, "regions");
  if (warnings != nullptr && !regions.empty() && map.NumAttractive() == 0) {
    warnings->push_back("contact map has no attractive points");
  }
  return map;
}

std::vector<ContactRegion> ParseRegions(std::string_view text) {
  std::vector<ContactRegion> regions;
  std::istringstream lines{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(lines, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream in(raw);
    std::string label_word, shape;
    if (!(in >> label_word)) continue;
    auto fail = [&](const std::string& what) {
      return InputError("region line " + std::to_string(number) + ": " + what);
    };
    int label;
    if (label_word == "attract") {
      label = kAttractive;
    } else if (label_word == "repel") {
      label = kRepulsive;
    } else {
      throw fail("label must be 'attract' or 'repel'");
    }
    if (!(in >> shape)) throw fail("missing shape");
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    if (!in.eof()) throw fail("bad number");
    if (shape == "slab" && v.size() == 5) {
      regions.push_back(ContactRegion::Slab(Vec3(v[0], v[1], v[2]), v[3], v[4], label));
    } else if (shape == "ball" && v.size() == 4) {
      regions.push_back(ContactRegion::Ball(Vec3(v[0], v[1], v[2]), v[3], label));
    } else if (shape == "box" && v.size() == 6) {
      regions.push_back(ContactRegion::Box(Vec3(v[0], v[1], v[2]),
                                           Vec3(v[3], v[4], v[5]), label));
    } else if (shape == "cylinder" && v.size() == 10) {
      regions.push_back(ContactRegion::Cylinder(Vec3(v[0], v[1], v[2]),
                                                Vec3(v[3], v[4], v[5]), v[6], v[7],
                                                v[8], v[9], label));
    } else {
      throw fail("bad shape or parameter count for '" + shape + "'");
    }
  }
  return regions;
}

std::vector<ContactRegion> LoadRegions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseRegions(buffer.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace handgrasp
