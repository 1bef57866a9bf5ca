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

#include "handgrasp/hand.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "handgrasp/sampling.h"

#ifndef HANDGRASP_DATA_DIR
#define HANDGRASP_DATA_DIR ""
#endif

namespace handgrasp {
namespace {

constexpr double kDefaultSegmentSpacing = 0.0015;
constexpr int kDenseSamples = 4000;

class LineParser {
 public:
  LineParser(std::string line, int number) : in_(line), number_(number) {}

  [[noreturn]] void Fail(const std::string& message) const {
    throw InputError("handcfg line " + std::to_string(number_) + ": " + message);
  }

  std::string Word(const char* what) {
    std::string w;
    if (!(in_ >> w)) Fail(std::string("missing ") + what);
    return w;
  }

  double Number(const char* what) {
    std::string w = Word(what);
    char* end = nullptr;
    double v = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0' || !std::isfinite(v)) {
      Fail(std::string("bad number for ") + what + ": '" + w + "'");
    }
    return v;
  }

  int Integer(const char* what) {
    double v = Number(what);
    if (v != std::floor(v)) Fail(std::string(what) + " must be an integer");
    return static_cast<int>(v);
  }

  Vec3 Vector(const char* what) {
    double x = Number(what);
    double y = Number(what);
    double z = Number(what);
    return {x, y, z};
  }

  bool Next(std::string* key) { return static_cast<bool>(in_ >> *key); }

 private:
  std::istringstream in_;
  int number_;
};

struct SegmentDraft {
  HandSegment segment;
  int line = 0;
};

}  // namespace

SdfSample HandSegment::Query(const Vec3& local) const {
  if (primitive) {
    SdfSample s = primitive->Evaluate(shape_offset.ApplyInverse(local));
    s.gradient = shape_offset.Rotate(s.gradient);
    return s;
  }
  return grid->Query(local);
}

Mesh HandSegment::SurfaceMesh() const {
  if (primitive) return primitive->Tessellate(16).Transformed(shape_offset);
  return *mesh;
}

HandModel HandModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open hand config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Parse(buffer.str(), path.parent_path());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

HandModel HandModel::Parse(std::string_view text,
                           const std::filesystem::path& base_dir) {
  HandModel hand;
  std::map<std::string, int> segment_ids;
  std::map<std::string, int> joint_ids;
  std::string palm_name;
  std::string thumb_name;
  int thumb_line = 0;
  int check_points = 50;
  bool have_thumb = false;
  struct PendingSite {
    std::string segment;
    ContactSite site;
    int line;
  };
  std::vector<PendingSite> pending_sites;
  struct PendingJoint {
    std::string parent, child;
    int line;
  };
  std::vector<PendingJoint> pending_joints;

  std::istringstream lines{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(lines, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    LineParser line(raw, number);
    std::string keyword;
    if (!line.Next(&keyword)) continue;

    if (keyword == "hand") {
      hand.name_ = line.Word("hand name");
    } else if (keyword == "palm") {
      palm_name = line.Word("palm segment");
    } else if (keyword == "palm_offset") {
      hand.palm_offset_ = line.Number("palm_offset");
    } else if (keyword == "check_points") {
      check_points = line.Integer("check point count");
      if (check_points < 1) line.Fail("check_points must be >= 1");
    } else if (keyword == "segment") {
      HandSegment seg;
      seg.name = line.Word("segment name");
      if (segment_ids.count(seg.name)) line.Fail("duplicate segment " + seg.name);
      std::string kind = line.Word("segment shape");
      double spacing = kDefaultSegmentSpacing;
      std::filesystem::path mesh_path;
      if (kind == "sphere") {
        seg.primitive = PrimitiveShape::Sphere(line.Number("radius"));
      } else if (kind == "capsule") {
        double r = line.Number("radius");
        seg.primitive = PrimitiveShape::Capsule(r, line.Number("half length"));
      } else if (kind == "box") {
        seg.primitive = PrimitiveShape::Box(line.Vector("half extents"));
      } else if (kind == "mesh") {
        mesh_path = line.Word("mesh path");
        if (mesh_path.is_relative()) mesh_path = base_dir / mesh_path;
      } else {
        line.Fail("unknown segment shape '" + kind + "'");
      }
      std::string key;
      Vec3 offset = Vec3::Zero(), rpy = Vec3::Zero();
      while (line.Next(&key)) {
        if (key == "offset") {
          offset = line.Vector("offset");
        } else if (key == "rpy") {
          rpy = line.Vector("rpy");
        } else if (key == "spacing") {
          spacing = line.Number("spacing");
          if (!(spacing > 0.0)) line.Fail("spacing must be > 0");
        } else {
          line.Fail("unexpected token '" + key + "'");
        }
      }
      seg.shape_offset = {FromRpy(rpy.x(), rpy.y(), rpy.z()), offset};
      if (!seg.primitive) {
        Mesh mesh = LoadMesh(mesh_path).Transformed(seg.shape_offset);
        seg.shape_offset = Rigid::Identity();
        SdfGridOptions options;
        options.spacing = spacing;
        options.padding = 4.0 * spacing;
        seg.grid = std::make_shared<SdfGrid>(CachedSdfGrid(mesh, options));
        seg.mesh = std::make_shared<Mesh>(std::move(mesh));
      }
      segment_ids[seg.name] = static_cast<int>(hand.segments_.size());
      hand.segments_.push_back(std::move(seg));
    } else if (keyword == "joint") {
      Joint joint;
      joint.name = line.Word("joint name");
      if (joint_ids.count(joint.name)) line.Fail("duplicate joint " + joint.name);
      PendingJoint pending{line.Word("parent segment"), line.Word("child segment"),
                           number};
      std::string key;
      Vec3 rpy = Vec3::Zero();
      while (line.Next(&key)) {
        if (key == "origin") {
          joint.origin.translation = line.Vector("origin");
        } else if (key == "rpy") {
          rpy = line.Vector("rpy");
        } else {
          line.Fail("unexpected token '" + key + "'");
        }
      }
      joint.origin.rotation = FromRpy(rpy.x(), rpy.y(), rpy.z());
      joint_ids[joint.name] = static_cast<int>(hand.joints_.size());
      hand.joints_.push_back(std::move(joint));
      pending_joints.push_back(std::move(pending));
    } else if (keyword == "axis") {
      std::string joint_name = line.Word("joint name");
      auto it = joint_ids.find(joint_name);
      if (it == joint_ids.end()) line.Fail("axis for unknown joint " + joint_name);
      JointAxis axis;
      Vec3 a = line.Vector("axis");
      if (a.norm() < 1e-12) line.Fail("zero joint axis");
      axis.axis = a.normalized();
      axis.lower = line.Number("lower limit");
      axis.upper = line.Number("upper limit");
      if (!(axis.lower < axis.upper)) line.Fail("joint limits need lower < upper");
      axis.dof = line.Integer("dof index");
      axis.open = std::clamp(0.0, axis.lower, axis.upper);
      std::string key;
      while (line.Next(&key)) {
        if (key == "open") {
          axis.open = line.Number("open value");
          if (axis.open < axis.lower || axis.open > axis.upper) {
            line.Fail("open value outside limits");
          }
        } else if (key == "close") {
          axis.close_direction = line.Integer("close direction");
          if (std::abs(axis.close_direction) > 1) line.Fail("close must be -1, 0 or 1");
        } else {
          line.Fail("unexpected token '" + key + "'");
        }
      }
      auto& axes = hand.joints_[it->second].axes;
      if (axes.size() >= 2) line.Fail("joint " + joint_name + " has more than 2 axes");
      axes.push_back(axis);
    } else if (keyword == "thumb") {
      thumb_name = line.Word("thumb segment");
      hand.thumb_point_ = line.Vector("thumb point");
      have_thumb = true;
      thumb_line = number;
    } else if (keyword == "site") {
      PendingSite site;
      site.segment = line.Word("site segment");
      site.site.point = line.Vector("site point");
      Vec3 n = line.Vector("site normal");
      if (n.norm() < 1e-12) line.Fail("zero site normal");
      site.site.normal = n.normalized();
      site.line = number;
      pending_sites.push_back(std::move(site));
    } else {
      line.Fail("unknown keyword '" + keyword + "'");
    }
  }

  auto segment_id = [&](const std::string& name, int line_number) {
    auto it = segment_ids.find(name);
    if (it == segment_ids.end()) {
      LineParser(std::string(), line_number).Fail("unknown segment " + name);
    }
    return it->second;
  };

  if (hand.segments_.empty()) throw InputError("hand config declares no segments");
  if (palm_name.empty()) throw InputError("hand config has no palm");
  hand.palm_ = segment_id(palm_name, 0);
  if (!have_thumb) throw InputError("hand config has no thumb point");
  hand.thumb_segment_ = segment_id(thumb_name, thumb_line);
  for (const PendingSite& ps : pending_sites) {
    ContactSite site = ps.site;
    site.segment = segment_id(ps.segment, ps.line);
    hand.sites_.push_back(site);
  }
  for (size_t j = 0; j < hand.joints_.size(); ++j) {
    Joint& joint = hand.joints_[j];
    joint.parent = segment_id(pending_joints[j].parent, pending_joints[j].line);
    joint.child = segment_id(pending_joints[j].child, pending_joints[j].line);
    if (joint.child == hand.palm_) {
      throw InputError("joint " + joint.name + " makes the palm a child");
    }
    HandSegment& child = hand.segments_[joint.child];
    if (child.parent_joint >= 0) {
      throw InputError("segment " + child.name + " has two parent joints");
    }
    child.parent_joint = static_cast<int>(j);
  }

  hand.Finalize(check_points);
  return hand;
}

void HandModel::Finalize(int check_points) {
  const int n = num_segments();

  // Topological order from the palm; unreachable segments mean a cycle or a
  // disconnected part.
  std::vector<std::vector<int>> child_joints(n);
  for (size_t j = 0; j < joints_.size(); ++j) {
    child_joints[joints_[j].parent].push_back(static_cast<int>(j));
  }
  std::vector<int> order;
  std::vector<int> queue = {palm_};
  std::vector<bool> seen(n, false);
  seen[palm_] = true;
  for (size_t q = 0; q < queue.size(); ++q) {
    for (int j : child_joints[queue[q]]) {
      int c = joints_[j].child;
      if (seen[c]) throw InputError("joint graph has a cycle at " + segments_[c].name);
      seen[c] = true;
      order.push_back(j);
      queue.push_back(c);
    }
  }
  for (int s = 0; s < n; ++s) {
    if (!seen[s]) {
      throw InputError("segment " + segments_[s].name +
                       " is not connected to the palm (cycle or missing joint)");
    }
  }
  std::vector<Joint> sorted;
  for (int j : order) sorted.push_back(joints_[j]);
  joints_ = std::move(sorted);
  for (size_t j = 0; j < joints_.size(); ++j) {
    segments_[joints_[j].child].parent_joint = static_cast<int>(j);
  }

  // DOF indices must cover 0..D-1 exactly once.
  int max_dof = -1;
  for (const Joint& joint : joints_) {
    for (const JointAxis& a : joint.axes) max_dof = std::max(max_dof, a.dof);
  }
  num_dofs_ = max_dof + 1;
  dof_location_.assign(num_dofs_, {-1, -1});
  for (size_t j = 0; j < joints_.size(); ++j) {
    for (size_t a = 0; a < joints_[j].axes.size(); ++a) {
      int dof = joints_[j].axes[a].dof;
      if (dof < 0) throw InputError("negative DOF index on joint " + joints_[j].name);
      if (dof_location_[dof].first >= 0) {
        throw InputError("duplicate DOF index " + std::to_string(dof));
      }
      dof_location_[dof] = {static_cast<int>(j), static_cast<int>(a)};
    }
  }
  for (int d = 0; d < num_dofs_; ++d) {
    if (dof_location_[d].first < 0) {
      throw InputError("DOF index " + std::to_string(d) + " is unused");
    }
  }

  chain_dofs_.assign(n, {});
  dof_subtree_.assign(num_dofs_, {});
  for (const Joint& joint : joints_) {
    std::vector<int> chain = chain_dofs_[joint.parent];
    for (const JointAxis& a : joint.axes) chain.push_back(a.dof);
    chain_dofs_[joint.child] = std::move(chain);
  }
  for (int s = 0; s < n; ++s) {
    for (int dof : chain_dofs_[s]) dof_subtree_[dof].push_back(s);
  }

  fingers_.clear();
  for (size_t root = 0; root < joints_.size(); ++root) {
    if (joints_[root].parent != palm_) continue;
    Finger finger;
    std::vector<bool> in_finger(n, false);
    in_finger[joints_[root].child] = true;
    // Joints are topologically sorted, so one forward pass collects the
    // subtree in root-to-tip order.
    for (size_t j = root; j < joints_.size(); ++j) {
      const Joint& joint = joints_[j];
      if (j != root && !in_finger[joint.parent]) continue;
      in_finger[joint.child] = true;
      finger.segments.push_back(joint.child);
      for (const JointAxis& a : joint.axes) {
        if (a.close_direction != 0) finger.closing_dofs.push_back(a.dof);
      }
    }
    fingers_.push_back(std::move(finger));
  }

  // Surface check points and closing proxies.
  for (int s = 0; s < n; ++s) {
    HandSegment& seg = segments_[s];
    std::vector<SurfacePoint> dense;
    if (seg.primitive) {
      dense = seg.primitive->SampleSurface(kDenseSamples, 1000 + s);
      for (SurfacePoint& p : dense) p.position = seg.shape_offset.Apply(p.position);
    } else {
      dense = SampleSurface(*seg.mesh, kDenseSamples, 1000 + s);
    }
    std::vector<Vec3> positions;
    positions.reserve(dense.size());
    for (const SurfacePoint& p : dense) positions.push_back(p.position);
    seg.check_points.clear();
    for (int i : FarthestPointOrder(positions, check_points)) {
      seg.check_points.push_back(positions[i]);
    }

    seg.proxies.clear();
    if (seg.primitive && seg.primitive->kind() == PrimitiveKind::kSphere) {
      seg.proxies.push_back({seg.shape_offset.translation, seg.primitive->radius()});
    } else if (seg.primitive && seg.primitive->kind() == PrimitiveKind::kCapsule) {
      double r = seg.primitive->radius();
      double hl = seg.primitive->half_length();
      int count = static_cast<int>(std::ceil(2.0 * hl / (0.5 * r))) + 1;
      for (int i = 0; i < count; ++i) {
        double z = -hl + 2.0 * hl * i / (count - 1);
        seg.proxies.push_back({seg.shape_offset.Apply(Vec3(0, 0, z)), r});
      }
    } else {
      for (const Vec3& p : seg.check_points) seg.proxies.push_back({p, 0.0});
    }
  }

  // Points declared on segment surfaces must actually lie there.
  auto tolerance = [&](int s) {
    const HandSegment& seg = segments_[s];
    return 2.0 * (seg.grid ? seg.grid->spacing() : kDefaultSegmentSpacing);
  };
  if (std::abs(segments_[thumb_segment_].Query(thumb_point_).value) >
      tolerance(thumb_segment_)) {
    throw InputError("thumb point is not within 2h of segment " +
                     segments_[thumb_segment_].name);
  }
  for (const ContactSite& site : sites_) {
    if (std::abs(segments_[site.segment].Query(site.point).value) >
        tolerance(site.segment)) {
      throw InputError("contact site is not within 2h of segment " +
                       segments_[site.segment].name);
    }
  }
  for (int s = 0; s < n; ++s) {
    for (const Vec3& p : segments_[s].check_points) {
      if (std::abs(segments_[s].Query(p).value) > tolerance(s)) {
        throw InputError("check point off the surface of segment " +
                         segments_[s].name);
      }
    }
  }
}

const JointAxis& HandModel::dof_axis(int dof) const {
  auto [j, a] = dof_location_.at(dof);
  return joints_[j].axes[a];
}

bool HandModel::Adjacent(int a, int b) const {
  auto linked = [&](int child, int parent) {
    int j = segments_[child].parent_joint;
    return j >= 0 && joints_[j].parent == parent;
  };
  return linked(a, b) || linked(b, a);
}

Eigen::VectorXd HandModel::LowerLimits() const {
  Eigen::VectorXd v(num_dofs_);
  for (int d = 0; d < num_dofs_; ++d) v[d] = dof_axis(d).lower;
  return v;
}

Eigen::VectorXd HandModel::UpperLimits() const {
  Eigen::VectorXd v(num_dofs_);
  for (int d = 0; d < num_dofs_; ++d) v[d] = dof_axis(d).upper;
  return v;
}

Eigen::VectorXd HandModel::OpenJoints() const {
  Eigen::VectorXd v(num_dofs_);
  for (int d = 0; d < num_dofs_; ++d) v[d] = dof_axis(d).open;
  return v;
}

Eigen::VectorXd HandModel::ClampJoints(const Eigen::VectorXd& joints) const {
  return joints.cwiseMax(LowerLimits()).cwiseMin(UpperLimits());
}

HandPose HandModel::OpenPose(const Rigid& transform) const {
  return {transform, OpenJoints()};
}

void HandModel::ValidatePose(const HandPose& pose) const {
  if (pose.joints.size() != num_dofs_) {
    throw InputError("pose has " + std::to_string(pose.joints.size()) +
                     " joint values, hand has " + std::to_string(num_dofs_));
  }
  if (std::abs(pose.transform.rotation.norm() - 1.0) > 1e-8) {
    throw InputError("pose quaternion is not unit length");
  }
  if (!pose.transform.translation.allFinite() || !pose.joints.allFinite()) {
    throw InputError("pose has non-finite values");
  }
  for (int d = 0; d < num_dofs_; ++d) {
    const JointAxis& a = dof_axis(d);
    if (pose.joints[d] < a.lower || pose.joints[d] > a.upper) {
      throw InputError("joint value for DOF " + std::to_string(d) + " is outside limits");
    }
  }
}

Kinematics ForwardKinematics(const HandModel& hand, const HandPose& pose) {
  Kinematics kin;
  kin.segments.resize(hand.num_segments());
  kin.dof_axis.resize(hand.num_dofs());
  kin.dof_pivot.resize(hand.num_dofs());
  kin.segments[hand.palm()] = pose.transform;
  for (const Joint& joint : hand.joints()) {
    Rigid frame = kin.segments[joint.parent] * joint.origin;
    for (const JointAxis& a : joint.axes) {
      kin.dof_axis[a.dof] = frame.Rotate(a.axis);
      kin.dof_pivot[a.dof] = frame.translation;
      frame.rotation = frame.rotation * Quat(Eigen::AngleAxisd(pose.joints[a.dof], a.axis));
    }
    kin.segments[joint.child] = frame;
  }
  return kin;
}

SdfSample SegmentSdf(const HandModel& hand, const Kinematics& kin, int k,
                     const Vec3& p) {
  const Rigid& frame = kin.segments[k];
  SdfSample s = hand.segments()[k].Query(frame.ApplyInverse(p));
  s.gradient = frame.Rotate(s.gradient);
  return s;
}

SdfSample SegmentSdf(const HandModel& hand, const HandPose& pose, int k,
                     const Vec3& p) {
  return SegmentSdf(hand, ForwardKinematics(hand, pose), k, p);
}

ClosestSegment FindClosestSegment(const HandModel& hand, const Kinematics& kin,
                                  const Vec3& p) {
  ClosestSegment best;
  for (int k = 0; k < hand.num_segments(); ++k) {
    SdfSample s = SegmentSdf(hand, kin, k, p);
    if (best.segment < 0 || s.value < best.sample.value) {
      best.segment = k;
      best.sample = s;
    }
  }
  return best;
}

ClosestSegment FindClosestSegment(const HandModel& hand, const HandPose& pose,
                                  const Vec3& p) {
  return FindClosestSegment(hand, ForwardKinematics(hand, pose), p);
}

Vec3 ThumbPointWorld(const HandModel& hand, const Kinematics& kin) {
  return kin.segments[hand.thumb_segment()].Apply(hand.thumb_point());
}

Vec3 ThumbPointWorld(const HandModel& hand, const HandPose& pose) {
  return ThumbPointWorld(hand, ForwardKinematics(hand, pose));
}

Eigen::Matrix<double, 3, Eigen::Dynamic> PointJacobian(const HandModel& hand,
                                                       const Kinematics& kin,
                                                       int segment,
                                                       const Vec3& x) {
  Eigen::Matrix<double, 3, Eigen::Dynamic> j =
      Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, 6 + hand.num_dofs());
  j.leftCols<3>().setIdentity();
  Vec3 r = x - kin.segments[hand.palm()].translation;
  // d/dw of exp(w) (x - t) = -[x - t]_x.
  j.col(3) = Vec3::UnitX().cross(r);
  j.col(4) = Vec3::UnitY().cross(r);
  j.col(5) = Vec3::UnitZ().cross(r);
  for (int dof : hand.chain_dofs(segment)) {
    j.col(6 + dof) = kin.dof_axis[dof].cross(x - kin.dof_pivot[dof]);
  }
  return j;
}

std::vector<NamedMesh> PosedHandMeshes(const HandModel& hand,
                                       const HandPose& pose) {
  Kinematics kin = ForwardKinematics(hand, pose);
  std::vector<NamedMesh> out;
  for (int k = 0; k < hand.num_segments(); ++k) {
    const HandSegment& seg = hand.segments()[k];
    out.push_back({seg.name, seg.SurfaceMesh().Transformed(kin.segments[k])});
  }
  return out;
}

std::filesystem::path ShippedHandPath(const std::string& name) {
  std::filesystem::path direct(name);
  if (std::filesystem::exists(direct)) return direct;
  std::string file = name;
  if (direct.extension() != ".handcfg") file += ".handcfg";
  std::vector<std::filesystem::path> roots;
  if (const char* env = std::getenv("HANDGRASP_DATA_DIR")) roots.emplace_back(env);
  roots.emplace_back(HANDGRASP_DATA_DIR);
  for (const auto& root : roots) {
    if (root.empty()) continue;
    std::filesystem::path p = root / "hands" / file;
    if (std::filesystem::exists(p)) return p;
  }
  throw InputError("hand config '" + name + "' not found");
}

}  // namespace handgrasp
