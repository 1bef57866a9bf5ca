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

#include "handgrasp/objective.h"

#include <algorithm>
#include <cmath>

namespace handgrasp {
namespace {

int64_t Piece(int64_t a, int64_t b) { return a * 1000003 + b; }

}  // namespace

void ObjectiveConfig::Validate() const {
  if (lambda_a < 0 || lambda_r < 0 || lambda_t < 0 || lambda_i < 0) {
    throw InputError("objective weights must be >= 0");
  }
  if (!(tau_n > 0.0 && tau_n < 1.0)) throw InputError("tau_n must lie in (0, 1)");
  if (!(delta_r > 0.0)) throw InputError("delta_r must be > 0");
  if (n_int < 1) throw InputError("n_int must be >= 1");
}

bool RepulsiveGateOpen(const Vec3& sdf_gradient, const Vec3& normal, double tau_n) {
  double norm = sdf_gradient.norm();
  if (norm == 0.0) return false;
  return std::abs(sdf_gradient.dot(normal)) / norm > tau_n;
}

double RepulsiveResidual(double sdf, const Vec3& sdf_gradient, const Vec3& normal,
                         const ObjectiveConfig& config) {
  if (!RepulsiveGateOpen(sdf_gradient, normal, config.tau_n)) return 0.0;
  return std::sqrt(config.lambda_r) * std::max(0.0, config.delta_r - sdf);
}

GraspObjective::GraspObjective(const HandModel& hand, const ObjectModel& object,
                               const ContactMap& map, const ObjectiveConfig& config)
    : hand_(hand), object_(object), map_(map), config_(config) {
  config_.Validate();
  int max_checks = 0;
  for (const HandSegment& s : hand_.segments()) {
    max_checks = std::max(max_checks, static_cast<int>(s.check_points.size()));
  }
  checks_per_segment_ = std::min(config_.n_int, max_checks);
  for (int j = 0; j < hand_.num_segments(); ++j) {
    int count = std::min(checks_per_segment_,
                         static_cast<int>(hand_.segments()[j].check_points.size()));
    for (int c = 0; c < count; ++c) {
      for (int k = 0; k < hand_.num_segments(); ++k) {
        if (k != j && !hand_.Adjacent(j, k)) self_pairs_.push_back({j, c, k});
      }
    }
  }
  self_begin_ = map_.size() + 1 + hand_.num_segments() * checks_per_segment_;
  num_residuals_ = self_begin_ + static_cast<int>(self_pairs_.size());
}

void GraspObjective::Evaluate(const HandPose& pose, Eigen::VectorXd* residuals,
                              Eigen::MatrixXd* jacobian, ResidualReport* report,
                              std::vector<int64_t>* pieces) const {
  const Kinematics kin = ForwardKinematics(hand_, pose);
  const int n = map_.size();
  const int cols = TangentDim();
  if (residuals) residuals->setZero(num_residuals_);
  if (jacobian) jacobian->setZero(num_residuals_, cols);
  if (pieces) pieces->assign(num_residuals_, 0);
  ResidualReport rep;
  rep.point_flags.assign(n, 0);

  const double wa = std::sqrt(config_.lambda_a);
  const double wr = std::sqrt(config_.lambda_r);
  const double wt = std::sqrt(config_.lambda_t);
  const double wi = std::sqrt(config_.lambda_i);

  auto set_row = [&](int row, double r, double scale, const Vec3& g, int segment,
                     const Vec3& x) {
    if (residuals) (*residuals)[row] = r;
    if (jacobian && scale != 0.0) {
      jacobian->row(row) = scale * g.transpose() * PointJacobian(hand_, kin, segment, x);
    }
  };

  // Contact points. For a fixed object point p, d SDF_k(p) = -g . v_k(p),
  // with v_k the velocity of segment k's material point at p.
  for (int i = 0; i < n; ++i) {
    const ContactPoint& cp = map_.points()[i];
    ClosestSegment closest = FindClosestSegment(hand_, kin, cp.position);
    const SdfSample& s = closest.sample;
    int64_t piece = Piece(closest.segment, s.cell);
    if (cp.label == kAttractive) {
      double r = wa * s.value;
      rep.grasp_attractive += r * r;
      set_row(i, r, -wa, s.gradient, closest.segment, cp.position);
    } else {
      bool gate = RepulsiveGateOpen(s.gradient, cp.normal, config_.tau_n);
      bool hinge = gate && s.value < config_.delta_r;
      if (gate) rep.point_flags[i] |= kGateOpen;
      if (hinge) rep.point_flags[i] |= kHingeActive;
      piece = Piece(piece, gate + 2 * hinge);
      if (hinge) {
        double r = wr * (config_.delta_r - s.value);
        rep.grasp_repulsive += r * r;
        set_row(i, r, wr, s.gradient, closest.segment, cp.position);
      }
    }
    if (pieces) (*pieces)[i] = piece;
  }

  // Thumb.
  {
    Vec3 x = ThumbPointWorld(hand_, kin);
    SdfSample s = object_.Query(x);
    double r = wt * s.value;
    rep.thumb = r * r;
    set_row(thumb_row(), r, wt, s.gradient, hand_.thumb_segment(), x);
    if (pieces) (*pieces)[thumb_row()] = s.cell;
  }

  // Hand-object penetration at segment check points.
  int row = object_rows_begin();
  for (int j = 0; j < hand_.num_segments(); ++j) {
    const HandSegment& seg = hand_.segments()[j];
    int count = std::min(checks_per_segment_, static_cast<int>(seg.check_points.size()));
    for (int c = 0; c < checks_per_segment_; ++c, ++row) {
      if (c >= count) continue;
      Vec3 x = kin.segments[j].Apply(seg.check_points[c]);
      SdfSample s = object_.Query(x);
      bool active = s.value < 0.0;
      if (pieces) (*pieces)[row] = Piece(s.cell, active);
      if (!active) continue;
      double r = -wi * s.value;
      rep.intersection_object += r * r;
      set_row(row, r, -wi, s.gradient, j, x);
    }
  }

  // Self-intersection: check point on j against segment k.
  for (const SelfPair& pair : self_pairs_) {
    Vec3 x = kin.segments[pair.segment].Apply(
        hand_.segments()[pair.segment].check_points[pair.point]);
    SdfSample s = SegmentSdf(hand_, kin, pair.other, x);
    bool active = s.value < 0.0;
    if (pieces) (*pieces)[row] = Piece(s.cell, active);
    if (active) {
      double r = -wi * s.value;
      rep.intersection_self += r * r;
      if (residuals) (*residuals)[row] = r;
      if (jacobian) {
        jacobian->row(row) =
            -wi * s.gradient.transpose() *
            (PointJacobian(hand_, kin, pair.segment, x) -
             PointJacobian(hand_, kin, pair.other, x));
      }
    }
    ++row;
  }

  rep.total = rep.grasp_attractive + rep.grasp_repulsive + rep.thumb +
              rep.intersection_object + rep.intersection_self;
  if (report) *report = std::move(rep);
}

ResidualReport GraspObjective::Report(const HandPose& pose) const {
  ResidualReport report;
  Evaluate(pose, nullptr, nullptr, &report);
  return report;
}

}  // namespace handgrasp
