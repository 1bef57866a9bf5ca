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

#include "handgrasp/optimizer.h"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

namespace handgrasp {
namespace {

constexpr double kMaxDamping = 1e32;

}  // namespace

void LmParams::Validate() const {
  if (max_iters < 0) throw InputError("max_iters must be >= 0");
  if (!(initial_damping > 0)) throw InputError("initial damping must be > 0");
  if (!(damping_up > 1.0)) throw InputError("damping_up must be > 1");
  if (!(damping_down > 0.0 && damping_down < 1.0)) {
    throw InputError("damping_down must lie in (0, 1)");
  }
  if (!(step_tolerance > 0 && objective_tolerance > 0 && gradient_tolerance > 0)) {
    throw InputError("LM tolerances must be > 0");
  }
}

std::string ToString(LmStopReason reason) {
  switch (reason) {
    case LmStopReason::kStep:
      return "step";
    case LmStopReason::kObjective:
      return "objective";
    case LmStopReason::kGradient:
      return "gradient";
    case LmStopReason::kMaxIters:
      return "max_iters";
    case LmStopReason::kSolveFailed:
      return "solve_failed";
  }
  return "unknown";
}

LmResult LevenbergMarquardt(const LeastSquaresProblem& problem,
                            const Eigen::VectorXd& x0, const LmParams& params) {
  params.Validate();
  LmResult result;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  problem.Evaluate(x, &r, &j);
  double cost = r.squaredNorm();
  result.trace.push_back(cost);
  result.accepted_points.push_back(x);

  Eigen::VectorXd g = j.transpose() * r;
  double mu = params.initial_damping;
  result.reason = LmStopReason::kMaxIters;
  if (g.lpNorm<Eigen::Infinity>() <= params.gradient_tolerance) {
    result.reason = LmStopReason::kGradient;
  } else {
    Eigen::VectorXd r_new;
    Eigen::MatrixXd j_new;
    Eigen::MatrixXd a = j.transpose() * j;
    for (int it = 1; it <= params.max_iters; ++it) {
      result.iterations = it;
      if (!a.allFinite() || !g.allFinite()) {
        result.log.push_back({it, cost, mu, 0.0, false});
        result.reason = LmStopReason::kSolveFailed;
        break;
      }
      Eigen::VectorXd diag = a.diagonal();
      double floor = 1e-12 * std::max(diag.maxCoeff(), 1e-300);
      diag = diag.cwiseMax(floor);
      Eigen::MatrixXd damped = a;
      damped.diagonal() += mu * diag;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      Eigen::VectorXd delta;
      bool solved = ldlt.info() == Eigen::Success;
      if (solved) {
        delta = ldlt.solve(-g);
        solved = delta.allFinite();
      }
      if (!solved) {
        mu *= params.damping_up;
        result.log.push_back({it, cost, mu, 0.0, false});
        if (mu > kMaxDamping) {
          result.reason = LmStopReason::kSolveFailed;
          break;
        }
        continue;
      }
      double step = delta.norm();
      if (step <= params.step_tolerance * (x.norm() + params.step_tolerance)) {
        result.log.push_back({it, cost, mu, step, false});
        result.reason = LmStopReason::kStep;
        break;
      }
      Eigen::VectorXd x_new = problem.Retract(x, delta);
      problem.Evaluate(x_new, &r_new, &j_new);
      double cost_new = r_new.squaredNorm();
      if (std::isfinite(cost_new) && cost_new < cost) {
        result.log.push_back({it, cost_new, mu, step, true});
        double decrease = (cost - cost_new) / cost;
        x = std::move(x_new);
        std::swap(r, r_new);
        std::swap(j, j_new);
        if (cost_new > result.trace.back()) {
          throw Error("LM accepted a step that increased the objective");
        }
        cost = cost_new;
        result.trace.push_back(cost);
        result.accepted_points.push_back(x);
        ++result.accepted_steps;
        mu = std::max(mu * params.damping_down, 1e-300);
        a = j.transpose() * j;
        g = j.transpose() * r;
        if (decrease <= params.objective_tolerance) {
          result.reason = LmStopReason::kObjective;
          break;
        }
        if (g.lpNorm<Eigen::Infinity>() <= params.gradient_tolerance) {
          result.reason = LmStopReason::kGradient;
          break;
        }
      } else {
        result.log.push_back({it, cost_new, mu, step, false});
        mu *= params.damping_up;
        if (mu > kMaxDamping) {
          result.reason = LmStopReason::kSolveFailed;
          break;
        }
      }
    }
  }
  result.x = x;
  result.cost = cost;
  return result;
}

Eigen::VectorXd PackPose(const HandPose& pose) {
  Eigen::VectorXd x(7 + pose.joints.size());
  x.head<3>() = pose.transform.translation;
  const Quat& q = pose.transform.rotation;
  x[3] = q.w();
  x[4] = q.x();
  x[5] = q.y();
  x[6] = q.z();
  x.tail(pose.joints.size()) = pose.joints;
  return x;
}

HandPose UnpackPose(const Eigen::VectorXd& x) {
  HandPose pose;
  pose.transform.translation = x.head<3>();
  pose.transform.rotation = Quat(x[3], x[4], x[5], x[6]);
  pose.joints = x.tail(x.size() - 7);
  return pose;
}

void PoseProblem::Evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* residuals,
                           Eigen::MatrixXd* jacobian) const {
  objective_.Evaluate(UnpackPose(x), residuals, jacobian, nullptr);
}

Eigen::VectorXd PoseProblem::Retract(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& delta) const {
  HandPose pose = UnpackPose(x);
  pose.transform.translation += delta.head<3>();
  pose.transform.rotation = (ExpMap(delta.segment<3>(3)) * pose.transform.rotation).normalized();
  pose.joints = objective_.hand().ClampJoints(pose.joints + delta.tail(delta.size() - 6));
  return PackPose(pose);
}

PoseRefinement RefinePose(const GraspObjective& objective, const HandPose& init,
                          const LmParams& params) {
  PoseProblem problem(objective);
  PoseRefinement out;
  HandPose start = init;
  start.transform.rotation.normalize();
  start.joints = objective.hand().ClampJoints(start.joints);
  out.lm = LevenbergMarquardt(problem, PackPose(start), params);
  out.pose = UnpackPose(out.lm.x);
  out.report = objective.Report(out.pose);
  return out;
}

std::string TraceJsonLines(const LmResult& result) {
  std::ostringstream out;
  for (const LmIteration& it : result.log) {
    nlohmann::json line = {{"iteration", it.iteration},
                           {"L", it.cost},
                           {"mu", it.damping},
                           {"step_norm", it.step_norm},
                           {"accepted", it.accepted}};
    out << line.dump() << "\n";
  }
  return out.str();
}

}  // namespace handgrasp
