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

#ifndef HANDGRASP_OPTIMIZER_H_
#define HANDGRASP_OPTIMIZER_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "handgrasp/hand.h"
#include "handgrasp/objective.h"

namespace handgrasp {

struct LmParams {
  int max_iters = 100;           // trial steps, accepted or not
  double initial_damping = 1e-3;
  double damping_up = 10.0;      // multiplier after a rejected step
  double damping_down = 0.3;     // multiplier after an accepted step
  double step_tolerance = 1e-8;       // |dx| <= eps_x (|x| + eps_x)
  double objective_tolerance = 1e-10; // relative decrease of L
  double gradient_tolerance = 1e-8;   // max |J^T r|

  // Throws InputError unless tolerances are > 0, max_iters >= 0,
  // damping_up > 1 and damping_down in (0, 1).
  void Validate() const;
};

enum class LmStopReason { kStep, kObjective, kGradient, kMaxIters, kSolveFailed };
std::string ToString(LmStopReason reason);

struct LmIteration {
  int iteration = 0;
  double cost = 0.0;      // L after this iteration (the trial value if rejected)
  double damping = 0.0;   // mu used for the step
  double step_norm = 0.0;
  bool accepted = false;
};

struct LmResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // L = |r|^2 at x
  int iterations = 0;
  int accepted_steps = 0;
  LmStopReason reason = LmStopReason::kMaxIters;
  std::vector<double> trace;  // L at the start and after each accepted step
  std::vector<Eigen::VectorXd> accepted_points;
  std::vector<LmIteration> log;
};

// Nonlinear least squares min |r(x)|^2 over a manifold described by Retract.
class LeastSquaresProblem {
 public:
  virtual ~LeastSquaresProblem() = default;
  virtual int NumResiduals() const = 0;
  virtual int TangentDim() const = 0;
  // `jacobian` may be null; it is with respect to the tangent at x.
  virtual void Evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* residuals,
                        Eigen::MatrixXd* jacobian) const = 0;
  virtual Eigen::VectorXd Retract(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& delta) const {
    return x + delta;
  }
};

// Levenberg-Marquardt with Marquardt scaling: solves
// (J^T J + mu diag(J^T J)) dx = -J^T r and accepts only decreasing steps.
// Throws Error if the accepted cost ever increases.
LmResult LevenbergMarquardt(const LeastSquaresProblem& problem,
                            const Eigen::VectorXd& x0, const LmParams& params);

// Packs a pose as [t (3), q (w, x, y, z), d (D)].
Eigen::VectorXd PackPose(const HandPose& pose);
HandPose UnpackPose(const Eigen::VectorXd& x);

// The grasp objective over hand poses: tangent (dt, w, dd), rotation updated
// as q <- normalize(exp(w) q), joints clamped to their limits.
class PoseProblem : public LeastSquaresProblem {
 public:
  explicit PoseProblem(const GraspObjective& objective) : objective_(objective) {}

  int NumResiduals() const override { return objective_.NumResiduals(); }
  int TangentDim() const override { return objective_.TangentDim(); }
  void Evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* residuals,
                Eigen::MatrixXd* jacobian) const override;
  Eigen::VectorXd Retract(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& delta) const override;

 private:
  const GraspObjective& objective_;
};

struct PoseRefinement {
  HandPose pose;
  ResidualReport report;
  LmResult lm;
};

PoseRefinement RefinePose(const GraspObjective& objective, const HandPose& init,
                          const LmParams& params);

// One JSON object per iteration: iteration, L, mu, step_norm, accepted.
std::string TraceJsonLines(const LmResult& result);

}  // namespace handgrasp

#endif  // HANDGRASP_OPTIMIZER_H_
