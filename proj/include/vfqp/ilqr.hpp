// Copyright 2026 The vfqp Authors
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

#pragma once

#include <vector>

#include <Eigen/Core>

namespace vfqp::ilqr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct CostExpansion {
  VectorXd l_x, l_u;
  MatrixXd l_xx, l_uu, l_ux;
};

// Discrete-time finite-horizon problem
//   min sum_{t<T} l_t(x_t, u_t) + l_T(x_T)  s.t.  x_{t+1} = f_t(x_t, u_t).
class OcProblem {
 public:
  virtual ~OcProblem() = default;

  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  virtual int horizon() const = 0;

  virtual VectorXd dynamics(int t, const VectorXd& x, const VectorXd& u) const = 0;
  virtual void dynamics_jacobians(int t, const VectorXd& x, const VectorXd& u,
                                  MatrixXd& f_x, MatrixXd& f_u) const = 0;

  virtual double running_cost(int t, const VectorXd& x, const VectorXd& u) const = 0;
  virtual void running_cost_expansion(int t, const VectorXd& x,
                                      const VectorXd& u,
                                      CostExpansion& out) const = 0;
  virtual double terminal_cost(const VectorXd& x) const = 0;
  virtual void terminal_cost_expansion(const VectorXd& x, VectorXd& l_x,
                                       MatrixXd& l_xx) const = 0;

  // Default: unbounded.
  virtual void control_bounds(int t, VectorXd& lower, VectorXd& upper) const;
};

struct ValueExpansion {
  VectorXd V_x;
  MatrixXd V_xx;
};

struct Trajectory {
  std::vector<VectorXd> xs;  // T + 1 states
  std::vector<VectorXd> us;  // T controls
};

struct BackwardPassResult {
  bool ok = false;  // false: Q_uu not PD, increase regularization
  int failed_step = -1;
  std::vector<ValueExpansion> expansions;  // t = 0..T
  std::vector<MatrixXd> K;                 // feedback gains
  std::vector<VectorXd> k;                 // feedforward
  double expected_linear = 0.0;            // sum k^T Q_u
  double expected_quadratic = 0.0;         // sum 1/2 k^T Q_uu k
};

struct ForwardPassResult {
  bool ok = false;  // false: rollout went non-finite
  Trajectory traj;
  double cost = 0.0;
};

struct SolverOptions {
  int max_iters = 100;
  double cost_tol = 1e-7;
  std::vector<double> alphas{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  double reg_init = 1e-6;
  double reg_increase = 10.0;
  double reg_decrease = 2.0;
  double reg_max = 1e6;
};

struct SolveResult {
  Trajectory traj;
  std::vector<ValueExpansion> expansions;  // about traj, t = 0..T
  std::vector<MatrixXd> K;
  std::vector<VectorXd> k;
  std::vector<double> cost_history;  // initial cost, then each accepted step
  int iterations = 0;                // accepted steps
  bool converged = false;
  double cost() const { return cost_history.back(); }
};

double trajectory_cost(const OcProblem& problem, const Trajectory& traj);

// Clamped open-loop rollout from x0.
Trajectory rollout(const OcProblem& problem, const VectorXd& x0,
                   const std::vector<VectorXd>& us);

BackwardPassResult backward_pass(const OcProblem& problem,
                                 const Trajectory& traj, double regularization);

ForwardPassResult forward_pass(const OcProblem& problem, const Trajectory& traj,
                               const std::vector<MatrixXd>& K,
                               const std::vector<VectorXd>& k, double alpha);

class Solver {
 public:
  explicit Solver(SolverOptions options = {}) : options_(std::move(options)) {}

  // initial_us must hold horizon() controls; they are clamped to bounds.
  SolveResult solve(const OcProblem& problem, const VectorXd& x0,
                    const std::vector<VectorXd>& initial_us) const;

  const SolverOptions& options() const { return options_; }

 private:
  SolverOptions options_;
};

}  // namespace vfqp::ilqr
