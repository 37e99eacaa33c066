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

#include "vfqp/centroidal.hpp"
#include "vfqp/features.hpp"

namespace vfqp {

enum class QpStatus { kOptimal, kMaxIter, kInfeasible };

const char* to_string(QpStatus s);

// Dense convex QP  min 1/2 x'Qx + c'x  s.t.  A x <= b, Q SPD.
struct DenseQp {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd A;  // rows x n, may have zero rows
  Eigen::VectorXd b;
};

struct DenseQpResult {
  QpStatus status = QpStatus::kMaxIter;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;        // one multiplier per row of A, >= 0
  std::vector<int> working_set;  // linearly independent active rows
  int iterations = 0;
};

// Primal active-set method (Nocedal & Wright, Alg. 16.3) started from a
// feasible point. Equality subproblems use a null-space basis of the working set.
class ActiveSetSolver {
 public:
  struct Options {
    int max_iter = 200;
    double feas_tol = 1e-10;
    double dual_tol = 1e-12;
  };

  ActiveSetSolver() = default;
  explicit ActiveSetSolver(Options opt) : opt_(opt) {}

  DenseQpResult solve(const DenseQp& qp, const Eigen::VectorXd& x0);

 private:
  Options opt_;
};

// One-step force QP with v_{t+1} eliminated:
//   min g'v + 1/2 v'Hv + 1/2 F'RF,  v = v_t + B_F F + B_0,
// per active leg |F_x| <= mu F_z, |F_y| <= mu F_z, 0 <= F_z <= f_z_max.
struct QpProblem {
  Vec6 g = Vec6::Zero();
  Mat6 H = Mat6::Identity();
  Mat12 R = Mat12::Identity();
  Mat6x12 B_F = Mat6x12::Zero();
  Vec6 B_0 = Vec6::Zero();
  Vec6 v_t = Vec6::Zero();
  LegFlags active{false, false, false, false};
  double mu = 0.6;
  double f_z_max = 30.0;
  bool constrained = true;

  std::vector<int> active_legs() const;
  // Dense QP over the forces of active legs only.
  DenseQp reduced() const;
  double objective(const Vec12& F) const;  // full objective, constants kept
  Vec6 next_velocity(const Vec12& F) const;
};

struct QpSolution {
  QpStatus status = QpStatus::kOptimal;
  Vec12 F = Vec12::Zero();
  Vec6 v_next = Vec6::Zero();
  double objective = 0.0;
  int iterations = 0;
  Eigen::VectorXd lambda;        // multipliers of the reduced rows
  std::vector<int> working_set;  // reduced row indices
};

struct ForceLimits {
  double mu = 0.6;
  double f_z_max = 30.0;
  bool constrained = true;
};

QpProblem build_problem(const CentroidalState& x, const LegFlags& contacts,
                        const LegPoints& points, const ReducedExpansion& pred,
                        const ModelParams& p, const ForceLimits& limits,
                        const Mat12& R);

QpSolution solve_qp(const QpProblem& problem,
                    const ActiveSetSolver::Options& opt = {});

// build_problem + solve_qp; inactive legs get exactly zero force.
ContactForces control_step(const CentroidalState& x, const LegFlags& contacts,
                           const LegPoints& points, const ReducedExpansion& pred,
                           const ModelParams& p, const ForceLimits& limits,
                           const Mat12& R, QpSolution* solution = nullptr);

}  // namespace vfqp
