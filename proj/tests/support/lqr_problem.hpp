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

#include <Eigen/Dense>

#include "vfqp/ilqr.hpp"

namespace vfqp::testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Time-invariant LQR: x+ = Ax + Bu, l = 1/2 x'Qx + 1/2 u'Ru, l_T = 1/2 x'Qf x.
class LqrProblem final : public ilqr::OcProblem {
 public:
  LqrProblem(MatrixXd A, MatrixXd B, MatrixXd Q, MatrixXd R, MatrixXd Qf, int T)
      : A_(std::move(A)), B_(std::move(B)), Q_(std::move(Q)), R_(std::move(R)),
        Qf_(std::move(Qf)), T_(T) {}

  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int control_dim() const override { return static_cast<int>(B_.cols()); }
  int horizon() const override { return T_; }

  VectorXd dynamics(int, const VectorXd& x, const VectorXd& u) const override {
    return A_ * x + B_ * u;
  }
  void dynamics_jacobians(int, const VectorXd&, const VectorXd&, MatrixXd& f_x,
                          MatrixXd& f_u) const override {
    f_x = A_;
    f_u = B_;
  }
  double running_cost(int, const VectorXd& x, const VectorXd& u) const override {
    return 0.5 * x.dot(Q_ * x) + 0.5 * u.dot(R_ * u);
  }
  void running_cost_expansion(int, const VectorXd& x, const VectorXd& u,
                              ilqr::CostExpansion& out) const override {
    out.l_x = Q_ * x;
    out.l_u = R_ * u;
    out.l_xx = Q_;
    out.l_uu = R_;
    out.l_ux = MatrixXd::Zero(u.size(), x.size());
  }
  double terminal_cost(const VectorXd& x) const override { return 0.5 * x.dot(Qf_ * x); }
  void terminal_cost_expansion(const VectorXd& x, VectorXd& l_x,
                               MatrixXd& l_xx) const override {
    l_x = Qf_ * x;
    l_xx = Qf_;
  }
  void control_bounds(int t, VectorXd& lower, VectorXd& upper) const override {
    if (lower_.size() == 0) return ilqr::OcProblem::control_bounds(t, lower, upper);
    lower = lower_;
    upper = upper_;
  }

  void set_bounds(VectorXd lo, VectorXd hi) {
    lower_ = std::move(lo);
    upper_ = std::move(hi);
  }

  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }
  const MatrixXd& Q() const { return Q_; }
  const MatrixXd& R() const { return R_; }
  const MatrixXd& Qf() const { return Qf_; }

 private:
  MatrixXd A_, B_, Q_, R_, Qf_;
  int T_;
  VectorXd lower_, upper_;
};

// Six decoupled double integrators (12 states, 6 controls).
inline LqrProblem double_integrator(int T, double dt = 0.05) {
  const int n = 12, m = 6;
  MatrixXd A = MatrixXd::Identity(n, n), B = MatrixXd::Zero(n, m);
  for (int i = 0; i < m; ++i) {
    A(i, m + i) = dt;
    B(m + i, i) = dt;
  }
  VectorXd q(n);
  for (int i = 0; i < n; ++i) q(i) = 1.0 + 0.25 * i;
  MatrixXd Q = q.asDiagonal();
  MatrixXd R = 0.1 * MatrixXd::Identity(m, m);
  MatrixXd Qf = 10.0 * Q;
  return LqrProblem(A, B, Q, R, Qf, T);
}

// Backward Riccati recursion; returns P_0 .. P_T.
inline std::vector<MatrixXd> riccati(const LqrProblem& p) {
  std::vector<MatrixXd> P(p.horizon() + 1);
  P[p.horizon()] = p.Qf();
  for (int t = p.horizon() - 1; t >= 0; --t) {
    const MatrixXd& Pn = P[t + 1];
    const MatrixXd S = p.R() + p.B().transpose() * Pn * p.B();
    const MatrixXd K = S.ldlt().solve(p.B().transpose() * Pn * p.A());
    P[t] = p.Q() + p.A().transpose() * Pn * (p.A() - p.B() * K);
    P[t] = 0.5 * (P[t] + P[t].transpose()).eval();
  }
  return P;
}

}  // namespace vfqp::testing
