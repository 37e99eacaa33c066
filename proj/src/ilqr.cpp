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

#include "vfqp/ilqr.hpp"

#include <cmath>
#include <limits>

#include "vfqp/box_qp.hpp"

namespace vfqp::ilqr {

void OcProblem::control_bounds(int /*t*/, VectorXd& lower,
                               VectorXd& upper) const {
  const double inf = std::numeric_limits<double>::infinity();
  lower = VectorXd::Constant(control_dim(), -inf);
  upper = VectorXd::Constant(control_dim(), inf);
}

double trajectory_cost(const OcProblem& problem, const Trajectory& traj) {
  double J = 0.0;
  for (int t = 0; t < problem.horizon(); ++t)
    J += problem.running_cost(t, traj.xs[t], traj.us[t]);
  return J + problem.terminal_cost(traj.xs.back());
}

Trajectory rollout(const OcProblem& problem, const VectorXd& x0,
                   const std::vector<VectorXd>& us) {
  const int T = problem.horizon();
  Trajectory traj;
  traj.xs.reserve(T + 1);
  traj.us.reserve(T);
  traj.xs.push_back(x0);
  VectorXd lo, hi;
  for (int t = 0; t < T; ++t) {
    problem.control_bounds(t, lo, hi);
    traj.us.push_back(us[t].cwiseMax(lo).cwiseMin(hi));
    traj.xs.push_back(problem.dynamics(t, traj.xs[t], traj.us[t]));
  }
  return traj;
}

namespace {

bool unbounded(const VectorXd& lo, const VectorXd& hi) {
  return (lo.array() == -std::numeric_limits<double>::infinity()).all() &&
         (hi.array() == std::numeric_limits<double>::infinity()).all();
}

}  // namespace

BackwardPassResult backward_pass(const OcProblem& problem,
                                 const Trajectory& traj,
                                 double regularization) {
  const int T = problem.horizon();
  const int nx = problem.state_dim();
  const int nu = problem.control_dim();

  BackwardPassResult out;
  out.expansions.resize(T + 1);
  out.K.resize(T);
  out.k.resize(T);

  VectorXd V_x;
  MatrixXd V_xx;
  problem.terminal_cost_expansion(traj.xs[T], V_x, V_xx);
  out.expansions[T] = {V_x, V_xx};

  CostExpansion l;
  MatrixXd f_x(nx, nx), f_u(nx, nu);
  VectorXd lo, hi;
  const MatrixXd reg = regularization * MatrixXd::Identity(nu, nu);

  for (int t = T - 1; t >= 0; --t) {
    const VectorXd& x = traj.xs[t];
    const VectorXd& u = traj.us[t];
    problem.running_cost_expansion(t, x, u, l);
    problem.dynamics_jacobians(t, x, u, f_x, f_u);

    const MatrixXd Vxx_fx = V_xx * f_x;
    const MatrixXd Vxx_fu = V_xx * f_u;
    const VectorXd Q_x = l.l_x + f_x.transpose() * V_x;
    const VectorXd Q_u = l.l_u + f_u.transpose() * V_x;
    const MatrixXd Q_xx = l.l_xx + f_x.transpose() * Vxx_fx;
    const MatrixXd Q_ux = l.l_ux + f_u.transpose() * Vxx_fx;
    MatrixXd Q_uu = l.l_uu + f_u.transpose() * Vxx_fu;
    Q_uu = 0.5 * (Q_uu + Q_uu.transpose()).eval();
    const MatrixXd Q_uu_reg = Q_uu + reg;

    problem.control_bounds(t, lo, hi);
    VectorXd k(nu);
    MatrixXd K = MatrixXd::Zero(nu, nx);
    if (unbounded(lo, hi)) {
      Eigen::LLT<MatrixXd> llt(Q_uu_reg);
      if (llt.info() != Eigen::Success) {
        out.failed_step = t;
        return out;
      }
      k = -llt.solve(Q_u);
      K = -llt.solve(Q_ux);
    } else {
      BoxQpResult qp = box_qp(Q_uu_reg, Q_u, lo - u, hi - u,
                              VectorXd::Zero(nu));
      if (!qp.ok()) {
        out.failed_step = t;
        return out;
      }
      k = qp.x;
      if (!qp.free_idx.empty()) {
        const int nf = static_cast<int>(qp.free_idx.size());
        MatrixXd Qux_free(nf, nx);
        for (int i = 0; i < nf; ++i) Qux_free.row(i) = Q_ux.row(qp.free_idx[i]);
        const MatrixXd K_free = -qp.free_llt.solve(Qux_free);
        for (int i = 0; i < nf; ++i) K.row(qp.free_idx[i]) = K_free.row(i);
      }
    }

    // Value of the (possibly clamped) local policy; reduces to
    // Q_x - Q_xu Q_uu^-1 Q_u when nothing is clamped.
    const MatrixXd Quu_K = Q_uu * K;
    V_x = Q_x + K.transpose() * (Q_uu * k) + K.transpose() * Q_u +
          Q_ux.transpose() * k;
    V_xx = Q_xx + K.transpose() * Quu_K + K.transpose() * Q_ux +
           Q_ux.transpose() * K;
    V_xx = 0.5 * (V_xx + V_xx.transpose()).eval();

    out.expected_linear += k.dot(Q_u);
    out.expected_quadratic += 0.5 * k.dot(Q_uu * k);
    out.expansions[t] = {V_x, V_xx};
    out.K[t] = std::move(K);
    out.k[t] = std::move(k);
  }
  out.ok = true;
  return out;
}

ForwardPassResult forward_pass(const OcProblem& problem, const Trajectory& traj,
                               const std::vector<MatrixXd>& K,
                               const std::vector<VectorXd>& k, double alpha) {
  const int T = problem.horizon();
  ForwardPassResult out;
  out.traj.xs.reserve(T + 1);
  out.traj.us.reserve(T);
  out.traj.xs.push_back(traj.xs[0]);
  VectorXd lo, hi;
  double J = 0.0;
  for (int t = 0; t < T; ++t) {
    const VectorXd& x = out.traj.xs[t];
    problem.control_bounds(t, lo, hi);
    VectorXd u = traj.us[t] + alpha * k[t] + K[t] * (x - traj.xs[t]);
    u = u.cwiseMax(lo).cwiseMin(hi);
    J += problem.running_cost(t, x, u);
    VectorXd next = problem.dynamics(t, x, u);
    if (!next.allFinite() || !std::isfinite(J)) return out;
    out.traj.us.push_back(std::move(u));
    out.traj.xs.push_back(std::move(next));
  }
  J += problem.terminal_cost(out.traj.xs.back());
  if (!std::isfinite(J)) return out;
  out.cost = J;
  out.ok = true;
  return out;
}

SolveResult Solver::solve(const OcProblem& problem, const VectorXd& x0,
                          const std::vector<VectorXd>& initial_us) const {
  const SolverOptions& opt = options_;
  SolveResult res;
  res.traj = rollout(problem, x0, initial_us);
  double J = trajectory_cost(problem, res.traj);
  res.cost_history.push_back(J);

  double lambda = opt.reg_init;
  BackwardPassResult bp;
  bool have_bp = false;

  for (int iter = 0; iter < opt.max_iters; ++iter) {
    if (!have_bp) {
      bp = backward_pass(problem, res.traj, lambda);
      if (!bp.ok) {
        lambda *= opt.reg_increase;
        if (lambda > opt.reg_max) break;
        continue;
      }
      have_bp = true;
    }

    const double expected = -(bp.expected_linear + bp.expected_quadratic);
    if (expected < opt.cost_tol * std::abs(J)) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    for (double alpha : opt.alphas) {
      ForwardPassResult fp = forward_pass(problem, res.traj, bp.K, bp.k, alpha);
      if (fp.ok && fp.cost < J) {
        const double rel = (J - fp.cost) / std::max(std::abs(J), 1e-300);
        res.traj = std::move(fp.traj);
        J = fp.cost;
        res.cost_history.push_back(J);
        ++res.iterations;
        accepted = true;
        if (rel < opt.cost_tol) res.converged = true;
        break;
      }
    }
    have_bp = false;
    if (accepted) {
      lambda /= opt.reg_decrease;
      if (res.converged) break;
    } else {
      lambda *= opt.reg_increase;
      if (lambda > opt.reg_max) break;
    }
  }

  // Expansions, gains and feedforward about the returned trajectory.
  if (!have_bp) {
    bp = backward_pass(problem, res.traj, lambda);
    while (!bp.ok && lambda <= opt.reg_max) {
      lambda *= opt.reg_increase;
      bp = backward_pass(problem, res.traj, lambda);
    }
    if (!bp.ok) res.converged = false;
  }
  if (bp.ok) {
    res.expansions = std::move(bp.expansions);
    res.K = std::move(bp.K);
    res.k = std::move(bp.k);
  }
  return res;
}

}  // namespace vfqp::ilqr
