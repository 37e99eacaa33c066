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

#include "vfqp/tracking.hpp"

#include <limits>

namespace vfqp {

double TrackingCost::state_cost(const Vec12& x) const {
  const Vec12 e = x - reference;
  return 0.5 * e.dot(w.cwiseProduct(e));
}

double TrackingCost::stage_cost(const Vec12& x, const Vec12& u) const {
  return state_cost(x) + 0.5 * r * u.squaredNorm();
}

TrackingCost ilqr_cost_for_tracking(const Vec3& v_cmd, const CostConfig& cfg) {
  TrackingCost cost;
  cost.reference.setZero();
  cost.reference[idx::kCom + 2] = cfg.height;
  cost.reference[idx::kComVel + 0] = v_cmd.x();
  cost.reference[idx::kComVel + 1] = v_cmd.y();
  cost.w = cfg.w;
  cost.w[idx::kCom + 0] = 0.0;
  cost.w[idx::kCom + 1] = 0.0;
  cost.r = cfg.r;
  return cost;
}

CentroidalProblem::CentroidalProblem(GaitSchedule schedule, ModelParams params,
                                     TrackingCost cost, ForceBounds bounds)
    : schedule_(std::move(schedule)),
      params_(std::move(params)),
      cost_(std::move(cost)),
      bounds_(bounds) {
  params_.validate();
}

ilqr::VectorXd CentroidalProblem::dynamics(int t, const ilqr::VectorXd& x,
                                           const ilqr::VectorXd& u) const {
  return step(Vec12(x), Vec12(u), schedule_.contacts[t], schedule_.points[t],
              params_);
}

void CentroidalProblem::dynamics_jacobians(int t, const ilqr::VectorXd& x,
                                           const ilqr::VectorXd& u,
                                           ilqr::MatrixXd& f_x,
                                           ilqr::MatrixXd& f_u) const {
  const DynamicsJacobians J = full_jacobians(
      Vec12(x), Vec12(u), schedule_.contacts[t], schedule_.points[t], params_);
  f_x = J.f_x;
  f_u = J.f_u;
}

double CentroidalProblem::running_cost(int /*t*/, const ilqr::VectorXd& x,
                                       const ilqr::VectorXd& u) const {
  return cost_.stage_cost(Vec12(x), Vec12(u));
}

void CentroidalProblem::running_cost_expansion(int /*t*/,
                                               const ilqr::VectorXd& x,
                                               const ilqr::VectorXd& u,
                                               ilqr::CostExpansion& out) const {
  out.l_x = cost_.w.cwiseProduct(Vec12(x) - cost_.reference);
  out.l_u = cost_.r * u;
  out.l_xx = cost_.w.asDiagonal();
  out.l_uu = cost_.r * Mat12::Identity();
  out.l_ux = Mat12::Zero();
}

double CentroidalProblem::terminal_cost(const ilqr::VectorXd& x) const {
  return cost_.state_cost(Vec12(x));
}

void CentroidalProblem::terminal_cost_expansion(const ilqr::VectorXd& x,
                                                ilqr::VectorXd& l_x,
                                                ilqr::MatrixXd& l_xx) const {
  l_x = cost_.w.cwiseProduct(Vec12(x) - cost_.reference);
  l_xx = cost_.w.asDiagonal();
}

void CentroidalProblem::control_bounds(int t, ilqr::VectorXd& lower,
                                       ilqr::VectorXd& upper) const {
  const double inf = std::numeric_limits<double>::infinity();
  lower.resize(kControlDim);
  upper.resize(kControlDim);
  const LegFlags& active = schedule_.contacts[t];
  for (int i = 0; i < kNumLegs; ++i) {
    if (!active[i]) {
      lower.segment<3>(3 * i).setZero();
      upper.segment<3>(3 * i).setZero();
    } else if (!bounds_.enabled) {
      lower.segment<3>(3 * i).setConstant(-inf);
      upper.segment<3>(3 * i).setConstant(inf);
    } else {
      lower.segment<3>(3 * i) << -bounds_.fxy_max, -bounds_.fxy_max, 0.0;
      upper.segment<3>(3 * i) << bounds_.fxy_max, bounds_.fxy_max,
          bounds_.f_z_max;
    }
  }
}

std::vector<ilqr::VectorXd> CentroidalProblem::gravity_compensation() const {
  std::vector<ilqr::VectorXd> us;
  us.reserve(horizon());
  for (int t = 0; t < horizon(); ++t) {
    Vec12 u = Vec12::Zero();
    int n = 0;
    for (bool a : schedule_.contacts[t]) n += a ? 1 : 0;
    if (n > 0) {
      const double fz = params_.mass * params_.gravity.z() / n;
      for (int i = 0; i < kNumLegs; ++i)
        if (schedule_.contacts[t][i]) u[3 * i + 2] = fz;
    }
    us.emplace_back(u);
  }
  return us;
}

}  // namespace vfqp
