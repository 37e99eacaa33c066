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

#include "vfqp/config.hpp"
#include "vfqp/gait.hpp"
#include "vfqp/ilqr.hpp"

namespace vfqp {

// l(x, u) = 1/2 (x - x_ref)' W (x - x_ref) + 1/2 r u'u with W diagonal and no
// weight on the horizontal CoM position.
struct TrackingCost {
  Vec12 reference = Vec12::Zero();
  Vec12 w = Vec12::Zero();
  double r = 0.0;

  double state_cost(const Vec12& x) const;
  double stage_cost(const Vec12& x, const Vec12& u) const;
};

// Reference state (0, 0, height, 0, 0, 0, v_cmd_x, v_cmd_y, 0, 0, 0, 0).
TrackingCost ilqr_cost_for_tracking(const Vec3& v_cmd, const CostConfig& cfg);

struct ForceBounds {
  double f_z_max = 30.0;
  double fxy_max = 18.0;
  bool enabled = true;
};

// Centroidal trotting/bounding problem along a fixed contact schedule.
// The terminal cost is the state part of the stage cost.
class CentroidalProblem final : public ilqr::OcProblem {
 public:
  CentroidalProblem(GaitSchedule schedule, ModelParams params, TrackingCost cost,
                    ForceBounds bounds);

  int state_dim() const override { return kStateDim; }
  int control_dim() const override { return kControlDim; }
  int horizon() const override { return schedule_.size(); }

  ilqr::VectorXd dynamics(int t, const ilqr::VectorXd& x,
                          const ilqr::VectorXd& u) const override;
  void dynamics_jacobians(int t, const ilqr::VectorXd& x,
                          const ilqr::VectorXd& u, ilqr::MatrixXd& f_x,
                          ilqr::MatrixXd& f_u) const override;
  double running_cost(int t, const ilqr::VectorXd& x,
                      const ilqr::VectorXd& u) const override;
  void running_cost_expansion(int t, const ilqr::VectorXd& x,
                              const ilqr::VectorXd& u,
                              ilqr::CostExpansion& out) const override;
  double terminal_cost(const ilqr::VectorXd& x) const override;
  void terminal_cost_expansion(const ilqr::VectorXd& x, ilqr::VectorXd& l_x,
                               ilqr::MatrixXd& l_xx) const override;
  void control_bounds(int t, ilqr::VectorXd& lower,
                      ilqr::VectorXd& upper) const override;

  const GaitSchedule& schedule() const { return schedule_; }
  const ModelParams& params() const { return params_; }

  // Gravity compensation spread over the legs in contact at each step.
  std::vector<ilqr::VectorXd> gravity_compensation() const;

 private:
  GaitSchedule schedule_;
  ModelParams params_;
  TrackingCost cost_;
  ForceBounds bounds_;
};

}  // namespace vfqp
