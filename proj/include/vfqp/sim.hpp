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

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "vfqp/config.hpp"
#include "vfqp/features.hpp"
#include "vfqp/mlp.hpp"
#include "vfqp/qp.hpp"

namespace vfqp {

struct VcmdSegment {
  double t_start = 0.0;
  Vec3 v_cmd = Vec3::Zero();
};

struct Impulse {
  double time = 0.0;
  Vec6 dv = Vec6::Zero();  // added to (c_dot, omega)
};

struct SimConfig {
  GaitKind gait = GaitKind::kTrot;
  SimParams params;
  std::vector<VcmdSegment> segments;  // sorted by t_start; empty means rest
  std::vector<Impulse> impulses;
  bool ablation = false;  // drop friction and force bounds from the QP
  std::uint64_t seed = 1;
  bool record_timing = false;  // wall-clock QP time, not reproducible

  // Ticks of the control loop between value refreshes.
  int prediction_divisor() const;
  Vec3 v_cmd_at(double t) const;
  void validate() const;
};

// What the controller sees when it asks for a value expansion.
struct PredictionInput {
  CentroidalState x;
  LegFlags contacts{};
  LegPoints points{};
  std::array<double, kNumLegs> contact_times{};
  Vec3 v_cmd = Vec3::Zero();
  double time = 0.0;
};

class ValuePredictor {
 public:
  virtual ~ValuePredictor() = default;
  virtual ReducedExpansion predict(const PredictionInput& in) = 0;
};

class NetPredictor final : public ValuePredictor {
 public:
  explicit NetPredictor(const ValueNet& net) : net_(net) {}
  ReducedExpansion predict(const PredictionInput& in) override;

 private:
  const ValueNet& net_;
};

// A single expansion of the value at the next step about x_hat_next,
// reduced with the actual next position at every call.
class FixedExpansionPredictor final : public ValuePredictor {
 public:
  FixedExpansionPredictor(const Vec12& V_x, const Mat12& V_xx,
                          const Vec12& x_hat_next, double dt)
      : V_x_(V_x), V_xx_(V_xx), x_hat_next_(x_hat_next), dt_(dt) {}
  ReducedExpansion predict(const PredictionInput& in) override;

 private:
  Vec12 V_x_;
  Mat12 V_xx_;
  Vec12 x_hat_next_;
  double dt_;
};

// Solves the short iLQR problem from the observed state at each refresh.
// Slow; used as a reference for the learned predictor.
class IlqrPredictor final : public ValuePredictor {
 public:
  IlqrPredictor(const Config& cfg, GaitKind gait);
  ReducedExpansion predict(const PredictionInput& in) override;

 private:
  Config cfg_;
  GaitKind gait_;
};

// Converged expansion of the standing problem at rest at the nominal height.
std::unique_ptr<FixedExpansionPredictor> standing_predictor(const Config& cfg);

struct RunRow {
  double t = 0.0;
  Vec12 x = Vec12::Zero();
  Vec12 F = Vec12::Zero();
  LegFlags contacts{};
  Vec3 v_cmd = Vec3::Zero();
  QpStatus qp_status = QpStatus::kOptimal;
  int qp_iterations = 0;
  double qp_us = 0.0;
  int prediction_age = 0;
};

struct RunLog {
  double dt = 0.0;
  std::vector<RunRow> rows;
  bool fallen = false;
  double fall_time = 0.0;
  std::string fall_reason;
  bool has_timing = false;

  int ticks() const { return static_cast<int>(rows.size()); }
};

inline constexpr const char* kRunLogSchema = "# vfqp-runlog v1";

void write_runlog_csv(const RunLog& log, std::ostream& os);

// Initial state: at rest, CoM at the nominal height above the origin.
RunLog run(const Config& cfg, ValuePredictor& predictor, const SimConfig& sim,
           const CentroidalState* x0 = nullptr);

struct TrackingMetrics {
  int steady_ticks = 0;
  double mean_error_xy = 0.0;  // mean |(c_dot - v_cmd)_xy| over steady ticks
  double mean_error_x = 0.0;
  double mean_abs_vx = 0.0;
  double min_fz = 0.0;  // over legs in contact
  double max_fz = 0.0;
  double constraint_violation = 0.0;  // worst pyramid/bound residual
};

TrackingMetrics evaluate(const RunLog& log, const SimParams& params,
                         const QpConfig& qp);

// Builds a SimConfig with the configured sim parameters and one constant
// command.
SimConfig constant_command(const Config& cfg, GaitKind gait, const Vec3& v_cmd);

struct ExperimentModel {
  GaitKind gait;
  const ValueNet* net;
};

struct ExperimentOptions {
  std::string out_dir;  // empty: no files
  int workers = 1;
  std::vector<double> velocities{0.0, 0.3, -0.3};
  double sweep_velocity = 0.3;
  std::vector<double> rates{500.0, 250.0, 125.0, 62.5, 31.25};
  std::uint64_t seed = 1;
};

struct ExperimentRow {
  GaitKind gait = GaitKind::kTrot;
  std::string label;
  double v_cmd_x = 0.0;
  double prediction_rate = 0.0;
  bool constrained = true;
  bool fallen = false;
  double fall_time = 0.0;
  int ticks = 0;
  TrackingMetrics metrics;
};

struct ExperimentResult {
  std::string name;
  std::vector<ExperimentRow> rows;
  std::vector<RunLog> logs;  // parallel to rows

  void write_summary_csv(std::ostream& os) const;
};

ExperimentResult experiment_velocity_tracking(
    const Config& cfg, const std::vector<ExperimentModel>& models,
    const ExperimentOptions& opt);
ExperimentResult experiment_frequency_sweep(
    const Config& cfg, const std::vector<ExperimentModel>& models,
    const ExperimentOptions& opt);
ExperimentResult experiment_constraint_ablation(
    const Config& cfg, const std::vector<ExperimentModel>& models,
    const ExperimentOptions& opt);

// Dispatch by name: velocity-tracking, frequency-sweep, constraint-ablation.
ExperimentResult run_experiment(const std::string& name, const Config& cfg,
                                const std::vector<ExperimentModel>& models,
                                const ExperimentOptions& opt);

// Writes <out_dir>/<name>_summary.csv and one run log per row.
void write_experiment(const ExperimentResult& res, const std::string& out_dir);

}  // namespace vfqp
