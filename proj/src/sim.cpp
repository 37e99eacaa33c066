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

#include "vfqp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "vfqp/dataset.hpp"

namespace vfqp {

int SimConfig::prediction_divisor() const {
  const double ratio = params.control_rate / params.prediction_rate;
  const long k = std::lround(ratio);
  if (k < 1 || std::abs(ratio - k) > 1e-9)
    throw Error(ErrorCode::kInvalidArgument,
                "sim: prediction rate must divide the control rate");
  return static_cast<int>(k);
}

Vec3 SimConfig::v_cmd_at(double t) const {
  Vec3 v = Vec3::Zero();
  for (const auto& s : segments)
    if (t + 1e-12 >= s.t_start) v = s.v_cmd;
  return v;
}

void SimConfig::validate() const {
  if (!(params.control_rate > 0.0) || !(params.prediction_rate > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "sim: rates must be > 0");
  if (!(params.duration > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "sim: duration must be > 0");
  prediction_divisor();
  for (std::size_t i = 1; i < segments.size(); ++i)
    if (segments[i].t_start < segments[i - 1].t_start)
      throw Error(ErrorCode::kInvalidArgument, "sim: segments must be sorted");
  if (!(params.obs_noise_std >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "sim: noise std must be >= 0");
}

ReducedExpansion NetPredictor::predict(const PredictionInput& in) {
  return predict_expansion(
      net_, featurize(in.x, in.contacts, in.points, in.contact_times, in.v_cmd));
}

ReducedExpansion FixedExpansionPredictor::predict(const PredictionInput& in) {
  const Vec6 s_next = in.x.position() + dt_ * in.x.velocity();
  return reduce_expansion(V_x_, V_xx_, x_hat_next_, s_next);
}

IlqrPredictor::IlqrPredictor(const Config& cfg, GaitKind gait)
    : cfg_(cfg), gait_(gait) {}

ReducedExpansion IlqrPredictor::predict(const PredictionInput& in) {
  const GaitConfig& g = cfg_.gait(gait_);
  const double dt = cfg_.model.dt;
  const long n = cycle_steps(cfg_.data.short_cycles, g, dt);
  const long tick = std::lround(in.time / dt);
  const GaitSchedule sched =
      build_schedule(in.x, in.v_cmd, g, n * dt, dt, tick, &in.points);
  const CentroidalProblem prob = make_problem(cfg_, sched, in.v_cmd);
  const ilqr::Solver solver(cfg_.ilqr);
  const ilqr::SolveResult sol =
      solver.solve(prob, in.x.to_vector(), prob.gravity_compensation());
  const Vec6 s_next = in.x.position() + dt * in.x.velocity();
  return reduce_expansion(sol.expansions[1].V_x, sol.expansions[1].V_xx,
                          sol.traj.xs[1], s_next);
}

std::unique_ptr<FixedExpansionPredictor> standing_predictor(const Config& cfg) {
  const GaitConfig& g = cfg.gait(GaitKind::kStand);
  const double dt = cfg.model.dt;
  const long n = cycle_steps(cfg.data.short_cycles, g, dt);
  CentroidalState x0;
  x0.c = Vec3(0.0, 0.0, cfg.cost.height);
  const GaitSchedule sched = build_schedule(x0, Vec3::Zero(), g, n * dt, dt);
  const CentroidalProblem prob = make_problem(cfg, sched, Vec3::Zero());
  const ilqr::Solver solver(cfg.ilqr);
  const ilqr::SolveResult sol =
      solver.solve(prob, x0.to_vector(), prob.gravity_compensation());
  if (!sol.converged)
    throw Error(ErrorCode::kSolverFailure, "standing problem did not converge");
  return std::make_unique<FixedExpansionPredictor>(
      sol.expansions[1].V_x, sol.expansions[1].V_xx, sol.traj.xs[1], dt);
}

namespace {

const char* fall_check(const CentroidalState& x, const SimParams& p) {
  if (!x.all_finite()) return "non-finite state";
  if (x.c.z() < p.min_height || x.c.z() > p.max_height) return "height out of range";
  if (std::abs(x.alpha.x()) >= p.max_attitude) return "roll out of range";
  if (std::abs(x.alpha.y()) >= p.max_attitude) return "pitch out of range";
  return nullptr;
}

}  // namespace

RunLog run(const Config& cfg, ValuePredictor& predictor, const SimConfig& sim,
           const CentroidalState* x0) {
  sim.validate();
  const double dt = 1.0 / sim.params.control_rate;
  const long ticks = std::lround(sim.params.duration * sim.params.control_rate);
  const int divisor = sim.prediction_divisor();

  ModelParams plant = cfg.model;
  plant.dt = dt;
  const ForceLimits limits{cfg.qp.mu, cfg.qp.f_z_max, !sim.ablation};
  const Mat12 R = cfg.qp.r * Mat12::Identity();

  CentroidalState x;
  if (x0) {
    x = *x0;
  } else {
    x.c = Vec3(0.0, 0.0, cfg.cost.height);
  }

  std::mt19937_64 rng(sim.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto observe = [&](const CentroidalState& s) {
    if (sim.params.obs_noise_std <= 0.0) return s;
    Vec12 v = s.to_vector();
    for (int i = 0; i < kStateDim; ++i) v[i] += sim.params.obs_noise_std * noise(rng);
    return CentroidalState::from_vector(v);
  };

  GaitPlanner planner(cfg.gait(sim.gait), dt);
  std::vector<bool> impulse_done(sim.impulses.size(), false);

  RunLog log;
  log.dt = dt;
  log.has_timing = sim.record_timing;
  log.rows.reserve(ticks);
  ReducedExpansion pred;
  int age = 0;
  for (long k = 0; k < ticks; ++k) {
    const double t = k * dt;
    const Vec3 v_cmd = sim.v_cmd_at(t);
    const CentroidalState obs = observe(x);
    if (k == 0) {
      planner.reset(obs.c, obs.c_dot, v_cmd);
    } else {
      planner.advance(obs.c, v_cmd);
    }

    if (k % divisor == 0) {
      PredictionInput in;
      in.x = obs;
      in.contacts = planner.contacts();
      in.points = planner.points();
      in.contact_times = planner.contact_times();
      in.v_cmd = v_cmd;
      in.time = t;
      pred = predictor.predict(in);
      age = 0;
    } else {
      ++age;
    }

    RunRow row;
    row.t = t;
    row.x = x.to_vector();
    row.contacts = planner.contacts();
    row.v_cmd = v_cmd;
    row.prediction_age = age;

    QpSolution sol;
    ContactForces f;
    try {
      const auto q0 = std::chrono::steady_clock::now();
      f = control_step(obs, row.contacts, planner.points(), pred, cfg.model,
                       limits, R, &sol);
      if (sim.record_timing)
        row.qp_us = std::chrono::duration<double, std::micro>(
                        std::chrono::steady_clock::now() - q0)
                        .count();
    } catch (const Error& e) {
      log.rows.push_back(row);
      log.fallen = true;
      log.fall_time = t;
      log.fall_reason = std::string("controller: ") + e.what();
      return log;
    }
    row.F = f.stacked();
    row.qp_status = sol.status;
    row.qp_iterations = sol.iterations;
    log.rows.push_back(row);

    x = step(x, f, planner.points(), plant);
    for (std::size_t i = 0; i < sim.impulses.size(); ++i) {
      if (!impulse_done[i] && t + dt > sim.impulses[i].time - 1e-12) {
        x.set_velocity(x.velocity() + sim.impulses[i].dv);
        impulse_done[i] = true;
      }
    }
    if (const char* why = fall_check(x, sim.params)) {
      log.fallen = true;
      log.fall_time = t + dt;
      log.fall_reason = why;
      return log;
    }
  }
  return log;
}

void write_runlog_csv(const RunLog& log, std::ostream& os) {
  os << kRunLogSchema << " dt=" << std::setprecision(17) << log.dt
     << " fallen=" << (log.fallen ? 1 : 0) << "\n";
  os << "t,cx,cy,cz,roll,pitch,yaw,vx,vy,vz,wx,wy,wz";
  for (int i = 0; i < kNumLegs; ++i) os << ",F" << i << "x,F" << i << "y,F" << i << "z";
  for (int i = 0; i < kNumLegs; ++i) os << ",contact" << i;
  os << ",vcmd_x,vcmd_y,vcmd_z,qp_status,qp_iter,qp_us,pred_age\n";
  for (const auto& r : log.rows) {
    os << r.t;
    for (int i = 0; i < kStateDim; ++i) os << "," << r.x[i];
    for (int i = 0; i < kControlDim; ++i) os << "," << r.F[i];
    for (int i = 0; i < kNumLegs; ++i) os << "," << (r.contacts[i] ? 1 : 0);
    os << "," << r.v_cmd.x() << "," << r.v_cmd.y() << "," << r.v_cmd.z() << ","
       << to_string(r.qp_status) << "," << r.qp_iterations << ",";
    if (log.has_timing) os << r.qp_us;
    os << "," << r.prediction_age << "\n";
  }
}

TrackingMetrics evaluate(const RunLog& log, const SimParams& params,
                         const QpConfig& qp) {
  TrackingMetrics m;
  m.min_fz = std::numeric_limits<double>::infinity();
  m.max_fz = -std::numeric_limits<double>::infinity();
  double last_change = 0.0;
  Vec3 prev_cmd = log.rows.empty() ? Vec3::Zero() : log.rows.front().v_cmd;
  double sum_xy = 0.0, sum_x = 0.0, sum_abs = 0.0;
  for (const auto& r : log.rows) {
    if (r.v_cmd != prev_cmd) {
      last_change = r.t;
      prev_cmd = r.v_cmd;
    }
    for (int i = 0; i < kNumLegs; ++i) {
      if (!r.contacts[i]) continue;
      const Vec3 F = r.F.segment<3>(3 * i);
      m.min_fz = std::min(m.min_fz, F.z());
      m.max_fz = std::max(m.max_fz, F.z());
      const double viol = std::max({std::abs(F.x()) - qp.mu * F.z(),
                                    std::abs(F.y()) - qp.mu * F.z(), -F.z(),
                                    F.z() - qp.f_z_max, 0.0});
      m.constraint_violation = std::max(m.constraint_violation, viol);
    }
    if (r.t + 1e-12 < last_change + params.settle_time) continue;
    const Eigen::Vector2d err(r.x[idx::kComVel] - r.v_cmd.x(),
                              r.x[idx::kComVel + 1] - r.v_cmd.y());
    sum_xy += err.norm();
    sum_x += std::abs(err.x());
    sum_abs += std::abs(r.x[idx::kComVel]);
    ++m.steady_ticks;
  }
  if (m.steady_ticks > 0) {
    m.mean_error_xy = sum_xy / m.steady_ticks;
    m.mean_error_x = sum_x / m.steady_ticks;
    m.mean_abs_vx = sum_abs / m.steady_ticks;
  }
  if (!std::isfinite(m.min_fz)) m.min_fz = m.max_fz = 0.0;
  return m;
}

SimConfig constant_command(const Config& cfg, GaitKind gait, const Vec3& v_cmd) {
  SimConfig sim;
  sim.gait = gait;
  sim.params = cfg.sim;
  sim.segments = {VcmdSegment{0.0, v_cmd}};
  return sim;
}

namespace {

struct Job {
  ExperimentRow row;
  SimConfig sim;
  const ValueNet* net = nullptr;
};

ExperimentResult run_jobs(const std::string& name, const Config& cfg,
                          std::vector<Job> jobs, int workers) {
  ExperimentResult res;
  res.name = name;
  res.rows.resize(jobs.size());
  res.logs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        NetPredictor pred(*jobs[i].net);
        RunLog log = run(cfg, pred, jobs[i].sim);
        ExperimentRow row = jobs[i].row;
        row.fallen = log.fallen;
        row.fall_time = log.fall_time;
        row.ticks = log.ticks();
        row.metrics = evaluate(log, jobs[i].sim.params, cfg.qp);
        res.rows[i] = row;
        res.logs[i] = std::move(log);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(jobs.size());
        return;
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return res;
}

void require_models(const std::vector<ExperimentModel>& models) {
  if (models.empty())
    throw Error(ErrorCode::kInvalidArgument, "experiment: no model given");
  for (const auto& m : models)
    if (!m.net) throw Error(ErrorCode::kInvalidArgument, "experiment: null model");
}

std::string fmt_label(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

ExperimentResult experiment_velocity_tracking(
    const Config& cfg, const std::vector<ExperimentModel>& models,
    const ExperimentOptions& opt) {
  require_models(models);
  std::vector<Job> jobs;
  for (const auto& m : models) {
    for (double v : opt.velocities) {
      Job j;
      j.net = m.net;
      j.sim = constant_command(cfg, m.gait, Vec3(v, 0.0, 0.0));
      j.sim.seed = opt.seed;
      j.row.gait = m.gait;
      j.row.v_cmd_x = v;
      j.row.prediction_rate = j.sim.params.prediction_rate;
      j.row.label = to_string(m.gait) + "_v" + fmt_label(v);
      jobs.push_back(std::move(j));
    }
  }
  return run_jobs("velocity-tracking", cfg, std::move(jobs), opt.workers);
}

ExperimentResult experiment_frequency_sweep(
    const Config& cfg, const std::vector<ExperimentModel>& models,
    const ExperimentOptions& opt) {
  require_models(models);
  std::vector<double> rates = opt.rates;
  std::sort(rates.begin(), rates.end(), std::greater<double>());
  std::vector<Job> jobs;
  for (const auto& m : models) {
    for (double rate : rates) {
      Job j;
      j.net = m.net;
      j.sim = constant_command(cfg, m.gait, Vec3(opt.sweep_velocity, 0.0, 0.0));
      j.sim.params.prediction_rate = rate;
      j.sim.seed = opt.seed;
      j.row.gait = m.gait;
      j.row.v_cmd_x = opt.sweep_velocity;
      j.row.prediction_rate = rate;
      j.row.label = to_string(m.gait) + "_rate" + fmt_label(rate);
      jobs.push_back(std::move(j));
    }
  }
  return run_jobs("frequency-sweep", cfg, std::move(jobs), opt.workers);
}

ExperimentResult experiment_constraint_ablation(
    const Config& cfg, const std::vector<ExperimentModel>& models,
    const ExperimentOptions& opt) {
  require_models(models);
  std::vector<Job> jobs;
  for (const auto& m : models) {
    for (bool constrained : {true, false}) {
      Job j;
      j.net = m.net;
      j.sim = constant_command(cfg, m.gait, Vec3(opt.sweep_velocity, 0.0, 0.0));
      j.sim.ablation = !constrained;
      j.sim.seed = opt.seed;
      j.row.gait = m.gait;
      j.row.v_cmd_x = opt.sweep_velocity;
      j.row.prediction_rate = j.sim.params.prediction_rate;
      j.row.constrained = constrained;
      j.row.label = to_string(m.gait) + (constrained ? "_constrained" : "_unconstrained");
      jobs.push_back(std::move(j));
    }
  }
  return run_jobs("constraint-ablation", cfg, std::move(jobs), opt.workers);
}

ExperimentResult run_experiment(const std::string& name, const Config& cfg,
                                const std::vector<ExperimentModel>& models,
                                const ExperimentOptions& opt) {
  if (name == "velocity-tracking") return experiment_velocity_tracking(cfg, models, opt);
  if (name == "frequency-sweep") return experiment_frequency_sweep(cfg, models, opt);
  if (name == "constraint-ablation")
    return experiment_constraint_ablation(cfg, models, opt);
  throw Error(ErrorCode::kInvalidArgument, "unknown experiment '" + name + "'");
}

void ExperimentResult::write_summary_csv(std::ostream& os) const {
  os << "# vfqp-summary v1 experiment=" << name << "\n"
     << "label,gait,vcmd_x,prediction_rate,constrained,fallen,fall_time,ticks,"
        "steady_ticks,mean_error_xy,mean_error_x,mean_abs_vx,min_fz,max_fz,"
        "constraint_violation\n"
     << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.label << "," << to_string(r.gait) << "," << r.v_cmd_x << ","
       << r.prediction_rate << "," << (r.constrained ? 1 : 0) << ","
       << (r.fallen ? 1 : 0) << "," << r.fall_time << "," << r.ticks << ","
       << r.metrics.steady_ticks << "," << r.metrics.mean_error_xy << ","
       << r.metrics.mean_error_x << "," << r.metrics.mean_abs_vx << ","
       << r.metrics.min_fz << "," << r.metrics.max_fz << ","
       << r.metrics.constraint_violation << "\n";
  }
}

void write_experiment(const ExperimentResult& res, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory " + out_dir);
  auto open = [](const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + p.string());
    return f;
  };
  {
    std::ofstream f = open(fs::path(out_dir) / (res.name + "_summary.csv"));
    res.write_summary_csv(f);
  }
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    std::ofstream f = open(fs::path(out_dir) / (res.name + "_" + res.rows[i].label + ".csv"));
    write_runlog_csv(res.logs[i], f);
  }
}

}  // namespace vfqp
