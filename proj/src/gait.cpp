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

#include "vfqp/gait.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace vfqp {

GaitKind parse_gait_kind(const std::string& name) {
  if (name == "trot") return GaitKind::kTrot;
  if (name == "bound") return GaitKind::kBound;
  if (name == "stand") return GaitKind::kStand;
  throw Error(ErrorCode::kInvalidArgument, "unknown gait '" + name + "'");
}

std::string to_string(GaitKind kind) {
  switch (kind) {
    case GaitKind::kTrot: return "trot";
    case GaitKind::kBound: return "bound";
    case GaitKind::kStand: return "stand";
  }
  return "unknown";
}

void GaitConfig::validate() const {
  if (!(t_stance > 0.0) || !(t_swing > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "gait: stance/swing must be > 0");
  if (!(k_raibert >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "gait: k_raibert must be >= 0");
  if (!(v_alpha > 0.0 && v_alpha < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "gait: v_alpha must be in (0,1)");
  if (!(filter_dt > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "gait: filter_dt must be > 0");
}

GaitConfig GaitConfig::trot() {
  GaitConfig cfg;
  cfg.kind = GaitKind::kTrot;
  cfg.t_stance = 0.16;
  cfg.t_swing = 0.16;
  cfg.phase_offset = {0.0, 0.5, 0.5, 0.0};
  return cfg;
}

GaitConfig GaitConfig::bound() {
  GaitConfig cfg;
  cfg.kind = GaitKind::kBound;
  cfg.t_stance = 0.12;
  cfg.t_swing = 0.18;
  cfg.phase_offset = {0.0, 0.0, 0.5, 0.5};
  return cfg;
}

GaitConfig GaitConfig::stand() {
  GaitConfig cfg;
  cfg.kind = GaitKind::kStand;
  cfg.phase_offset = {0.0, 0.0, 0.0, 0.0};
  return cfg;
}

GaitConfig GaitConfig::for_kind(GaitKind kind) {
  switch (kind) {
    case GaitKind::kTrot: return trot();
    case GaitKind::kBound: return bound();
    case GaitKind::kStand: return stand();
  }
  return trot();
}

Vec3 plan_velocity_update(const Vec3& c_dot_plan, const Vec3& v_cmd,
                          double v_alpha) {
  return (1.0 - v_alpha) * c_dot_plan + v_alpha * v_cmd;
}

Vec3 touchdown_location(const Vec3& c, const Vec3& c_dot, const Vec3& v_cmd,
                        const GaitConfig& cfg, int leg) {
  Vec3 r = c + cfg.shoulder[leg] + 0.5 * cfg.t_stance * c_dot +
           cfg.k_raibert * (v_cmd - c_dot);
  r.z() = 0.0;
  return r;
}

GaitClock::GaitClock(const GaitConfig& cfg, double dt)
    : kind_(cfg.kind), dt_(dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gait: dt <= 0");
  cycle_ticks_ = std::max(1L, std::lround(cfg.cycle() / dt));
  stance_ticks_ = std::lround(cfg.t_stance / dt);
  for (int i = 0; i < kNumLegs; ++i)
    offset_ticks_[i] = std::lround(cfg.phase_offset[i] * cycle_ticks_);
}

long GaitClock::phase(int leg, long tick) const {
  long p = (tick - offset_ticks_[leg]) % cycle_ticks_;
  return p < 0 ? p + cycle_ticks_ : p;
}

bool GaitClock::in_contact(int leg, long tick) const {
  if (kind_ == GaitKind::kStand) return true;
  return phase(leg, tick) < stance_ticks_;
}

double GaitClock::contact_time(int leg, long tick) const {
  if (kind_ == GaitKind::kStand) return cycle_ticks_ * dt_;
  const long p = phase(leg, tick);
  const long remaining = p < stance_ticks_ ? stance_ticks_ - p : cycle_ticks_ - p;
  return remaining * dt_;
}

LegFlags GaitClock::contacts(long tick) const {
  LegFlags f{};
  for (int i = 0; i < kNumLegs; ++i) f[i] = in_contact(i, tick);
  return f;
}

GaitPlanner::GaitPlanner(const GaitConfig& cfg, double dt)
    : cfg_(cfg),
      clock_(cfg, dt),
      alpha_(1.0 - std::pow(1.0 - cfg.v_alpha, dt / cfg.filter_dt)) {
  cfg_.validate();
}

void GaitPlanner::reset(const Vec3& c, const Vec3& c_dot, const Vec3& v_cmd) {
  reset(c, c_dot, v_cmd, 0, nullptr);
}

void GaitPlanner::reset(const Vec3& c, const Vec3& c_dot, const Vec3& v_cmd,
                        long start_tick, const LegPoints* stance_points) {
  tick_ = start_tick;
  c_dot_plan_ = c_dot;
  for (int i = 0; i < kNumLegs; ++i) {
    if (clock_.in_contact(i, tick_)) {
      points_[i] = stance_points
                       ? (*stance_points)[i]
                       : touchdown_location(c, c_dot_plan_, v_cmd, cfg_, i);
      continue;
    }
    // Predict the upcoming touchdown along the planned velocity.
    Vec3 c_plan = c;
    Vec3 v_plan = c_dot_plan_;
    long t = tick_;
    while (!clock_.in_contact(i, t)) {
      ++t;
      v_plan = plan_velocity_update(v_plan, v_cmd, alpha_);
      c_plan += clock_.dt() * v_plan;
    }
    points_[i] = touchdown_location(c_plan, v_plan, v_cmd, cfg_, i);
  }
}

void GaitPlanner::advance(const Vec3& c, const Vec3& v_cmd) {
  const LegFlags before = contacts();
  ++tick_;
  c_dot_plan_ = plan_velocity_update(c_dot_plan_, v_cmd, alpha_);
  const LegFlags now = contacts();
  for (int i = 0; i < kNumLegs; ++i) {
    if (now[i] && !before[i])
      points_[i] = touchdown_location(c, c_dot_plan_, v_cmd, cfg_, i);
  }
}

std::array<double, kNumLegs> GaitPlanner::contact_times() const {
  std::array<double, kNumLegs> t{};
  for (int i = 0; i < kNumLegs; ++i) t[i] = clock_.contact_time(i, tick_);
  return t;
}

GaitSchedule GaitSchedule::slice(int begin, int count) const {
  if (begin < 0 || count < 0 || begin + count > size())
    throw Error(ErrorCode::kInvalidArgument, "schedule slice out of range");
  GaitSchedule s;
  s.dt = dt;
  s.v_cmd = v_cmd;
  s.contacts.assign(contacts.begin() + begin, contacts.begin() + begin + count);
  s.points.assign(points.begin() + begin, points.begin() + begin + count);
  s.contact_times.assign(contact_times.begin() + begin,
                         contact_times.begin() + begin + count);
  return s;
}

void GaitSchedule::write_csv(std::ostream& os) const {
  os << "# vfqp-schedule v1\n";
  os << "step";
  for (int i = 0; i < kNumLegs; ++i) os << ",contact" << i;
  for (int i = 0; i < kNumLegs; ++i) os << ",r" << i << "x,r" << i << "y,r" << i << "z";
  for (int i = 0; i < kNumLegs; ++i) os << ",tc" << i;
  os << "\n" << std::setprecision(17);
  for (int k = 0; k < size(); ++k) {
    os << k;
    for (int i = 0; i < kNumLegs; ++i) os << "," << (contacts[k][i] ? 1 : 0);
    for (int i = 0; i < kNumLegs; ++i)
      os << "," << points[k][i].x() << "," << points[k][i].y() << ","
         << points[k][i].z();
    for (int i = 0; i < kNumLegs; ++i) os << "," << contact_times[k][i];
    os << "\n";
  }
}

GaitSchedule build_schedule(const CentroidalState& x0, const Vec3& v_cmd,
                            const GaitConfig& cfg, double duration, double dt,
                            long start_tick, const LegPoints* stance_points) {
  const double ratio = duration / dt;
  const long n = std::lround(ratio);
  if (!(duration > 0.0) || std::abs(ratio - n) > 1e-6)
    throw Error(ErrorCode::kInvalidArgument,
                "build_schedule: duration must be a positive multiple of dt");

  GaitPlanner planner(cfg, dt);
  planner.reset(x0.c, x0.c_dot, v_cmd, start_tick, stance_points);
  Vec3 c_plan = x0.c;

  GaitSchedule s;
  s.dt = dt;
  s.v_cmd = v_cmd;
  s.contacts.reserve(n);
  s.points.reserve(n);
  s.contact_times.reserve(n);
  for (long k = 0; k < n; ++k) {
    if (k > 0) {
      // Planned position follows the filtered velocity of the new tick.
      const Vec3 v_next =
          plan_velocity_update(planner.planned_velocity(), v_cmd,
                               planner.tick_alpha());
      c_plan += dt * v_next;
      planner.advance(c_plan, v_cmd);
    }
    s.contacts.push_back(planner.contacts());
    s.points.push_back(planner.points());
    s.contact_times.push_back(planner.contact_times());
  }
  return s;
}

}  // namespace vfqp
