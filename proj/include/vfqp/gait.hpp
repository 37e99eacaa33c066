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

#include <iosfwd>
#include <string>
#include <vector>

#include "vfqp/centroidal.hpp"
#include "vfqp/types.hpp"

namespace vfqp {

enum class GaitKind { kTrot, kBound, kStand };

GaitKind parse_gait_kind(const std::string& name);
std::string to_string(GaitKind kind);

struct GaitConfig {
  GaitKind kind = GaitKind::kTrot;
  double t_stance = 0.16;
  double t_swing = 0.16;
  // Fraction of the cycle by which each leg's stance start is delayed.
  std::array<double, kNumLegs> phase_offset{0.0, 0.5, 0.5, 0.0};
  LegPoints shoulder{Vec3(0.195, 0.147, -0.21), Vec3(0.195, -0.147, -0.21),
                     Vec3(-0.195, 0.147, -0.21), Vec3(-0.195, -0.147, -0.21)};
  double k_raibert = 0.03;
  double v_alpha = 0.02;
  // Tick length v_alpha is defined for; other tick lengths get an
  // equivalent per-tick coefficient.
  double filter_dt = 0.004;

  double cycle() const { return t_stance + t_swing; }
  void validate() const;

  static GaitConfig trot();
  static GaitConfig bound();
  static GaitConfig stand();
  static GaitConfig for_kind(GaitKind kind);
};

// (1 - v_alpha) * c_dot_plan + v_alpha * v_cmd
Vec3 plan_velocity_update(const Vec3& c_dot_plan, const Vec3& v_cmd,
                          double v_alpha);

// Raibert-style touchdown, projected onto the ground plane z = 0.
Vec3 touchdown_location(const Vec3& c, const Vec3& c_dot, const Vec3& v_cmd,
                        const GaitConfig& cfg, int leg);

// Contact pattern as a function of the integer tick.
class GaitClock {
 public:
  GaitClock(const GaitConfig& cfg, double dt);

  bool in_contact(int leg, long tick) const;
  // Time until the contact state of `leg` changes, measured from `tick`.
  double contact_time(int leg, long tick) const;
  LegFlags contacts(long tick) const;
  double dt() const { return dt_; }
  long cycle_ticks() const { return cycle_ticks_; }

 private:
  long phase(int leg, long tick) const;

  GaitKind kind_;
  double dt_;
  long cycle_ticks_;
  long stance_ticks_;
  std::array<long, kNumLegs> offset_ticks_{};
};

// Online foot-placement state: contact clock, planned-velocity filter and the
// current contact point of every leg. Stance legs keep their touchdown point;
// swing legs carry their last touchdown (or the predicted upcoming one if they
// have not touched down yet).
class GaitPlanner {
 public:
  GaitPlanner(const GaitConfig& cfg, double dt);

  void reset(const Vec3& c, const Vec3& c_dot, const Vec3& v_cmd);
  // Starts at `start_tick`; legs in stance there keep stance_points[i] when
  // given.
  void reset(const Vec3& c, const Vec3& c_dot, const Vec3& v_cmd,
             long start_tick, const LegPoints* stance_points);
  // Advance one tick. `c` is the CoM position used for new touchdowns.
  void advance(const Vec3& c, const Vec3& v_cmd);

  long tick() const { return tick_; }
  LegFlags contacts() const { return clock_.contacts(tick_); }
  const LegPoints& points() const { return points_; }
  std::array<double, kNumLegs> contact_times() const;
  const Vec3& planned_velocity() const { return c_dot_plan_; }
  const GaitConfig& config() const { return cfg_; }

  // Per-tick filter coefficient equivalent to cfg.v_alpha at cfg.filter_dt.
  double tick_alpha() const { return alpha_; }

 private:
  GaitConfig cfg_;
  GaitClock clock_;
  double alpha_;
  long tick_ = 0;
  Vec3 c_dot_plan_ = Vec3::Zero();
  LegPoints points_{};
};

struct GaitSchedule {
  double dt = 0.0;
  Vec3 v_cmd = Vec3::Zero();
  std::vector<LegFlags> contacts;
  std::vector<LegPoints> points;
  std::vector<std::array<double, kNumLegs>> contact_times;

  int size() const { return static_cast<int>(contacts.size()); }
  GaitSchedule slice(int begin, int count) const;
  void write_csv(std::ostream& os) const;
};

// Plans along the filtered velocity (planned CoM position integrates the
// planned velocity). duration must be a multiple of dt.
GaitSchedule build_schedule(const CentroidalState& x0, const Vec3& v_cmd,
                            const GaitConfig& cfg, double duration, double dt,
                            long start_tick = 0,
                            const LegPoints* stance_points = nullptr);

}  // namespace vfqp
