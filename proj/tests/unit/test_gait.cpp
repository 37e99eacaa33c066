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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "vfqp/gait.hpp"

using namespace vfqp;

constexpr double kDt = 0.004;

TEST(Gait, TrotPairsDiagonalLegs) {
  const GaitClock clock(GaitConfig::trot(), kDt);
  EXPECT_EQ(clock.cycle_ticks(), 80);
  for (long t = 0; t < 400; ++t) {
    const LegFlags c = clock.contacts(t);
    EXPECT_EQ(c[kFL], c[kHR]) << t;
    EXPECT_EQ(c[kFR], c[kHL]) << t;
    EXPECT_NE(c[kFL], c[kFR]) << t;
  }
}

TEST(Gait, BoundPairsFrontAndHind) {
  const GaitClock clock(GaitConfig::bound(), kDt);
  int flight = 0;
  for (long t = 0; t < clock.cycle_ticks(); ++t) {
    const LegFlags c = clock.contacts(t);
    EXPECT_EQ(c[kFL], c[kFR]);
    EXPECT_EQ(c[kHL], c[kHR]);
    if (!c[kFL] && !c[kHL]) ++flight;
  }
  EXPECT_GT(flight, 0);
}

TEST(Gait, StandAlwaysInContact) {
  const GaitClock clock(GaitConfig::stand(), kDt);
  for (long t = 0; t < 100; ++t)
    for (int i = 0; i < kNumLegs; ++i) EXPECT_TRUE(clock.in_contact(i, t));
}

TEST(Gait, StanceLastsConfiguredTicks) {
  const GaitConfig cfg = GaitConfig::trot();
  const GaitClock clock(cfg, kDt);
  int run = 0, longest = 0;
  for (long t = 0; t < 400; ++t) {
    run = clock.in_contact(kFL, t) ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  EXPECT_EQ(longest, std::lround(cfg.t_stance / kDt));
}

TEST(Gait, ContactTimeCountsDown) {
  const GaitClock clock(GaitConfig::trot(), kDt);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (long t = 0; t < 200; ++t) {
      const double tc = clock.contact_time(leg, t);
      EXPECT_GT(tc, 0.0);
      EXPECT_LE(tc, 0.16 + 1e-12);
      if (clock.in_contact(leg, t) == clock.in_contact(leg, t + 1))
        EXPECT_NEAR(clock.contact_time(leg, t + 1), tc - kDt, 1e-12);
      else
        EXPECT_NEAR(tc, kDt, 1e-12);
    }
  }
}

TEST(Gait, NegativeTicksWrap) {
  const GaitClock clock(GaitConfig::trot(), kDt);
  for (int i = 0; i < kNumLegs; ++i)
    EXPECT_EQ(clock.in_contact(i, -1), clock.in_contact(i, clock.cycle_ticks() - 1));
}

TEST(Gait, TouchdownFormula) {
  GaitConfig cfg = GaitConfig::trot();
  const Vec3 c(1.0, 2.0, 0.2), c_dot(0.3, -0.1, 0.05), v_cmd(0.5, 0.0, 0.0);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Vec3 r = touchdown_location(c, c_dot, v_cmd, cfg, leg);
    EXPECT_DOUBLE_EQ(r.z(), 0.0);
    EXPECT_NEAR(r.x(), 1.0 + cfg.shoulder[leg].x() + 0.08 * 0.3 + 0.03 * 0.2, 1e-15);
    EXPECT_NEAR(r.y(), 2.0 + cfg.shoulder[leg].y() - 0.08 * 0.1 + 0.03 * 0.1, 1e-15);
  }
}

TEST(Gait, VelocityFilterConverges) {
  Vec3 v = Vec3::Zero();
  const Vec3 cmd(0.4, -0.2, 0.0);
  for (int k = 0; k < 1000; ++k) v = plan_velocity_update(v, cmd, 0.02);
  EXPECT_LT((v - cmd).norm(), 1e-8);
  EXPECT_LT((plan_velocity_update(cmd, cmd, 0.3) - cmd).norm(), 1e-15);
}

TEST(Gait, FilterRescalesWithTickLength) {
  const GaitConfig cfg = GaitConfig::trot();
  GaitPlanner coarse(cfg, 0.004), fine(cfg, 0.002);
  const Vec3 cmd(0.3, 0, 0);
  coarse.reset(Vec3(0, 0, 0.2), Vec3::Zero(), cmd);
  fine.reset(Vec3(0, 0, 0.2), Vec3::Zero(), cmd);
  for (int k = 0; k < 50; ++k) {
    coarse.advance(Vec3(0, 0, 0.2), cmd);
    fine.advance(Vec3(0, 0, 0.2), cmd);
    fine.advance(Vec3(0, 0, 0.2), cmd);
    EXPECT_NEAR(coarse.planned_velocity().x(), fine.planned_velocity().x(), 1e-12);
  }
  EXPECT_NEAR(coarse.tick_alpha(), cfg.v_alpha, 1e-15);
}

TEST(Gait, StancePointsFixedDuringStance) {
  CentroidalState x0;
  x0.c = Vec3(0, 0, 0.2);
  const GaitSchedule s = build_schedule(x0, Vec3(0.3, 0, 0), GaitConfig::trot(), 0.96, kDt);
  ASSERT_EQ(s.size(), 240);
  for (int k = 1; k < s.size(); ++k) {
    for (int i = 0; i < kNumLegs; ++i) {
      if (s.contacts[k][i] && s.contacts[k - 1][i]) {
        EXPECT_EQ(s.points[k][i], s.points[k - 1][i]);
      }
      EXPECT_DOUBLE_EQ(s.points[k][i].z(), 0.0);
    }
  }
  // Feet move forward at the commanded speed on average.
  EXPECT_GT(s.points.back()[kFL].x(), s.points.front()[kFL].x() + 0.1);
}

TEST(Gait, ScheduleStartTickAndStancePoints) {
  CentroidalState x0;
  x0.c = Vec3(0, 0, 0.2);
  const LegPoints held{Vec3(1, 1, 0), Vec3(2, 2, 0), Vec3(3, 3, 0), Vec3(4, 4, 0)};
  const GaitConfig cfg = GaitConfig::trot();
  const GaitSchedule s = build_schedule(x0, Vec3::Zero(), cfg, 0.2, kDt, 50, &held);
  const GaitClock clock(cfg, kDt);
  for (int k = 0; k < s.size(); ++k) EXPECT_EQ(s.contacts[k], clock.contacts(50 + k));
  for (int i = 0; i < kNumLegs; ++i)
    if (s.contacts[0][i]) {
      EXPECT_EQ(s.points[0][i], held[i]);
    }
}

TEST(Gait, SchedulesAreDeterministicAndSliceable) {
  CentroidalState x0;
  x0.c = Vec3(0, 0, 0.2);
  x0.c_dot = Vec3(0.1, 0, 0);
  const GaitSchedule a = build_schedule(x0, Vec3(0.2, 0, 0), GaitConfig::bound(), 0.6, kDt);
  const GaitSchedule b = build_schedule(x0, Vec3(0.2, 0, 0), GaitConfig::bound(), 0.6, kDt);
  std::ostringstream sa, sb;
  a.write_csv(sa);
  b.write_csv(sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().rfind("# vfqp-schedule v1\n", 0), 0u);
  const GaitSchedule sl = a.slice(10, 20);
  EXPECT_EQ(sl.size(), 20);
  EXPECT_EQ(sl.points[0], a.points[10]);
  EXPECT_THROW(a.slice(140, 20), Error);
}

TEST(Gait, RejectsBadDurationAndConfig) {
  CentroidalState x0;
  EXPECT_THROW(build_schedule(x0, Vec3::Zero(), GaitConfig::trot(), 0.0101, kDt), Error);
  GaitConfig cfg = GaitConfig::trot();
  cfg.v_alpha = 1.5;
  EXPECT_THROW(GaitPlanner(cfg, kDt), Error);
  EXPECT_THROW(parse_gait_kind("gallop"), Error);
  EXPECT_EQ(parse_gait_kind(to_string(GaitKind::kBound)), GaitKind::kBound);
}
