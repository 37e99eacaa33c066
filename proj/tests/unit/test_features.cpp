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

#include <random>

#include <gtest/gtest.h>

#include "support/qp_oracle.hpp"
#include "vfqp/features.hpp"
#include "vfqp/qp.hpp"

using namespace vfqp;

namespace {

Mat12 random_spd12(std::mt19937_64& gen) {
  std::normal_distribution<double> N;
  Mat12 M;
  for (int i = 0; i < 144; ++i) M.data()[i] = N(gen);
  return 100.0 * (M * M.transpose() / 12.0 + 0.1 * Mat12::Identity());
}

Vec12 random12(std::mt19937_64& gen, double s) {
  std::normal_distribution<double> N;
  Vec12 v;
  for (int i = 0; i < 12; ++i) v(i) = s * N(gen);
  return v;
}

}  // namespace

TEST(Features, Layout) {
  CentroidalState x;
  x.c = Vec3(1, 2, 0.2);
  x.alpha = Vec3(0.1, 0.2, 0.3);
  x.c_dot = Vec3(4, 5, 6);
  x.omega = Vec3(7, 8, 9);
  const LegPoints pts{Vec3(1.5, 2, 0), Vec3(1, 2.5, 0), Vec3(0.5, 2, 0), Vec3(1, 1.5, 0)};
  const FeatureVector f =
      featurize(x, {true, false, false, true}, pts, {0.1, 0.2, 0.3, 0.4}, Vec3(0.3, 0, 0));
  EXPECT_EQ(f.size(), 33);
  EXPECT_DOUBLE_EQ(f[0], 0.2);
  EXPECT_DOUBLE_EQ(f[3], 0.3);
  EXPECT_DOUBLE_EQ(f[4], 4);
  EXPECT_DOUBLE_EQ(f[9], 9);
  EXPECT_DOUBLE_EQ(f[10], 0.5);
  EXPECT_DOUBLE_EQ(f[12], -0.2);
  EXPECT_DOUBLE_EQ(f[14], 0.5);
  EXPECT_DOUBLE_EQ(f[22], 1.0);
  EXPECT_DOUBLE_EQ(f[23], 0.0);
  EXPECT_DOUBLE_EQ(f[25], 1.0);
  EXPECT_DOUBLE_EQ(f[26], 0.3);
  EXPECT_DOUBLE_EQ(f[29], 0.1);
  EXPECT_DOUBLE_EQ(f[32], 0.4);
}

TEST(Features, TargetRoundTrip) {
  std::mt19937_64 gen(1);
  ReducedExpansion e;
  e.g = random12(gen, 1).head<6>();
  e.H = random_spd12(gen).topLeftCorner<6, 6>();
  const TargetVector t = e.to_target();
  EXPECT_DOUBLE_EQ(t[6 + 6 * 1 + 2], e.H(1, 2));
  const ReducedExpansion back = ReducedExpansion::from_target(t);
  EXPECT_EQ(back.g, e.g);
  EXPECT_EQ(back.H, e.H);
}

// The quadratic model of the value at x_{t+1} = (s_next, v) differs from the
// reduced objective g'v + 1/2 v'Hv by a constant.
TEST(Features, ReductionDiffersByConstant) {
  std::mt19937_64 gen(2);
  for (int n = 0; n < 50; ++n) {
    const Mat12 V_xx = random_spd12(gen);
    const Vec12 V_x = random12(gen, 10), x_hat = random12(gen, 0.5);
    const Vec6 s_next = random12(gen, 0.5).head<6>();
    const ReducedExpansion e = reduce_expansion(V_x, V_xx, x_hat, s_next);
    auto full = [&](const Vec6& v) {
      Vec12 x;
      x << s_next, v;
      const Vec12 d = x - x_hat;
      return V_x.dot(d) + 0.5 * d.dot(V_xx * d);
    };
    auto reduced = [&](const Vec6& v) { return e.g.dot(v) + 0.5 * v.dot(e.H * v); };
    const Vec6 v0 = Vec6::Zero();
    const double k = full(v0) - reduced(v0);
    for (int j = 0; j < 5; ++j) {
      const Vec6 v = random12(gen, 1).head<6>();
      EXPECT_NEAR(full(v) - reduced(v), k, 1e-9 * (1 + std::abs(k)));
    }
  }
}

// Argmin of the full-state objective, solved without the reduction, equals
// the reduced QP argmin.
TEST(Features, ReducedArgminMatchesFullForm) {
  std::mt19937_64 gen(3);
  ModelParams p;
  for (int n = 0; n < 100; ++n) {
    const Mat12 V_xx = random_spd12(gen);
    const Vec12 V_x = random12(gen, 10), x_hat = random12(gen, 0.5);
    CentroidalState x = CentroidalState::from_vector(random12(gen, 0.2));
    x.c.z() = 0.2;
    const LegPoints pts{Vec3(0.2, 0.15, 0), Vec3(0.2, -0.15, 0), Vec3(-0.2, 0.15, 0),
                        Vec3(-0.2, -0.15, 0)};
    const LegFlags act{true, true, true, true};
    const Vec6 s_next = x.position() + p.dt * x.velocity();
    const ReducedExpansion e = reduce_expansion(V_x, V_xx, x_hat, s_next);
    const Mat12 R = 1e-2 * Mat12::Identity();
    const QpProblem prob = build_problem(x, act, pts, e, p, ForceLimits{0.6, 30, false}, R);
    const Vec12 F = solve_qp(prob).F;

    // Full form in the 12-state: x_next = x0 + Btil F.
    const VelocityLinearization lin = linearize_velocity(x, act, pts, p);
    Vec12 x0;
    x0 << s_next, x.velocity() + lin.B_0;
    Mat12 Btil = Mat12::Zero();
    Btil.bottomRows<6>() = lin.B_F;
    const Mat12 Q = Btil.transpose() * V_xx * Btil + R;
    const Vec12 c = Btil.transpose() * (V_x + V_xx * (x0 - x_hat));
    const Vec12 F_full = Q.ldlt().solve(-c);
    EXPECT_LT((F - F_full).cwiseAbs().maxCoeff(), 1e-8 * (1 + F_full.cwiseAbs().maxCoeff())) << n;
  }
}
