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
#include <random>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <gtest/gtest.h>

#include "vfqp/centroidal.hpp"

using namespace vfqp;

namespace {

const LegPoints kZeroPoints{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

struct Rng {
  std::mt19937_64 gen{7};
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  Vec3 vec(double a) { return Vec3(uniform(-a, a), uniform(-a, a), uniform(-a, a)); }
};

// Scalar rewrite with a diagonal inertia.
void scalar_step(const double* x, const double* u, const bool* active,
                 const double r[4][3], double m, const double* I, double g,
                 double dt, double* out) {
  double f[3] = {0, 0, 0}, tau[3] = {0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    if (!active[i]) continue;
    const double* F = u + 3 * i;
    const double dx = r[i][0] - x[0], dy = r[i][1] - x[1], dz = r[i][2] - x[2];
    f[0] += F[0];
    f[1] += F[1];
    f[2] += F[2];
    tau[0] += dy * F[2] - dz * F[1];
    tau[1] += dz * F[0] - dx * F[2];
    tau[2] += dx * F[1] - dy * F[0];
  }
  for (int k = 0; k < 3; ++k) {
    out[k] = x[k] + dt * x[6 + k];
    out[3 + k] = x[3 + k] + dt * x[9 + k];
    out[6 + k] = x[6 + k] + dt * f[k] / m;
    out[9 + k] = x[9 + k] + dt * tau[k] / I[k];
  }
  out[8] -= dt * g;
}

struct RandomCase {
  Vec12 x;
  Vec12 u;
  LegFlags active;
  LegPoints r;
};

RandomCase random_case(Rng& rng) {
  RandomCase c;
  c.x << rng.vec(0.5), rng.vec(0.3), rng.vec(1.0), rng.vec(2.0);
  c.x(2) = rng.uniform(0.15, 0.3);
  for (int i = 0; i < kNumLegs; ++i) {
    c.u.segment<3>(3 * i) = Vec3(rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(0, 30));
    c.active[i] = rng.uniform(0, 1) < 0.7;
    c.r[i] = Vec3(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3), 0.0);
  }
  return c;
}

}  // namespace

TEST(Centroidal, StepMatchesScalarOracle) {
  Rng rng;
  ModelParams p;
  const double I[3] = {p.inertia(0, 0), p.inertia(1, 1), p.inertia(2, 2)};
  for (int n = 0; n < 200; ++n) {
    const RandomCase c = random_case(rng);
    double r[4][3];
    bool act[4];
    for (int i = 0; i < 4; ++i) {
      act[i] = c.active[i];
      for (int k = 0; k < 3; ++k) r[i][k] = c.r[i][k];
    }
    double expect[12];
    scalar_step(c.x.data(), c.u.data(), act, r, p.mass, I, p.gravity.z(), p.dt, expect);
    const Vec12 got = step(c.x, c.u, c.active, c.r, p);
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(got(k), expect[k], 1e-12) << k;
  }
}

TEST(Centroidal, StructOverloadAgrees) {
  Rng rng;
  ModelParams p;
  const RandomCase c = random_case(rng);
  const ContactForces u = ContactForces::from_stacked(c.u, c.active);
  const CentroidalState a = step(CentroidalState::from_vector(c.x), u, c.r, p);
  EXPECT_TRUE(a.to_vector().isApprox(step(c.x, c.u, c.active, c.r, p), 1e-15));
}

TEST(Centroidal, InactiveLegsIgnored) {
  Rng rng;
  ModelParams p;
  RandomCase c = random_case(rng);
  c.active = {true, false, false, true};
  Vec12 u2 = c.u;
  u2.segment<3>(3) = Vec3(1e3, -1e3, 1e3);
  u2.segment<3>(6) = Vec3(-1e3, 1e3, 1e3);
  EXPECT_EQ(step(c.x, c.u, c.active, c.r, p), step(c.x, u2, c.active, c.r, p));
}

TEST(Centroidal, FlightIsBallistic) {
  ModelParams p;
  Vec12 x = Vec12::Zero();
  x(2) = 0.2;
  x(8) = 1.0;
  const Vec12 next = step(x, Vec12::Zero(), {false, false, false, false}, kZeroPoints, p);
  EXPECT_DOUBLE_EQ(next(2), 0.2 + p.dt);
  EXPECT_DOUBLE_EQ(next(8), 1.0 - p.dt * 9.81);
}

TEST(Centroidal, JacobiansMatchFiniteDifferences) {
  Rng rng;
  ModelParams p;
  const double h = 1e-6;
  for (int n = 0; n < 100; ++n) {
    const RandomCase c = random_case(rng);
    const DynamicsJacobians J = full_jacobians(c.x, c.u, c.active, c.r, p);
    for (int j = 0; j < 12; ++j) {
      Vec12 xp = c.x, xm = c.x;
      xp(j) += h;
      xm(j) -= h;
      const Vec12 d = (step(xp, c.u, c.active, c.r, p) - step(xm, c.u, c.active, c.r, p)) / (2 * h);
      EXPECT_LT((d - J.f_x.col(j)).cwiseAbs().maxCoeff(), 1e-5) << "x " << j;
      Vec12 up = c.u, um = c.u;
      up(j) += h;
      um(j) -= h;
      const Vec12 e = (step(c.x, up, c.active, c.r, p) - step(c.x, um, c.active, c.r, p)) / (2 * h);
      EXPECT_LT((e - J.f_u.col(j)).cwiseAbs().maxCoeff(), 1e-5) << "u " << j;
    }
  }
}

TEST(Centroidal, VelocityLinearizationIsExact) {
  Rng rng;
  ModelParams p;
  for (int n = 0; n < 20; ++n) {
    const RandomCase c = random_case(rng);
    const CentroidalState s = CentroidalState::from_vector(c.x);
    const VelocityLinearization lin = linearize_velocity(s, c.active, c.r, p);
    const Vec12 next = step(c.x, c.u, c.active, c.r, p);
    Vec12 u = c.u;
    for (int i = 0; i < kNumLegs; ++i)
      if (!c.active[i]) u.segment<3>(3 * i).setZero();
    const Vec6 v = s.velocity() + lin.B_F * u + lin.B_0;
    EXPECT_LT((v - next.tail<6>()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Centroidal, FullInertiaUsesInverse) {
  ModelParams p;
  p.inertia << 0.02, 0.003, 0.0, 0.003, 0.03, 0.001, 0.0, 0.001, 0.04;
  Vec12 x = Vec12::Zero();
  x(2) = 0.2;
  Vec12 u = Vec12::Zero();
  u.segment<3>(0) = Vec3(1.0, 2.0, 10.0);
  const LegPoints r{Vec3(0.2, 0.1, 0), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  const Vec12 next = step(x, u, {true, false, false, false}, r, p);
  const Vec3 tau = (r[0] - x.head<3>()).cross(Vec3(1.0, 2.0, 10.0));
  const Vec3 expect = p.dt * p.inertia.inverse() * tau;
  EXPECT_LT((next.tail<3>() - expect).norm(), 1e-12);
}

TEST(Centroidal, RejectsBadInput) {
  ModelParams p;
  Vec12 x = Vec12::Zero();
  x(0) = std::nan("");
  EXPECT_THROW(step(x, Vec12::Zero(), {}, kZeroPoints, p), Error);
  p.mass = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = ModelParams{};
  p.inertia(0, 0) = -1.0;
  EXPECT_THROW(p.validate(), Error);
}
