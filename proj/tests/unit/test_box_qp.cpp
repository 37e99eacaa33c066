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

#include <limits>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "vfqp/box_qp.hpp"

using namespace vfqp::ilqr;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Enumerates every free/lower/upper assignment and keeps the best feasible
// stationary point.
VectorXd brute_force(const MatrixXd& H, const VectorXd& g, const VectorXd& lo,
                     const VectorXd& hi) {
  const int n = static_cast<int>(g.size());
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  double best = std::numeric_limits<double>::infinity();
  VectorXd best_x;
  for (int code = 0; code < combos; ++code) {
    VectorXd x = VectorXd::Zero(n);
    std::vector<int> free;
    int c = code;
    for (int i = 0; i < n; ++i, c /= 3) {
      if (c % 3 == 0) free.push_back(i);
      else x(i) = c % 3 == 1 ? lo(i) : hi(i);
    }
    if (!free.empty()) {
      const int m = static_cast<int>(free.size());
      MatrixXd Hf(m, m);
      VectorXd rhs(m);
      for (int a = 0; a < m; ++a) {
        rhs(a) = -g(free[a]);
        for (int j = 0; j < n; ++j)
          if (std::find(free.begin(), free.end(), j) == free.end())
            rhs(a) -= H(free[a], j) * x(j);
        for (int b = 0; b < m; ++b) Hf(a, b) = H(free[a], free[b]);
      }
      const VectorXd xf = Hf.ldlt().solve(rhs);
      for (int a = 0; a < m; ++a) x(free[a]) = xf(a);
    }
    if ((x.array() < lo.array() - 1e-12).any() || (x.array() > hi.array() + 1e-12).any())
      continue;
    const double f = g.dot(x) + 0.5 * x.dot(H * x);
    if (f < best) {
      best = f;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace

TEST(BoxQp, UnconstrainedMatchesNewtonStep) {
  MatrixXd H(2, 2);
  H << 2, 0.5, 0.5, 1;
  VectorXd g(2);
  g << -1, 1;
  const VectorXd big = VectorXd::Constant(2, 1e9);
  const BoxQpResult r = box_qp(H, g, -big, big, VectorXd::Zero(2));
  ASSERT_TRUE(r.ok());
  EXPECT_LT((r.x - H.ldlt().solve(-g)).norm(), 1e-9);
  EXPECT_TRUE(r.clamped_idx.empty());
}

TEST(BoxQp, MatchesBruteForceOnRandomInstances) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    MatrixXd A(n, n);
    for (int i = 0; i < n * n; ++i) A.data()[i] = N(gen);
    const MatrixXd H = A * A.transpose() + 0.1 * MatrixXd::Identity(n, n);
    VectorXd g(n), lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      g(i) = 3 * N(gen);
      lo(i) = -std::abs(N(gen));
      hi(i) = std::abs(N(gen));
    }
    const BoxQpResult r = box_qp(H, g, lo, hi, VectorXd::Zero(n));
    ASSERT_TRUE(r.ok());
    const VectorXd ref = brute_force(H, g, lo, hi);
    const double f = g.dot(r.x) + 0.5 * r.x.dot(H * r.x);
    const double fr = g.dot(ref) + 0.5 * ref.dot(H * ref);
    EXPECT_NEAR(f, fr, 1e-7 * (1 + std::abs(fr))) << trial;
    EXPECT_TRUE((r.x.array() >= lo.array()).all() && (r.x.array() <= hi.array()).all());
  }
}

TEST(BoxQp, FixedComponentsStayClamped) {
  MatrixXd H = MatrixXd::Identity(3, 3);
  VectorXd g(3);
  g << -5, 0, 5;
  VectorXd lo(3), hi(3);
  lo << 0, 0.25, -1;
  hi << 1, 0.25, 1;
  const BoxQpResult r = box_qp(H, g, lo, hi, VectorXd::Zero(3));
  EXPECT_DOUBLE_EQ(r.x(1), 0.25);
  EXPECT_DOUBLE_EQ(r.x(0), 1.0);
  EXPECT_DOUBLE_EQ(r.x(2), -1.0);
  EXPECT_EQ(r.status, BoxQpStatus::kAllClamped);
}

TEST(BoxQp, ReportsIndefiniteHessian) {
  MatrixXd H(2, 2);
  H << 1, 0, 0, -1;
  const VectorXd big = VectorXd::Constant(2, 1e3);
  const BoxQpResult r = box_qp(H, VectorXd::Ones(2), -big, big, VectorXd::Zero(2));
  EXPECT_FALSE(r.ok());
}
