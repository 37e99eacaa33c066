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

#include "vfqp/box_qp.hpp"

#include <cmath>

namespace vfqp::ilqr {

namespace {

constexpr int kMaxIter = 100;
constexpr double kMinGrad = 1e-8;
constexpr double kMinRelImprove = 1e-8;
constexpr double kStepDec = 0.6;
constexpr double kMinStep = 1e-22;
constexpr double kArmijo = 0.1;

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

double objective(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                 const Eigen::VectorXd& x) {
  return x.dot(g) + 0.5 * x.dot(H * x);
}

Eigen::MatrixXd sub_matrix(const Eigen::MatrixXd& H,
                           const std::vector<int>& idx) {
  const int n = static_cast<int>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = H(idx[i], idx[j]);
  return out;
}

}  // namespace

BoxQpResult box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                   const Eigen::VectorXd& x0) {
  const int n = static_cast<int>(g.size());
  BoxQpResult res;
  res.x = clamp(x0, lower, upper);

  std::vector<bool> clamped(n, false);
  std::vector<bool> fixed(n, false);
  for (int i = 0; i < n; ++i) fixed[i] = lower[i] == upper[i];

  double value = objective(H, g, res.x);
  bool factorized = false;

  auto update_sets = [&](const Eigen::VectorXd& grad) {
    bool changed = false;
    res.free_idx.clear();
    res.clamped_idx.clear();
    for (int i = 0; i < n; ++i) {
      const bool c = fixed[i] || (res.x[i] <= lower[i] && grad[i] > 0.0) ||
                     (res.x[i] >= upper[i] && grad[i] < 0.0);
      changed = changed || c != clamped[i];
      clamped[i] = c;
      (c ? res.clamped_idx : res.free_idx).push_back(i);
    }
    return changed;
  };

  res.status = BoxQpStatus::kMaxIterations;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    res.iterations = iter + 1;
    const Eigen::VectorXd grad = g + H * res.x;
    const bool changed = update_sets(grad);

    if (res.free_idx.empty()) {
      res.status = BoxQpStatus::kAllClamped;
      break;
    }
    if (!factorized || changed) {
      res.free_llt.compute(sub_matrix(H, res.free_idx));
      if (res.free_llt.info() != Eigen::Success) {
        res.status = BoxQpStatus::kNotPositiveDefinite;
        return res;
      }
      factorized = true;
    }

    const int nf = static_cast<int>(res.free_idx.size());
    Eigen::VectorXd grad_free(nf);
    for (int i = 0; i < nf; ++i) grad_free[i] = grad[res.free_idx[i]];
    if (grad_free.norm() < kMinGrad) {
      res.status = BoxQpStatus::kConverged;
      break;
    }

    // Newton step on the free subspace, clamped coordinates held fixed.
    const Eigen::VectorXd step_free = -res.free_llt.solve(grad_free);
    Eigen::VectorXd search = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < nf; ++i) search[res.free_idx[i]] = step_free[i];

    const double sdotg = search.dot(grad);
    if (sdotg >= 0.0) {
      res.status = BoxQpStatus::kNoDescent;
      break;
    }

    double step = 1.0;
    Eigen::VectorXd xc = clamp(res.x + step * search, lower, upper);
    double vc = objective(H, g, xc);
    while ((vc - value) / (step * sdotg) < kArmijo) {
      step *= kStepDec;
      if (step < kMinStep) break;
      xc = clamp(res.x + step * search, lower, upper);
      vc = objective(H, g, xc);
    }
    if (step < kMinStep) {
      res.status = BoxQpStatus::kLineSearchFailed;
      break;
    }

    const double improvement = value - vc;
    res.x = xc;
    value = vc;
    if (improvement <= kMinRelImprove * std::abs(value) && iter > 0) {
      res.status = BoxQpStatus::kConverged;
      break;
    }
  }

  // Gains need the free-set factor at the returned point.
  const Eigen::VectorXd grad = g + H * res.x;
  if (update_sets(grad) || !factorized) {
    if (!res.free_idx.empty()) {
      res.free_llt.compute(sub_matrix(H, res.free_idx));
      if (res.free_llt.info() != Eigen::Success)
        res.status = BoxQpStatus::kNotPositiveDefinite;
    }
  }
  return res;
}

}  // namespace vfqp::ilqr
