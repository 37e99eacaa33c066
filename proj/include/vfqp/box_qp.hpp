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

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace vfqp::ilqr {

enum class BoxQpStatus {
  kNotPositiveDefinite,
  kMaxIterations,
  kNoDescent,
  kLineSearchFailed,
  kConverged,
  kAllClamped,
};

struct BoxQpResult {
  BoxQpStatus status = BoxQpStatus::kMaxIterations;
  Eigen::VectorXd x;
  std::vector<int> free_idx;
  std::vector<int> clamped_idx;
  Eigen::LLT<Eigen::MatrixXd> free_llt;  // factor of H restricted to free_idx
  int iterations = 0;

  bool ok() const { return status != BoxQpStatus::kNotPositiveDefinite; }
};

// Projected-Newton solve of min 1/2 x'Hx + g'x s.t. lower <= x <= upper.
// Components with lower == upper are always clamped.
BoxQpResult box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                   const Eigen::VectorXd& x0);

}  // namespace vfqp::ilqr
