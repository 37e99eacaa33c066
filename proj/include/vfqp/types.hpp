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

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace vfqp {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat6x12 = Eigen::Matrix<double, 6, 12>;

inline constexpr int kNumLegs = 4;
inline constexpr int kStateDim = 12;
inline constexpr int kControlDim = 3 * kNumLegs;
inline constexpr int kPosDim = 6;
inline constexpr int kVelDim = 6;

// Leg order used everywhere: front-left, front-right, hind-left, hind-right.
enum Leg : int { kFL = 0, kFR = 1, kHL = 2, kHR = 3 };

// Offsets into the 12-vector state (c, alpha, c_dot, omega).
namespace idx {
inline constexpr int kCom = 0;
inline constexpr int kAlpha = 3;
inline constexpr int kComVel = 6;
inline constexpr int kOmega = 9;
}  // namespace idx

using LegPoints = std::array<Vec3, kNumLegs>;
using LegFlags = std::array<bool, kNumLegs>;

enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kNonFinite = 2,
  kIo = 3,
  kFormat = 4,
  kCorrupt = 5,
  kDimMismatch = 6,
  kSolverFailure = 7,
  kNumerical = 8,
  kYield = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vfqp
