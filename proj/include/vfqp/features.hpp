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

#include "vfqp/centroidal.hpp"
#include "vfqp/types.hpp"

namespace vfqp {

inline constexpr int kFeatureDim = 33;
inline constexpr int kTargetDim = 42;

using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;
using TargetVector = Eigen::Matrix<double, kTargetDim, 1>;

// Feature layout:
//   [0]      c_z
//   [1, 4)   alpha
//   [4, 7)   c_dot
//   [7, 10)  omega
//   [10, 22) r_i - c, legs FL FR HL HR
//   [22, 26) contact flags (1 = stance)
//   [26, 29) v_cmd
//   [29, 33) contact times, seconds
namespace feat {
inline constexpr int kHeight = 0;
inline constexpr int kAlpha = 1;
inline constexpr int kComVel = 4;
inline constexpr int kOmega = 7;
inline constexpr int kFeet = 10;
inline constexpr int kContacts = 22;
inline constexpr int kVcmd = 26;
inline constexpr int kContactTimes = 29;
}  // namespace feat

FeatureVector featurize(const CentroidalState& x, const LegFlags& contacts,
                        const LegPoints& points,
                        const std::array<double, kNumLegs>& contact_times,
                        const Vec3& v_cmd);

// Gradient and Hessian of the one-step QP in the next velocity.
struct ReducedExpansion {
  Vec6 g = Vec6::Zero();
  Mat6 H = Mat6::Zero();

  TargetVector to_target() const;  // g, then H row-major
  static ReducedExpansion from_target(const TargetVector& t);
};

// Splits the offset gradient V_x - V_xx x_hat_next into (V^s, V^v) and forms
// g = V^v + V^vs s_next and H = V^vv.
ReducedExpansion reduce_expansion(const Vec12& V_x, const Mat12& V_xx,
                                  const Vec12& x_hat_next, const Vec6& s_next);

}  // namespace vfqp
