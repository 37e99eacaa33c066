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

#include "vfqp/features.hpp"

namespace vfqp {

FeatureVector featurize(const CentroidalState& x, const LegFlags& contacts,
                        const LegPoints& points,
                        const std::array<double, kNumLegs>& contact_times,
                        const Vec3& v_cmd) {
  FeatureVector f;
  f[feat::kHeight] = x.c.z();
  f.segment<3>(feat::kAlpha) = x.alpha;
  f.segment<3>(feat::kComVel) = x.c_dot;
  f.segment<3>(feat::kOmega) = x.omega;
  for (int i = 0; i < kNumLegs; ++i) {
    f.segment<3>(feat::kFeet + 3 * i) = points[i] - x.c;
    f[feat::kContacts + i] = contacts[i] ? 1.0 : 0.0;
    f[feat::kContactTimes + i] = contact_times[i];
  }
  f.segment<3>(feat::kVcmd) = v_cmd;
  return f;
}

TargetVector ReducedExpansion::to_target() const {
  TargetVector t;
  t.head<6>() = g;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) t[6 + 6 * r + c] = H(r, c);
  return t;
}

ReducedExpansion ReducedExpansion::from_target(const TargetVector& t) {
  ReducedExpansion e;
  e.g = t.head<6>();
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) e.H(r, c) = t[6 + 6 * r + c];
  return e;
}

ReducedExpansion reduce_expansion(const Vec12& V_x, const Mat12& V_xx,
                                  const Vec12& x_hat_next, const Vec6& s_next) {
  const Vec12 offset = V_x - V_xx * x_hat_next;
  ReducedExpansion e;
  e.g = offset.tail<6>() + V_xx.block<6, 6>(kPosDim, 0) * s_next;
  e.H = V_xx.block<6, 6>(kPosDim, kPosDim);
  return e;
}

}  // namespace vfqp
