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

#include "vfqp/types.hpp"

namespace vfqp {

// CoM position, world-frame Euler angles, and their velocities.
// The flat layout is (c, alpha, c_dot, omega); the first six numbers are the
// position part s and the last six the velocity part v.
struct CentroidalState {
  Vec3 c = Vec3::Zero();
  Vec3 alpha = Vec3::Zero();
  Vec3 c_dot = Vec3::Zero();
  Vec3 omega = Vec3::Zero();

  Vec12 to_vector() const;
  static CentroidalState from_vector(const Vec12& x);

  Vec6 position() const;
  Vec6 velocity() const;
  void set_velocity(const Vec6& v);

  bool all_finite() const;
};

struct ContactForces {
  LegPoints F{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  LegFlags active{false, false, false, false};

  Vec12 stacked() const;
  // Inactive legs are zeroed on construction.
  static ContactForces from_stacked(const Vec12& u, const LegFlags& active);
};

struct ModelParams {
  double mass = 2.5;
  Vec3 gravity{0.0, 0.0, 9.81};
  Mat3 inertia = Vec3(0.016, 0.031, 0.041).asDiagonal();
  double dt = 0.004;

  // Throws Error(kInvalidArgument) when mass/dt/inertia are unusable.
  void validate() const;
};

struct VelocityLinearization {
  Mat6x12 B_F = Mat6x12::Zero();
  Vec6 B_0 = Vec6::Zero();
};

struct DynamicsJacobians {
  Mat12 f_x = Mat12::Zero();
  Mat12 f_u = Mat12::Zero();
};

// Explicit Euler step of the centroidal model. Torque about the CoM is
// (r_i - c) x F_i and omega integrates I^-1 * torque.
CentroidalState step(const CentroidalState& x, const ContactForces& u,
                     const LegPoints& r, const ModelParams& p);

// Same update on flat vectors; forces of inactive legs are ignored.
Vec12 step(const Vec12& x, const Vec12& u, const LegFlags& active,
           const LegPoints& r, const ModelParams& p);

// v_{t+1} = v_t + B_F * u + B_0, exact for fixed (x, r).
VelocityLinearization linearize_velocity(const CentroidalState& x,
                                         const LegFlags& active,
                                         const LegPoints& r,
                                         const ModelParams& p);

DynamicsJacobians full_jacobians(const Vec12& x, const Vec12& u,
                                 const LegFlags& active, const LegPoints& r,
                                 const ModelParams& p);

Mat3 skew(const Vec3& v);

}  // namespace vfqp
