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

#include "vfqp/centroidal.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <Eigen/LU>

namespace vfqp {

Vec12 CentroidalState::to_vector() const {
  Vec12 x;
  x << c, alpha, c_dot, omega;
  return x;
}

CentroidalState CentroidalState::from_vector(const Vec12& x) {
  CentroidalState s;
  s.c = x.segment<3>(idx::kCom);
  s.alpha = x.segment<3>(idx::kAlpha);
  s.c_dot = x.segment<3>(idx::kComVel);
  s.omega = x.segment<3>(idx::kOmega);
  return s;
}

Vec6 CentroidalState::position() const {
  Vec6 s;
  s << c, alpha;
  return s;
}

Vec6 CentroidalState::velocity() const {
  Vec6 v;
  v << c_dot, omega;
  return v;
}

void CentroidalState::set_velocity(const Vec6& v) {
  c_dot = v.head<3>();
  omega = v.tail<3>();
}

bool CentroidalState::all_finite() const { return to_vector().allFinite(); }

Vec12 ContactForces::stacked() const {
  Vec12 u;
  for (int i = 0; i < kNumLegs; ++i) u.segment<3>(3 * i) = F[i];
  return u;
}

ContactForces ContactForces::from_stacked(const Vec12& u,
                                          const LegFlags& active) {
  ContactForces f;
  f.active = active;
  for (int i = 0; i < kNumLegs; ++i)
    f.F[i] = active[i] ? Vec3(u.segment<3>(3 * i)) : Vec3::Zero();
  return f;
}

void ModelParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorCode::kInvalidArgument, "model: mass must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(ErrorCode::kInvalidArgument, "model: dt must be > 0");
  if (!inertia.allFinite() || !inertia.isApprox(inertia.transpose(), 1e-12))
    throw Error(ErrorCode::kInvalidArgument, "model: inertia must be symmetric");
  Eigen::LLT<Mat3> llt(inertia);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::kInvalidArgument,
                "model: inertia must be positive definite");
}

namespace {

void require_finite(const Vec12& x, const LegPoints& r, const char* what) {
  bool ok = x.allFinite();
  for (const auto& ri : r) ok = ok && ri.allFinite();
  if (!ok) {
    std::ostringstream os;
    os << "centroidal " << what << ": non-finite input";
    throw Error(ErrorCode::kNonFinite, os.str());
  }
}

}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec12 step(const Vec12& x, const Vec12& u, const LegFlags& active,
           const LegPoints& r, const ModelParams& p) {
  require_finite(x, r, "step");
  if (!u.allFinite())
    throw Error(ErrorCode::kNonFinite, "centroidal step: non-finite force");

  const Vec3 c = x.segment<3>(idx::kCom);
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    if (!active[i]) continue;
    const Vec3 Fi = u.segment<3>(3 * i);
    force += Fi;
    torque += (r[i] - c).cross(Fi);
  }

  Vec12 next = x;
  next.segment<3>(idx::kCom) += p.dt * x.segment<3>(idx::kComVel);
  next.segment<3>(idx::kAlpha) += p.dt * x.segment<3>(idx::kOmega);
  next.segment<3>(idx::kComVel) += p.dt * (force / p.mass - p.gravity);
  next.segment<3>(idx::kOmega) += p.dt * p.inertia.ldlt().solve(torque);
  return next;
}

CentroidalState step(const CentroidalState& x, const ContactForces& u,
                     const LegPoints& r, const ModelParams& p) {
  return CentroidalState::from_vector(
      step(x.to_vector(), u.stacked(), u.active, r, p));
}

VelocityLinearization linearize_velocity(const CentroidalState& x,
                                         const LegFlags& active,
                                         const LegPoints& r,
                                         const ModelParams& p) {
  require_finite(x.to_vector(), r, "linearize_velocity");
  const Mat3 inertia_inv = p.inertia.inverse();
  VelocityLinearization lin;
  for (int i = 0; i < kNumLegs; ++i) {
    if (!active[i]) continue;
    lin.B_F.block<3, 3>(0, 3 * i) = (p.dt / p.mass) * Mat3::Identity();
    lin.B_F.block<3, 3>(3, 3 * i) = p.dt * inertia_inv * skew(r[i] - x.c);
  }
  lin.B_0.head<3>() = -p.dt * p.gravity;
  return lin;
}

DynamicsJacobians full_jacobians(const Vec12& x, const Vec12& u,
                                 const LegFlags& active, const LegPoints& r,
                                 const ModelParams& p) {
  require_finite(x, r, "full_jacobians");
  const Mat3 inertia_inv = p.inertia.inverse();
  const Vec3 c = x.segment<3>(idx::kCom);

  DynamicsJacobians J;
  J.f_x.setIdentity();
  J.f_x.block<3, 3>(idx::kCom, idx::kComVel) = p.dt * Mat3::Identity();
  J.f_x.block<3, 3>(idx::kAlpha, idx::kOmega) = p.dt * Mat3::Identity();

  // d/dc of (r_i - c) x F_i is skew(F_i).
  Mat3 dtorque_dc = Mat3::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    if (!active[i]) continue;
    const Vec3 Fi = u.segment<3>(3 * i);
    dtorque_dc += skew(Fi);
    J.f_u.block<3, 3>(idx::kComVel, 3 * i) =
        (p.dt / p.mass) * Mat3::Identity();
    J.f_u.block<3, 3>(idx::kOmega, 3 * i) =
        p.dt * inertia_inv * skew(r[i] - c);
  }
  J.f_x.block<3, 3>(idx::kOmega, idx::kCom) = p.dt * inertia_inv * dtorque_dc;
  return J;
}

}  // namespace vfqp
