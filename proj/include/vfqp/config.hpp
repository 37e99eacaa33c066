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

#include <cstdint>
#include <string>

#include "vfqp/centroidal.hpp"
#include "vfqp/gait.hpp"
#include "vfqp/ilqr.hpp"

namespace vfqp {

// Quadratic tracking cost of the data-generation problem.
// W is indexed like the state (c, alpha, c_dot, omega).
struct CostConfig {
  Vec12 w = (Vec12() << 0, 0, 5000, 500, 500, 500, 10, 10, 100, 1, 1, 10).finished();
  double r = 1e-2;
  double height = 0.21;
};

struct QpConfig {
  double mu = 0.6;
  double f_z_max = 30.0;
  double r = 1e-2;
};

struct DataConfig {
  double long_cycles = 4.0;
  double short_cycles = 2.5;
  double sample_cycles = 1.5;
  double vcmd_max = 0.6;
  double height_range = 0.03;
  double attitude_range = 0.1;  // roll/pitch, rad
  double lin_vel_range = 0.3;
  double ang_vel_range = 0.5;
  double min_yield = 0.5;  // accepted / attempted short solves
  double fxy_max = 18.0;   // box on tangential forces inside iLQR

  // Cycle counts are checked together when data is generated, so they can
  // be overridden one key at a time.
  void validate() const;
};

struct TrainConfig {
  int epochs = 256;
  int batch = 128;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;
  double val_fraction = 0.1;
  double eps_eig = 1e-4;
  int hidden_layers = 3;
  int hidden_units = 256;
};

struct SimParams {
  double control_rate = 500.0;
  double prediction_rate = 500.0;
  double duration = 5.0;
  double min_height = 0.02;
  double max_height = 1.0;
  double max_attitude = 0.6;
  double obs_noise_std = 0.0;
  double settle_time = 1.0;  // discarded after each v_cmd change
};

struct Config {
  ModelParams model;
  GaitConfig trot = GaitConfig::trot();
  GaitConfig bound = GaitConfig::bound();
  GaitConfig stand = GaitConfig::stand();
  CostConfig cost;
  QpConfig qp;
  DataConfig data;
  TrainConfig train;
  SimParams sim;
  ilqr::SolverOptions ilqr;

  const GaitConfig& gait(GaitKind kind) const;

  // Throws Error(kIo / kFormat / kInvalidArgument).
  static Config load(const std::string& path);
  static Config parse(const std::string& text);

  // Set one value by dotted key, e.g. "train.epochs".
  void set(const std::string& key, const std::string& value);

  // Canonical text of everything that determines generated data for `kind`.
  std::string data_canonical(GaitKind kind) const;
  std::uint64_t data_hash(GaitKind kind) const;

  void validate() const;
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace vfqp
