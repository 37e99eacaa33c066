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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vfqp/config.hpp"
#include "vfqp/features.hpp"
#include "vfqp/tracking.hpp"

namespace vfqp {

struct TrainingSample {
  std::uint64_t run = 0;   // long-trajectory index
  std::uint64_t step = 0;  // start step of the short problem
  FeatureVector features = FeatureVector::Zero();
  TargetVector target = TargetVector::Zero();
};

struct DatasetStats {
  FeatureVector feature_mean = FeatureVector::Zero();
  FeatureVector feature_std = FeatureVector::Ones();
  TargetVector target_mean = TargetVector::Zero();
  TargetVector target_std = TargetVector::Ones();
};

struct Dataset {
  GaitKind gait = GaitKind::kTrot;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t count_long = 0;
  std::uint64_t attempted = 0;  // short solves
  std::uint64_t dropped = 0;    // short solves that did not converge
  DatasetStats stats;
  std::vector<TrainingSample> samples;

  // Set by load() when the stored hash differs from the expected one.
  bool config_mismatch = false;

  int size() const { return static_cast<int>(samples.size()); }
  void sort_canonical();
  void compute_stats();
};

inline constexpr char kDatasetMagic[8] = {'V', 'F', 'Q', 'P', 'D', 'A', 'T', 'A'};
inline constexpr std::uint32_t kDatasetVersion = 1;

void save_dataset(const Dataset& ds, const std::string& path);
// Error(kFormat) on magic/version, kDimMismatch on dims, kCorrupt on payload.
Dataset load_dataset(const std::string& path,
                     std::optional<std::uint64_t> expected_hash = std::nullopt);

std::string serialize_dataset(const Dataset& ds);
Dataset deserialize_dataset(const std::string& bytes,
                            std::optional<std::uint64_t> expected_hash = std::nullopt);

struct GenerateOptions {
  GaitKind gait = GaitKind::kTrot;
  int count_long = 64;
  std::uint64_t seed = 1;
  int workers = 1;
  // Called after each long run as (finished, total); may be empty.
  std::function<void(int, int)> progress;
};

struct GenerateSummary {
  std::uint64_t samples = 0;
  std::uint64_t attempted = 0;
  std::uint64_t dropped = 0;
  double wall_seconds = 0.0;
};

// Random initial state and velocity command of long run `run`.
struct LongRunSetup {
  CentroidalState x0;
  Vec3 v_cmd = Vec3::Zero();
};
LongRunSetup sample_long_run(const DataConfig& cfg, double height,
                             std::uint64_t seed, std::uint64_t run);

// Samples of one long run (independent of every other run).
std::vector<TrainingSample> generate_long_run(const Config& cfg, GaitKind gait,
                                              std::uint64_t seed,
                                              std::uint64_t run,
                                              std::uint64_t* attempted,
                                              std::uint64_t* dropped);

// Error(kYield) when the accepted fraction falls below cfg.data.min_yield.
Dataset generate(const Config& cfg, const GenerateOptions& opt,
                 GenerateSummary* summary = nullptr);

// Tracking problem along `schedule` with the configured costs and bounds.
CentroidalProblem make_problem(const Config& cfg, const GaitSchedule& schedule,
                               const Vec3& v_cmd);

long cycle_steps(double cycles, const GaitConfig& gait, double dt);

}  // namespace vfqp
