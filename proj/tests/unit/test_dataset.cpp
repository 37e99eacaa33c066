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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "vfqp/dataset.hpp"

using namespace vfqp;

namespace {

Config small_config() {
  Config cfg;
  cfg.data.long_cycles = 1.5;
  cfg.data.short_cycles = 1.0;
  cfg.data.sample_cycles = 0.1;
  return cfg;
}

Dataset small_dataset(int workers = 1, std::uint64_t seed = 5) {
  GenerateOptions opt;
  opt.count_long = 3;
  opt.seed = seed;
  opt.workers = workers;
  return generate(small_config(), opt);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("vfqp_test_" + name)).string();
}

// A dataset generated once for the whole file.
const Dataset& shared() {
  static const Dataset ds = small_dataset();
  return ds;
}

}  // namespace

TEST(Dataset, GeneratesFiniteSamples) {
  const Dataset& ds = shared();
  ASSERT_GT(ds.size(), 0);
  EXPECT_EQ(ds.count_long, 3u);
  EXPECT_EQ(ds.attempted, ds.samples.size() + ds.dropped);
  for (const auto& s : ds.samples) {
    EXPECT_TRUE(s.features.allFinite());
    EXPECT_TRUE(s.target.allFinite());
    const ReducedExpansion e = ReducedExpansion::from_target(s.target);
    EXPECT_LT((e.H - e.H.transpose()).cwiseAbs().maxCoeff(), 1e-9 * (1 + e.H.norm()));
  }
}

TEST(Dataset, SamplesAreCanonicallyOrdered) {
  const Dataset& ds = shared();
  for (int i = 1; i < ds.size(); ++i) {
    const auto& a = ds.samples[i - 1];
    const auto& b = ds.samples[i];
    EXPECT_TRUE(a.run < b.run || (a.run == b.run && a.step < b.step));
  }
}

TEST(Dataset, ParallelGenerationIsIdentical) {
  const Dataset two = small_dataset(2);
  EXPECT_EQ(serialize_dataset(shared()), serialize_dataset(two));
}

TEST(Dataset, SeedChangesData) {
  EXPECT_NE(serialize_dataset(shared()), serialize_dataset(small_dataset(1, 6)));
}

TEST(Dataset, LongRunSetupWithinRanges) {
  const DataConfig dc;
  for (std::uint64_t run = 0; run < 50; ++run) {
    const LongRunSetup s = sample_long_run(dc, 0.21, 1, run);
    EXPECT_LE(std::abs(s.x0.c.z() - 0.21), dc.height_range + 1e-15);
    EXPECT_LE(s.v_cmd.head<2>().cwiseAbs().maxCoeff(), dc.vcmd_max + 1e-15);
    EXPECT_LE(s.x0.alpha.head<2>().cwiseAbs().maxCoeff(), dc.attitude_range + 1e-15);
  }
  const LongRunSetup a = sample_long_run(dc, 0.21, 1, 7), b = sample_long_run(dc, 0.21, 1, 7);
  EXPECT_EQ(a.x0.to_vector(), b.x0.to_vector());
}

TEST(Dataset, FileRoundTrip) {
  const std::string path = temp_path("roundtrip.bin");
  save_dataset(shared(), path);
  const Dataset back = load_dataset(path);
  EXPECT_EQ(serialize_dataset(back), serialize_dataset(shared()));
  EXPECT_EQ(back.gait, GaitKind::kTrot);
  EXPECT_FALSE(back.config_mismatch);
  std::filesystem::remove(path);
}

TEST(Dataset, RejectsDamagedFiles) {
  const std::string bytes = serialize_dataset(shared());
  try {
    deserialize_dataset(bytes.substr(0, bytes.size() - 9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorrupt);
  }
  std::string bad = bytes;
  bad[0] = 'X';
  try {
    deserialize_dataset(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  try {
    deserialize_dataset("VFQP");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  EXPECT_THROW(load_dataset(temp_path("does_not_exist.bin")), Error);
}

TEST(Dataset, FlagsConfigMismatch) {
  const std::string bytes = serialize_dataset(shared());
  Config other = small_config();
  other.cost.height = 0.25;
  const Dataset ds = deserialize_dataset(bytes, other.data_hash(GaitKind::kTrot));
  EXPECT_TRUE(ds.config_mismatch);
  const Dataset same = deserialize_dataset(bytes, small_config().data_hash(GaitKind::kTrot));
  EXPECT_FALSE(same.config_mismatch);
}

TEST(Dataset, LowYieldIsAnError) {
  Config cfg = small_config();
  cfg.ilqr.max_iters = 1;
  cfg.data.min_yield = 0.9;
  GenerateOptions opt;
  opt.count_long = 1;
  try {
    generate(cfg, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kYield);
  }
}

TEST(Dataset, StatsMatchSamples) {
  Dataset ds = shared();
  ds.compute_stats();
  double mean = 0.0;
  for (const auto& s : ds.samples) mean += s.features[0];
  mean /= ds.size();
  EXPECT_NEAR(ds.stats.feature_mean[0], mean, 1e-12);
}
