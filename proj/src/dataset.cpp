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

#include "vfqp/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"

namespace vfqp {

namespace binio {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

}  // namespace binio

namespace {

using nlohmann::json;

constexpr std::size_t kRecordBytes =
    2 * sizeof(std::uint64_t) + (kFeatureDim + kTargetDim) * sizeof(double);

template <typename Vec>
json to_json_array(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < static_cast<int>(v.size()); ++i) a.push_back(v[i]);
  return a;
}

template <typename Vec>
void from_json_array(const json& a, Vec& v, const char* name) {
  if (!a.is_array() || static_cast<int>(a.size()) != static_cast<int>(v.size()))
    throw Error(ErrorCode::kDimMismatch,
                std::string("dataset: bad length for '") + name + "'");
  for (int i = 0; i < static_cast<int>(v.size()); ++i) v[i] = a[i].get<double>();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

void Dataset::sort_canonical() {
  std::sort(samples.begin(), samples.end(),
            [](const TrainingSample& a, const TrainingSample& b) {
              return a.run != b.run ? a.run < b.run : a.step < b.step;
            });
}

void Dataset::compute_stats() {
  stats = DatasetStats{};
  if (samples.empty()) return;
  const double n = static_cast<double>(samples.size());
  for (const auto& s : samples) {
    stats.feature_mean += s.features;
    stats.target_mean += s.target;
  }
  stats.feature_mean /= n;
  stats.target_mean /= n;
  FeatureVector fv = FeatureVector::Zero();
  TargetVector tv = TargetVector::Zero();
  for (const auto& s : samples) {
    fv += (s.features - stats.feature_mean).cwiseAbs2();
    tv += (s.target - stats.target_mean).cwiseAbs2();
  }
  stats.feature_std = (fv / n).cwiseSqrt();
  stats.target_std = (tv / n).cwiseSqrt();
}

std::string serialize_dataset(const Dataset& ds) {
  json header = {
      {"format", "vfqp-dataset"},
      {"version", kDatasetVersion},
      {"records", ds.samples.size()},
      {"record_bytes", kRecordBytes},
      {"feature_dim", kFeatureDim},
      {"target_dim", kTargetDim},
      {"gait", to_string(ds.gait)},
      {"config_hash", hex64(ds.config_hash)},
      {"seed", ds.seed},
      {"count_long", ds.count_long},
      {"attempted", ds.attempted},
      {"dropped", ds.dropped},
      {"feature_mean", to_json_array(ds.stats.feature_mean)},
      {"feature_std", to_json_array(ds.stats.feature_std)},
      {"target_mean", to_json_array(ds.stats.target_mean)},
      {"target_std", to_json_array(ds.stats.target_std)},
  };
  const std::string text = header.dump();

  binio::Writer w;
  w.bytes(kDatasetMagic, sizeof(kDatasetMagic));
  w.u32(kDatasetVersion);
  w.u32(0);
  w.u64(text.size());
  w.bytes(text.data(), text.size());
  for (const auto& s : ds.samples) {
    w.u64(s.run);
    w.u64(s.step);
    w.f64s(s.features);
    w.f64s(s.target);
  }
  return std::move(w.str());
}

Dataset deserialize_dataset(const std::string& bytes,
                            std::optional<std::uint64_t> expected_hash) {
  binio::Reader r(bytes, ErrorCode::kCorrupt, "dataset");
  char magic[8];
  if (bytes.size() < sizeof(magic))
    throw Error(ErrorCode::kFormat, "dataset: not a vfqp dataset (too short)");
  r.bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + 8, kDatasetMagic))
    throw Error(ErrorCode::kFormat, "dataset: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kDatasetVersion)
    throw Error(ErrorCode::kFormat,
                "dataset: unsupported version " + std::to_string(version));
  r.u32();
  const std::uint64_t header_len = r.u64();
  if (header_len > r.remaining())
    throw Error(ErrorCode::kCorrupt, "dataset: header exceeds file size");

  json header;
  try {
    header = json::parse(r.text(header_len));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string("dataset: bad header: ") + e.what());
  }

  Dataset ds;
  std::uint64_t records = 0;
  try {
    if (header.at("feature_dim").get<int>() != kFeatureDim ||
        header.at("target_dim").get<int>() != kTargetDim)
      throw Error(ErrorCode::kDimMismatch, "dataset: feature/target dims differ");
    records = header.at("records").get<std::uint64_t>();
    ds.gait = parse_gait_kind(header.at("gait").get<std::string>());
    ds.config_hash =
        std::stoull(header.at("config_hash").get<std::string>(), nullptr, 16);
    ds.seed = header.at("seed").get<std::uint64_t>();
    ds.count_long = header.at("count_long").get<std::uint64_t>();
    ds.attempted = header.at("attempted").get<std::uint64_t>();
    ds.dropped = header.at("dropped").get<std::uint64_t>();
    from_json_array(header.at("feature_mean"), ds.stats.feature_mean, "feature_mean");
    from_json_array(header.at("feature_std"), ds.stats.feature_std, "feature_std");
    from_json_array(header.at("target_mean"), ds.stats.target_mean, "target_mean");
    from_json_array(header.at("target_std"), ds.stats.target_std, "target_std");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string("dataset: bad header: ") + e.what());
  }

  if (r.remaining() != records * kRecordBytes)
    throw Error(ErrorCode::kCorrupt,
                "dataset: payload holds " + std::to_string(r.remaining()) +
                    " bytes, header promises " + std::to_string(records) +
                    " records of " + std::to_string(kRecordBytes));

  ds.samples.resize(records);
  for (auto& s : ds.samples) {
    s.run = r.u64();
    s.step = r.u64();
    r.f64s(s.features);
    r.f64s(s.target);
  }
  if (expected_hash && *expected_hash != ds.config_hash) ds.config_mismatch = true;
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  binio::write_file(path, serialize_dataset(ds));
}

Dataset load_dataset(const std::string& path,
                     std::optional<std::uint64_t> expected_hash) {
  return deserialize_dataset(binio::read_file(path), expected_hash);
}

long cycle_steps(double cycles, const GaitConfig& gait, double dt) {
  return std::lround(cycles * gait.cycle() / dt);
}

CentroidalProblem make_problem(const Config& cfg, const GaitSchedule& schedule,
                               const Vec3& v_cmd) {
  ForceBounds bounds;
  bounds.f_z_max = cfg.qp.f_z_max;
  bounds.fxy_max = cfg.data.fxy_max;
  return CentroidalProblem(schedule, cfg.model,
                           ilqr_cost_for_tracking(v_cmd, cfg.cost), bounds);
}

LongRunSetup sample_long_run(const DataConfig& cfg, double height,
                             std::uint64_t seed, std::uint64_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run),
                    static_cast<std::uint32_t>(run >> 32)};
  std::mt19937_64 rng(seq);
  auto uniform = [&rng](double half_width) {
    return std::uniform_real_distribution<double>(-half_width, half_width)(rng);
  };

  LongRunSetup s;
  s.x0.c = Vec3(0.0, 0.0, height + uniform(cfg.height_range));
  s.x0.alpha = Vec3(uniform(cfg.attitude_range), uniform(cfg.attitude_range), 0.0);
  s.x0.c_dot = Vec3(uniform(cfg.lin_vel_range), uniform(cfg.lin_vel_range),
                    uniform(cfg.lin_vel_range));
  s.x0.omega = Vec3(uniform(cfg.ang_vel_range), uniform(cfg.ang_vel_range),
                    uniform(cfg.ang_vel_range));
  const double heading =
      std::uniform_real_distribution<double>(-M_PI, M_PI)(rng);
  const double speed =
      std::uniform_real_distribution<double>(0.0, cfg.vcmd_max)(rng);
  s.v_cmd = Vec3(speed * std::cos(heading), speed * std::sin(heading), 0.0);
  return s;
}

std::vector<TrainingSample> generate_long_run(const Config& cfg, GaitKind gait,
                                              std::uint64_t seed,
                                              std::uint64_t run,
                                              std::uint64_t* attempted,
                                              std::uint64_t* dropped) {
  const GaitConfig& gcfg = cfg.gait(gait);
  const double dt = cfg.model.dt;
  const long n_long = cycle_steps(cfg.data.long_cycles, gcfg, dt);
  const long n_short = cycle_steps(cfg.data.short_cycles, gcfg, dt);
  const long n_sample = cycle_steps(cfg.data.sample_cycles, gcfg, dt);

  const LongRunSetup setup = sample_long_run(cfg.data, cfg.cost.height, seed, run);
  const GaitSchedule schedule =
      build_schedule(setup.x0, setup.v_cmd, gcfg, n_long * dt, dt);

  const ilqr::Solver solver(cfg.ilqr);
  const CentroidalProblem long_problem = make_problem(cfg, schedule, setup.v_cmd);
  const ilqr::SolveResult long_sol = solver.solve(
      long_problem, setup.x0.to_vector(), long_problem.gravity_compensation());

  std::vector<TrainingSample> out;
  out.reserve(n_sample);
  for (long k = 0; k < n_sample; ++k) {
    ++*attempted;
    const CentroidalProblem problem =
        make_problem(cfg, schedule.slice(k, n_short), setup.v_cmd);
    std::vector<ilqr::VectorXd> warm(long_sol.traj.us.begin() + k,
                                     long_sol.traj.us.begin() + k + n_short);
    const ilqr::SolveResult sol =
        solver.solve(problem, long_sol.traj.xs[k], warm);
    if (!sol.converged || sol.expansions.size() < 2) {
      ++*dropped;
      continue;
    }

    const CentroidalState x_now = CentroidalState::from_vector(sol.traj.xs[0]);
    const Vec12 x_next = sol.traj.xs[1];
    const Vec6 s_next = x_now.position() + dt * x_now.velocity();
    const ReducedExpansion red = reduce_expansion(
        sol.expansions[1].V_x, sol.expansions[1].V_xx, x_next, s_next);

    TrainingSample sample;
    sample.run = run;
    sample.step = static_cast<std::uint64_t>(k);
    sample.features = featurize(x_now, schedule.contacts[k], schedule.points[k],
                                schedule.contact_times[k], setup.v_cmd);
    sample.target = red.to_target();
    if (!sample.features.allFinite() || !sample.target.allFinite()) {
      ++*dropped;
      continue;
    }
    out.push_back(sample);
  }
  return out;
}

Dataset generate(const Config& cfg, const GenerateOptions& opt,
                 GenerateSummary* summary) {
  if (opt.count_long < 1)
    throw Error(ErrorCode::kInvalidArgument, "gen-data: count_long must be >= 1");
  cfg.data.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const int workers = std::max(1, std::min(opt.workers, opt.count_long));
  std::atomic<int> next{0};
  std::atomic<int> finished{0};
  std::mutex mu;
  Dataset ds;
  ds.gait = opt.gait;
  ds.config_hash = cfg.data_hash(opt.gait);
  ds.seed = opt.seed;
  ds.count_long = static_cast<std::uint64_t>(opt.count_long);
  std::exception_ptr failure;

  auto work = [&]() {
    for (;;) {
      const int run = next.fetch_add(1);
      if (run >= opt.count_long) return;
      std::uint64_t attempted = 0, dropped = 0;
      std::vector<TrainingSample> samples;
      try {
        samples = generate_long_run(cfg, opt.gait, opt.seed,
                                    static_cast<std::uint64_t>(run), &attempted,
                                    &dropped);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(opt.count_long);
        return;
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        ds.attempted += attempted;
        ds.dropped += dropped;
        ds.samples.insert(ds.samples.end(), samples.begin(), samples.end());
        const int done = ++finished;
        if (opt.progress) opt.progress(done, opt.count_long);
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ds.sort_canonical();
  ds.compute_stats();

  const double accepted =
      ds.attempted ? static_cast<double>(ds.attempted - ds.dropped) / ds.attempted
                   : 0.0;
  if (summary) {
    summary->samples = ds.samples.size();
    summary->attempted = ds.attempted;
    summary->dropped = ds.dropped;
    summary->wall_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
  }
  if (accepted < cfg.data.min_yield) {
    std::ostringstream os;
    os << "gen-data: yield " << accepted << " below minimum " << cfg.data.min_yield
       << " (" << ds.dropped << " of " << ds.attempted << " short solves dropped)";
    throw Error(ErrorCode::kYield, os.str());
  }
  return ds;
}

}  // namespace vfqp
