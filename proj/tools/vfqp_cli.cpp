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

// Command-line front end; talks to the library only through vfqp.h.

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vfqp/vfqp.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitFall = 3;

struct CliError {
  vfqp_status status;
};

void check(vfqp_status s, const char* what) {
  if (s == VFQP_OK) return;
  std::fprintf(stderr, "vfqp: %s: %s (%s)\n", what, vfqp_last_error(),
               vfqp_status_string(s));
  throw CliError{s};
}

template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Destroy(p); }
};

using ConfigHandle = Handle<vfqp_config, vfqp_config_destroy>;
using DatasetHandle = Handle<vfqp_dataset, vfqp_dataset_destroy>;
using ModelHandle = Handle<vfqp_model, vfqp_model_destroy>;
using RunlogHandle = Handle<vfqp_runlog, vfqp_runlog_destroy>;

std::vector<double> parse_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw CLI::ValidationError("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// "x,y[,z]" -> 3-vector
std::vector<double> parse_vec3(const std::string& text) {
  std::vector<double> v = parse_numbers(text, ',');
  if (v.size() < 1 || v.size() > 3) throw CLI::ValidationError("expected x[,y[,z]]");
  v.resize(3, 0.0);
  return v;
}

struct Globals {
  std::string config;
  std::vector<std::string> sets;
  long long seed = -1;
};

void load_config(const Globals& g, ConfigHandle& cfg) {
  if (g.config.empty()) {
    check(vfqp_config_create(&cfg.p), "config");
  } else {
    check(vfqp_config_load(g.config.c_str(), &cfg.p), "config");
  }
  for (const std::string& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--set expects key=value, got '" + kv + "'");
    check(vfqp_config_set(cfg.p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()),
          "config");
  }
}

std::uint64_t seed_or(const Globals& g, std::uint64_t fallback) {
  return g.seed >= 0 ? static_cast<std::uint64_t>(g.seed) : fallback;
}

void print_metrics(const char* label, const vfqp_metrics& m) {
  std::printf(
      "%s fallen=%d fall_time=%.6g ticks=%d steady_ticks=%d mean_error_xy=%.6g "
      "mean_error_x=%.6g min_fz=%.6g max_fz=%.6g constraint_violation=%.3g\n",
      label, m.fallen, m.fall_time, m.ticks, m.steady_ticks, m.mean_error_xy,
      m.mean_error_x, m.min_fz, m.max_fz, m.constraint_violation);
}

void on_progress(int done, int total, void*) {
  std::fprintf(stderr, "gen-data: %d/%d long runs\n", done, total);
}

void on_epoch(int epoch, double train_l1, double val_l1, void* user) {
  const int every = *static_cast<const int*>(user);
  if (every > 0 && (epoch % every == 0 || epoch == 1))
    std::fprintf(stderr, "train: epoch %d train_l1=%.6g val_l1=%.6g\n", epoch,
                 train_l1, val_l1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vfqp: value-function QP locomotion toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "INI configuration file");
  app.add_option("--set", g.sets, "Override a config value, key=value (repeatable)");
  app.add_option("--seed", g.seed, "Random seed");
  app.set_version_flag("--version", std::string(vfqp_version()));

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a training dataset");
  std::string gen_gait = "trot", gen_out;
  int gen_count = 64, gen_workers = 1;
  gen->add_option("--gait", gen_gait, "trot or bound")->capture_default_str();
  gen->add_option("--count-long", gen_count, "Number of long trajectories")
      ->capture_default_str();
  gen->add_option("--workers", gen_workers, "Worker threads")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "Output dataset file")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train the value network");
  std::string tr_data, tr_out, tr_loss;
  int tr_epochs = 0, tr_batch = 0, tr_log_every = 16;
  double tr_lr = 0.0;
  tr->add_option("--data", tr_data, "Dataset file")->required();
  tr->add_option("-o,--out", tr_out, "Output model file")->required();
  tr->add_option("--loss-csv", tr_loss, "Write loss curves to this CSV");
  tr->add_option("--epochs", tr_epochs, "Override train.epochs");
  tr->add_option("--batch", tr_batch, "Override train.batch");
  tr->add_option("--lr", tr_lr, "Override train.lr");
  tr->add_option("--log-every", tr_log_every, "Progress interval in epochs (0: quiet)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Closed-loop simulation");
  std::string sim_model, sim_gait, sim_out, sim_predictor = "net", sim_vcmd = "0";
  std::vector<std::string> sim_segments, sim_impulses;
  double sim_duration = 0.0, sim_rate = 0.0, sim_noise = -1.0;
  bool sim_ablation = false, sim_timing = false, sim_assert = false;
  sim->add_option("--model", sim_model, "Model file");
  sim->add_option("--gait", sim_gait, "trot, bound or stand (default: model gait)");
  sim->add_option("--predictor", sim_predictor, "net, standing or ilqr")
      ->check(CLI::IsMember({"net", "standing", "ilqr"}))
      ->capture_default_str();
  sim->add_option("--vcmd", sim_vcmd, "Constant command vx[,vy[,vz]]");
  sim->add_option("--segment", sim_segments,
                  "Command change t:vx[,vy[,vz]] (repeatable, overrides --vcmd)");
  sim->add_option("--impulse", sim_impulses,
                  "Velocity impulse t:dvx,dvy,dvz[,dwx,dwy,dwz] (repeatable)");
  sim->add_option("--duration", sim_duration, "Seconds (default: config)");
  sim->add_option("--prediction-rate", sim_rate, "Hz (default: config)");
  sim->add_option("--noise", sim_noise, "Observation noise std (default: config)");
  sim->add_flag("--ablation", sim_ablation, "Drop friction and force bounds");
  sim->add_flag("--timing", sim_timing, "Log wall-clock QP times");
  sim->add_option("-o,--out", sim_out, "Run log CSV");
  sim->add_flag("--assert-stable", sim_assert, "Exit nonzero on a fall");

  // experiment
  auto* ex = app.add_subcommand("experiment", "Run an experiment driver");
  std::string ex_name, ex_out;
  std::vector<std::string> ex_models;
  std::string ex_vels;
  int ex_workers = 1;
  double ex_sweep_v = 0.3;
  bool ex_assert = false;
  ex->add_option("name", ex_name, "velocity-tracking, frequency-sweep, constraint-ablation")
      ->required()
      ->check(CLI::IsMember({"velocity-tracking", "frequency-sweep", "constraint-ablation"}));
  ex->add_option("--model", ex_models, "Model file (repeatable, one per gait)")->required();
  ex->add_option("--out-dir", ex_out, "Directory for CSV outputs")->required();
  ex->add_option("--velocities", ex_vels, "Comma-separated v_cmd values");
  ex->add_option("--sweep-velocity", ex_sweep_v, "Command for sweep/ablation runs")
      ->capture_default_str();
  ex->add_option("--workers", ex_workers, "Parallel runs")->capture_default_str();
  ex->add_flag("--assert-stable", ex_assert, "Exit nonzero if any run falls");

  // dump-schedule
  auto* ds = app.add_subcommand("dump-schedule", "Write a contact schedule CSV");
  std::string ds_gait = "trot", ds_vcmd = "0", ds_out;
  double ds_duration = 1.28;
  ds->add_option("--gait", ds_gait, "trot, bound or stand")->capture_default_str();
  ds->add_option("--vcmd", ds_vcmd, "vx[,vy[,vz]]")->capture_default_str();
  ds->add_option("--duration", ds_duration, "Seconds")->capture_default_str();
  ds->add_option("-o,--out", ds_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigHandle cfg;
    load_config(g, cfg);

    if (*gen) {
      vfqp_generate_options opt;
      vfqp_generate_options_init(&opt);
      opt.gait = gen_gait.c_str();
      opt.count_long = gen_count;
      opt.seed = seed_or(g, 1);
      opt.workers = gen_workers;
      opt.progress = on_progress;
      DatasetHandle d;
      vfqp_generate_summary s{};
      check(vfqp_dataset_generate(cfg.p, &opt, &d.p, &s), "gen-data");
      check(vfqp_dataset_save(d.p, gen_out.c_str()), "gen-data");
      const double drop = s.attempted ? static_cast<double>(s.dropped) / s.attempted : 0.0;
      std::printf("gen-data samples=%llu attempted=%llu dropped=%llu drop_rate=%.6g "
                  "wall_seconds=%.3f\n",
                  static_cast<unsigned long long>(s.samples),
                  static_cast<unsigned long long>(s.attempted),
                  static_cast<unsigned long long>(s.dropped), drop, s.wall_seconds);
      return 0;
    }

    if (*tr) {
      if (tr_epochs > 0)
        check(vfqp_config_set(cfg.p, "train.epochs", std::to_string(tr_epochs).c_str()), "train");
      if (tr_batch > 0)
        check(vfqp_config_set(cfg.p, "train.batch", std::to_string(tr_batch).c_str()), "train");
      if (tr_lr > 0.0) {
        std::ostringstream os;
        os.precision(17);
        os << tr_lr;
        check(vfqp_config_set(cfg.p, "train.lr", os.str().c_str()), "train");
      }
      if (g.seed >= 0)
        check(vfqp_config_set(cfg.p, "train.seed", std::to_string(g.seed).c_str()), "train");
      DatasetHandle d;
      int mismatch = 0;
      check(vfqp_dataset_load(tr_data.c_str(), cfg.p, &d.p, &mismatch), "train");
      if (mismatch)
        std::fprintf(stderr, "train: warning: dataset was generated under a different "
                             "data configuration\n");
      ModelHandle m;
      vfqp_train_summary s{};
      check(vfqp_train(cfg.p, d.p, on_epoch, &tr_log_every, &m.p, &s), "train");
      check(vfqp_model_save(m.p, tr_out.c_str()), "train");
      if (!tr_loss.empty()) check(vfqp_model_write_loss_csv(m.p, tr_loss.c_str()), "train");
      std::printf("train epochs=%d train_samples=%llu val_samples=%llu final_train_l1=%.6g "
                  "final_val_l1=%.6g baseline_val_l1=%.6g\n",
                  s.epochs, static_cast<unsigned long long>(s.train_samples),
                  static_cast<unsigned long long>(s.val_samples), s.final_train_l1,
                  s.final_val_l1, s.baseline_val_l1);
      return 0;
    }

    if (*sim) {
      vfqp_sim_options opt;
      vfqp_sim_options_init(&opt);
      ModelHandle m;
      if (!sim_model.empty()) check(vfqp_model_load(sim_model.c_str(), &m.p), "simulate");
      opt.predictor = sim_predictor == "standing" ? VFQP_PREDICTOR_STANDING
                      : sim_predictor == "ilqr"   ? VFQP_PREDICTOR_ILQR
                                                  : VFQP_PREDICTOR_NET;
      if (!sim_gait.empty()) opt.gait = sim_gait.c_str();
      opt.duration = sim_duration;
      opt.prediction_rate = sim_rate;
      opt.obs_noise_std = sim_noise;
      opt.ablation = sim_ablation;
      opt.record_timing = sim_timing;
      opt.seed = seed_or(g, 1);

      std::vector<vfqp_segment> segs;
      if (sim_segments.empty()) {
        const auto v = parse_vec3(sim_vcmd);
        segs.push_back({0.0, {v[0], v[1], v[2]}});
      }
      for (const std::string& s : sim_segments) {
        const auto colon = s.find(':');
        if (colon == std::string::npos)
          throw CLI::ValidationError("--segment expects t:vx[,vy[,vz]]");
        const auto v = parse_vec3(s.substr(colon + 1));
        segs.push_back({std::stod(s.substr(0, colon)), {v[0], v[1], v[2]}});
      }
      std::vector<vfqp_impulse> imps;
      for (const std::string& s : sim_impulses) {
        const auto colon = s.find(':');
        if (colon == std::string::npos)
          throw CLI::ValidationError("--impulse expects t:dvx,dvy,dvz[,...]");
        std::vector<double> dv = parse_numbers(s.substr(colon + 1), ',');
        if (dv.empty() || dv.size() > 6)
          throw CLI::ValidationError("--impulse takes 1 to 6 components");
        dv.resize(6, 0.0);
        vfqp_impulse imp{};
        imp.time = std::stod(s.substr(0, colon));
        for (int i = 0; i < 6; ++i) imp.dv[i] = dv[i];
        imps.push_back(imp);
      }
      opt.segments = segs.data();
      opt.n_segments = segs.size();
      opt.impulses = imps.data();
      opt.n_impulses = imps.size();

      RunlogHandle log;
      check(vfqp_simulate(cfg.p, m.p, &opt, &log.p), "simulate");
      if (!sim_out.empty()) check(vfqp_runlog_write_csv(log.p, sim_out.c_str()), "simulate");
      vfqp_metrics met{};
      check(vfqp_runlog_metrics(log.p, &met), "simulate");
      print_metrics("simulate", met);
      if (met.fallen) std::fprintf(stderr, "simulate: fall: %s\n", vfqp_runlog_fall_reason(log.p));
      return sim_assert && met.fallen ? kExitFall : 0;
    }

    if (*ex) {
      std::vector<ModelHandle> handles(ex_models.size());
      std::vector<const vfqp_model*> models;
      for (std::size_t i = 0; i < ex_models.size(); ++i) {
        check(vfqp_model_load(ex_models[i].c_str(), &handles[i].p), "experiment");
        models.push_back(handles[i].p);
      }
      vfqp_experiment_options opt;
      vfqp_experiment_options_init(&opt);
      opt.out_dir = ex_out.c_str();
      opt.workers = ex_workers;
      opt.sweep_velocity = ex_sweep_v;
      opt.seed = seed_or(g, 1);
      std::vector<double> vels;
      if (!ex_vels.empty()) {
        vels = parse_numbers(ex_vels, ',');
        opt.velocities = vels.data();
        opt.n_velocities = vels.size();
      }
      std::size_t n = 0;
      check(vfqp_experiment(cfg.p, ex_name.c_str(), models.data(), models.size(), &opt,
                            nullptr, 0, &n),
            "experiment");
      std::vector<vfqp_experiment_row> rows(n);
      check(vfqp_experiment(cfg.p, ex_name.c_str(), models.data(), models.size(), &opt,
                            rows.data(), rows.size(), &n),
            "experiment");
      bool any_fall = false;
      for (const auto& r : rows) {
        print_metrics(r.label, r.metrics);
        any_fall = any_fall || r.metrics.fallen;
      }
      return ex_assert && any_fall ? kExitFall : 0;
    }

    if (*ds) {
      const auto v = parse_vec3(ds_vcmd);
      check(vfqp_dump_schedule(cfg.p, ds_gait.c_str(), v.data(), ds_duration, ds_out.c_str()),
            "dump-schedule");
      return 0;
    }
  } catch (const CliError&) {
    return kExitError;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "vfqp: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vfqp: %s\n", e.what());
    return kExitError;
  }
  return 0;
}
