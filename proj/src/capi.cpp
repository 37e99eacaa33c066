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

#include "vfqp/vfqp.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "vfqp/config.hpp"
#include "vfqp/dataset.hpp"
#include "vfqp/gait.hpp"
#include "vfqp/mlp.hpp"
#include "vfqp/sim.hpp"

struct vfqp_config {
  vfqp::Config cfg;
};

struct vfqp_dataset {
  vfqp::Dataset ds;
};

struct vfqp_model {
  vfqp::ValueNet net;
  std::vector<vfqp::EpochLoss> curve;
};

struct vfqp_runlog {
  vfqp::RunLog log;
  vfqp::TrackingMetrics metrics;
};

namespace {

thread_local std::string g_last_error;

vfqp_status to_status(vfqp::ErrorCode c) {
  switch (c) {
    case vfqp::ErrorCode::kOk: return VFQP_OK;
    case vfqp::ErrorCode::kInvalidArgument: return VFQP_ERR_INVALID_ARGUMENT;
    case vfqp::ErrorCode::kNonFinite: return VFQP_ERR_NON_FINITE;
    case vfqp::ErrorCode::kIo: return VFQP_ERR_IO;
    case vfqp::ErrorCode::kFormat: return VFQP_ERR_FORMAT;
    case vfqp::ErrorCode::kCorrupt: return VFQP_ERR_CORRUPT;
    case vfqp::ErrorCode::kDimMismatch: return VFQP_ERR_DIM_MISMATCH;
    case vfqp::ErrorCode::kSolverFailure: return VFQP_ERR_SOLVER;
    case vfqp::ErrorCode::kNumerical: return VFQP_ERR_NUMERICAL;
    case vfqp::ErrorCode::kYield: return VFQP_ERR_YIELD;
  }
  return VFQP_ERR_INTERNAL;
}

vfqp_status fail(vfqp_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
vfqp_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VFQP_OK;
  } catch (const vfqp::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VFQP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VFQP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VFQP_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw vfqp::Error(vfqp::ErrorCode::kInvalidArgument, what);
}

vfqp_metrics to_c(const vfqp::RunLog& log, const vfqp::TrackingMetrics& m) {
  vfqp_metrics out{};
  out.ticks = log.ticks();
  out.fallen = log.fallen ? 1 : 0;
  out.fall_time = log.fall_time;
  out.steady_ticks = m.steady_ticks;
  out.mean_error_xy = m.mean_error_xy;
  out.mean_error_x = m.mean_error_x;
  out.mean_abs_vx = m.mean_abs_vx;
  out.min_fz = m.min_fz;
  out.max_fz = m.max_fz;
  out.constraint_violation = m.constraint_violation;
  return out;
}

void copy_str(char* dst, std::size_t cap, const std::string& s) {
  const std::size_t n = std::min(cap - 1, s.size());
  std::memcpy(dst, s.data(), n);
  dst[n] = '\0';
}

std::ofstream open_out(const char* path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw vfqp::Error(vfqp::ErrorCode::kIo, std::string("cannot write ") + path);
  return f;
}

}  // namespace

extern "C" {

const char* vfqp_version(void) { return "0.1.0"; }

const char* vfqp_last_error(void) { return g_last_error.c_str(); }

const char* vfqp_status_string(vfqp_status s) {
  switch (s) {
    case VFQP_OK: return "ok";
    case VFQP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case VFQP_ERR_NON_FINITE: return "non-finite value";
    case VFQP_ERR_IO: return "i/o error";
    case VFQP_ERR_FORMAT: return "format error";
    case VFQP_ERR_CORRUPT: return "corrupt data";
    case VFQP_ERR_DIM_MISMATCH: return "dimension mismatch";
    case VFQP_ERR_SOLVER: return "solver failure";
    case VFQP_ERR_NUMERICAL: return "numerical failure";
    case VFQP_ERR_YIELD: return "insufficient yield";
    case VFQP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

vfqp_status vfqp_config_create(vfqp_config** out) {
  return guarded([&] {
    require(out, "config_create: out is NULL");
    *out = new vfqp_config{};
  });
}

vfqp_status vfqp_config_load(const char* path, vfqp_config** out) {
  return guarded([&] {
    require(path && out, "config_load: NULL argument");
    auto c = std::make_unique<vfqp_config>();
    c->cfg = vfqp::Config::load(path);
    *out = c.release();
  });
}

vfqp_status vfqp_config_set(vfqp_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg && key && value, "config_set: NULL argument");
    vfqp::Config next = cfg->cfg;
    next.set(key, value);
    next.validate();
    cfg->cfg = next;
  });
}

vfqp_status vfqp_config_data_hash(const vfqp_config* cfg, const char* gait,
                                  uint64_t* out) {
  return guarded([&] {
    require(cfg && gait && out, "config_data_hash: NULL argument");
    *out = cfg->cfg.data_hash(vfqp::parse_gait_kind(gait));
  });
}

void vfqp_config_destroy(vfqp_config* cfg) { delete cfg; }

void vfqp_generate_options_init(vfqp_generate_options* opt) {
  if (!opt) return;
  *opt = vfqp_generate_options{};
  opt->gait = "trot";
  opt->count_long = 64;
  opt->seed = 1;
  opt->workers = 1;
}

vfqp_status vfqp_dataset_generate(const vfqp_config* cfg,
                                  const vfqp_generate_options* opt,
                                  vfqp_dataset** out,
                                  vfqp_generate_summary* summary) {
  return guarded([&] {
    require(cfg && opt && out, "dataset_generate: NULL argument");
    require(opt->gait, "dataset_generate: gait is NULL");
    vfqp::GenerateOptions g;
    g.gait = vfqp::parse_gait_kind(opt->gait);
    require(g.gait != vfqp::GaitKind::kStand,
            "dataset_generate: gait must be trot or bound");
    g.count_long = opt->count_long;
    g.seed = opt->seed;
    g.workers = opt->workers;
    if (opt->progress) {
      const vfqp_progress_fn fn = opt->progress;
      void* user = opt->user;
      g.progress = [fn, user](int done, int total) { fn(done, total, user); };
    }
    vfqp::GenerateSummary s;
    auto d = std::make_unique<vfqp_dataset>();
    d->ds = vfqp::generate(cfg->cfg, g, &s);
    if (summary) {
      summary->samples = s.samples;
      summary->attempted = s.attempted;
      summary->dropped = s.dropped;
      summary->wall_seconds = s.wall_seconds;
    }
    *out = d.release();
  });
}

vfqp_status vfqp_dataset_save(const vfqp_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds && path, "dataset_save: NULL argument");
    vfqp::save_dataset(ds->ds, path);
  });
}

vfqp_status vfqp_dataset_load(const char* path, const vfqp_config* cfg,
                              vfqp_dataset** out, int* mismatch) {
  return guarded([&] {
    require(path && out, "dataset_load: NULL argument");
    auto d = std::make_unique<vfqp_dataset>();
    d->ds = vfqp::load_dataset(path);
    if (cfg) {
      d->ds.config_mismatch = d->ds.config_hash != cfg->cfg.data_hash(d->ds.gait);
    }
    if (mismatch) *mismatch = d->ds.config_mismatch ? 1 : 0;
    *out = d.release();
  });
}

vfqp_status vfqp_dataset_size(const vfqp_dataset* ds, uint64_t* out) {
  return guarded([&] {
    require(ds && out, "dataset_size: NULL argument");
    *out = ds->ds.samples.size();
  });
}

vfqp_status vfqp_dataset_sample(const vfqp_dataset* ds, uint64_t i,
                                double* features, double* target) {
  return guarded([&] {
    require(ds, "dataset_sample: NULL dataset");
    require(i < ds->ds.samples.size(), "dataset_sample: index out of range");
    const auto& s = ds->ds.samples[i];
    if (features) std::memcpy(features, s.features.data(), sizeof(double) * VFQP_FEATURE_DIM);
    if (target) std::memcpy(target, s.target.data(), sizeof(double) * VFQP_TARGET_DIM);
  });
}

void vfqp_dataset_destroy(vfqp_dataset* ds) { delete ds; }

vfqp_status vfqp_train(const vfqp_config* cfg, const vfqp_dataset* ds,
                       vfqp_epoch_fn on_epoch, void* user, vfqp_model** out,
                       vfqp_train_summary* summary) {
  return guarded([&] {
    require(cfg && ds && out, "train: NULL argument");
    vfqp::EpochCallback cb;
    if (on_epoch)
      cb = [on_epoch, user](const vfqp::EpochLoss& e) {
        on_epoch(e.epoch, e.train_l1, e.val_l1, user);
      };
    vfqp::TrainResult r = vfqp::train(ds->ds, cfg->cfg.train, cb);
    if (summary) {
      summary->epochs = static_cast<int>(r.curve.size());
      summary->final_train_l1 = r.curve.back().train_l1;
      summary->final_val_l1 = r.curve.back().val_l1;
      summary->baseline_val_l1 = r.baseline_val_l1;
      summary->train_samples = r.train_idx.size();
      summary->val_samples = r.val_idx.size();
    }
    auto m = std::make_unique<vfqp_model>();
    m->net = std::move(r.net);
    m->curve = std::move(r.curve);
    *out = m.release();
  });
}

vfqp_status vfqp_model_save(const vfqp_model* m, const char* path) {
  return guarded([&] {
    require(m && path, "model_save: NULL argument");
    vfqp::save_model(m->net, path);
  });
}

vfqp_status vfqp_model_load(const char* path, vfqp_model** out) {
  return guarded([&] {
    require(path && out, "model_load: NULL argument");
    auto m = std::make_unique<vfqp_model>();
    m->net = vfqp::load_model(path);
    *out = m.release();
  });
}

vfqp_status vfqp_model_write_loss_csv(const vfqp_model* m, const char* path) {
  return guarded([&] {
    require(m && path, "model_write_loss_csv: NULL argument");
    std::ofstream f = open_out(path);
    vfqp::write_loss_csv(m->curve, f);
  });
}

vfqp_status vfqp_model_predict(const vfqp_model* m, const double* features,
                               double* g, double* H) {
  return guarded([&] {
    require(m && features && g && H, "model_predict: NULL argument");
    const vfqp::FeatureVector phi = Eigen::Map<const vfqp::FeatureVector>(features);
    const vfqp::ReducedExpansion e = vfqp::predict_expansion(m->net, phi);
    for (int i = 0; i < 6; ++i) g[i] = e.g[i];
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) H[6 * i + j] = e.H(i, j);
  });
}

void vfqp_model_destroy(vfqp_model* m) { delete m; }

void vfqp_sim_options_init(vfqp_sim_options* opt) {
  if (!opt) return;
  *opt = vfqp_sim_options{};
  opt->predictor = VFQP_PREDICTOR_NET;
  opt->obs_noise_std = -1.0;
  opt->seed = 1;
}

vfqp_status vfqp_simulate(const vfqp_config* cfg, const vfqp_model* model,
                          const vfqp_sim_options* opt, vfqp_runlog** out) {
  return guarded([&] {
    require(cfg && opt && out, "simulate: NULL argument");
    require(opt->predictor != VFQP_PREDICTOR_NET || model,
            "simulate: the learned predictor needs a model");
    const vfqp::Config& c = cfg->cfg;

    vfqp::SimConfig sim;
    if (opt->gait) {
      sim.gait = vfqp::parse_gait_kind(opt->gait);
    } else if (opt->predictor == VFQP_PREDICTOR_STANDING) {
      sim.gait = vfqp::GaitKind::kStand;
    } else {
      require(model, "simulate: gait or model required");
      sim.gait = model->net.gait;
    }
    sim.params = c.sim;
    if (opt->duration > 0.0) sim.params.duration = opt->duration;
    if (opt->prediction_rate > 0.0) sim.params.prediction_rate = opt->prediction_rate;
    if (opt->obs_noise_std >= 0.0) sim.params.obs_noise_std = opt->obs_noise_std;
    require(opt->n_segments == 0 || opt->segments, "simulate: segments is NULL");
    require(opt->n_impulses == 0 || opt->impulses, "simulate: impulses is NULL");
    for (std::size_t i = 0; i < opt->n_segments; ++i) {
      const vfqp_segment& s = opt->segments[i];
      sim.segments.push_back({s.t_start, vfqp::Vec3(s.v_cmd[0], s.v_cmd[1], s.v_cmd[2])});
    }
    for (std::size_t i = 0; i < opt->n_impulses; ++i) {
      vfqp::Impulse imp;
      imp.time = opt->impulses[i].time;
      imp.dv = Eigen::Map<const vfqp::Vec6>(opt->impulses[i].dv);
      sim.impulses.push_back(imp);
    }
    sim.ablation = opt->ablation != 0;
    sim.record_timing = opt->record_timing != 0;
    sim.seed = opt->seed;

    std::unique_ptr<vfqp::ValuePredictor> pred;
    switch (opt->predictor) {
      case VFQP_PREDICTOR_NET:
        pred = std::make_unique<vfqp::NetPredictor>(model->net);
        break;
      case VFQP_PREDICTOR_STANDING:
        pred = vfqp::standing_predictor(c);
        break;
      case VFQP_PREDICTOR_ILQR:
        pred = std::make_unique<vfqp::IlqrPredictor>(c, sim.gait);
        break;
      default:
        require(false, "simulate: unknown predictor");
    }
    auto r = std::make_unique<vfqp_runlog>();
    r->log = vfqp::run(c, *pred, sim);
    r->metrics = vfqp::evaluate(r->log, sim.params, c.qp);
    *out = r.release();
  });
}

vfqp_status vfqp_runlog_metrics(const vfqp_runlog* log, vfqp_metrics* out) {
  return guarded([&] {
    require(log && out, "runlog_metrics: NULL argument");
    *out = to_c(log->log, log->metrics);
  });
}

const char* vfqp_runlog_fall_reason(const vfqp_runlog* log) {
  return log ? log->log.fall_reason.c_str() : "";
}

vfqp_status vfqp_runlog_write_csv(const vfqp_runlog* log, const char* path) {
  return guarded([&] {
    require(log && path, "runlog_write_csv: NULL argument");
    std::ofstream f = open_out(path);
    vfqp::write_runlog_csv(log->log, f);
  });
}

void vfqp_runlog_destroy(vfqp_runlog* log) { delete log; }

void vfqp_experiment_options_init(vfqp_experiment_options* opt) {
  if (!opt) return;
  *opt = vfqp_experiment_options{};
  opt->workers = 1;
  opt->sweep_velocity = 0.3;
  opt->seed = 1;
}

vfqp_status vfqp_experiment(const vfqp_config* cfg, const char* name,
                            const vfqp_model* const* models, size_t n_models,
                            const vfqp_experiment_options* opt,
                            vfqp_experiment_row* rows, size_t capacity,
                            size_t* n_rows) {
  return guarded([&] {
    require(cfg && name && opt, "experiment: NULL argument");
    require(n_models == 0 || models, "experiment: models is NULL");
    std::vector<vfqp::ExperimentModel> ms;
    for (std::size_t i = 0; i < n_models; ++i) {
      require(models[i], "experiment: NULL model");
      ms.push_back({models[i]->net.gait, &models[i]->net});
    }
    vfqp::ExperimentOptions eo;
    eo.workers = opt->workers;
    if (opt->velocities) {
      eo.velocities.assign(opt->velocities, opt->velocities + opt->n_velocities);
    }
    eo.sweep_velocity = opt->sweep_velocity;
    eo.seed = opt->seed;
    const vfqp::ExperimentResult res = vfqp::run_experiment(name, cfg->cfg, ms, eo);
    if (opt->out_dir) vfqp::write_experiment(res, opt->out_dir);
    if (n_rows) *n_rows = res.rows.size();
    for (std::size_t i = 0; i < res.rows.size() && rows && i < capacity; ++i) {
      const vfqp::ExperimentRow& r = res.rows[i];
      vfqp_experiment_row& o = rows[i];
      o = vfqp_experiment_row{};
      copy_str(o.label, sizeof(o.label), r.label);
      copy_str(o.gait, sizeof(o.gait), vfqp::to_string(r.gait));
      o.v_cmd_x = r.v_cmd_x;
      o.prediction_rate = r.prediction_rate;
      o.constrained = r.constrained ? 1 : 0;
      o.metrics = to_c(res.logs[i], r.metrics);
    }
  });
}

vfqp_status vfqp_dump_schedule(const vfqp_config* cfg, const char* gait,
                               const double* v_cmd, double duration,
                               const char* path) {
  return guarded([&] {
    require(cfg && gait && path, "dump_schedule: NULL argument");
    const vfqp::Config& c = cfg->cfg;
    vfqp::CentroidalState x0;
    x0.c = vfqp::Vec3(0.0, 0.0, c.cost.height);
    const vfqp::Vec3 v = v_cmd ? vfqp::Vec3(v_cmd[0], v_cmd[1], v_cmd[2])
                               : vfqp::Vec3::Zero();
    const vfqp::GaitSchedule s = vfqp::build_schedule(
        x0, v, c.gait(vfqp::parse_gait_kind(gait)), duration, c.model.dt);
    std::ofstream f = open_out(path);
    s.write_csv(f);
  });
}

}  // extern "C"
