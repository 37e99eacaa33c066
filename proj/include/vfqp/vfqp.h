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

#ifndef VFQP_VFQP_H_
#define VFQP_VFQP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(VFQP_BUILDING_LIBRARY)
#define VFQP_API __attribute__((visibility("default")))
#else
#define VFQP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns VFQP_OK or an error code; vfqp_last_error() then holds
 * a message for the calling thread. Handles are owned by the caller and
 * released with the matching _destroy (NULL is accepted). */

typedef enum vfqp_status {
  VFQP_OK = 0,
  VFQP_ERR_INVALID_ARGUMENT = 1,
  VFQP_ERR_NON_FINITE = 2,
  VFQP_ERR_IO = 3,
  VFQP_ERR_FORMAT = 4,
  VFQP_ERR_CORRUPT = 5,
  VFQP_ERR_DIM_MISMATCH = 6,
  VFQP_ERR_SOLVER = 7,
  VFQP_ERR_NUMERICAL = 8,
  VFQP_ERR_YIELD = 9,
  VFQP_ERR_INTERNAL = 100
} vfqp_status;

typedef struct vfqp_config vfqp_config;
typedef struct vfqp_dataset vfqp_dataset;
typedef struct vfqp_model vfqp_model;
typedef struct vfqp_runlog vfqp_runlog;

enum { VFQP_FEATURE_DIM = 33, VFQP_TARGET_DIM = 42 };

VFQP_API const char* vfqp_version(void);
VFQP_API const char* vfqp_last_error(void);
VFQP_API const char* vfqp_status_string(vfqp_status s);

/* Configuration */
VFQP_API vfqp_status vfqp_config_create(vfqp_config** out);
VFQP_API vfqp_status vfqp_config_load(const char* path, vfqp_config** out);
/* Dotted key such as "train.epochs". */
VFQP_API vfqp_status vfqp_config_set(vfqp_config* cfg, const char* key,
                                     const char* value);
VFQP_API vfqp_status vfqp_config_data_hash(const vfqp_config* cfg,
                                           const char* gait, uint64_t* out);
VFQP_API void vfqp_config_destroy(vfqp_config* cfg);

/* Data generation */
typedef void (*vfqp_progress_fn)(int done, int total, void* user);

typedef struct vfqp_generate_options {
  const char* gait; /* "trot" or "bound" */
  int count_long;
  uint64_t seed;
  int workers;
  vfqp_progress_fn progress; /* may be NULL */
  void* user;
} vfqp_generate_options;

typedef struct vfqp_generate_summary {
  uint64_t samples;
  uint64_t attempted;
  uint64_t dropped;
  double wall_seconds;
} vfqp_generate_summary;

VFQP_API void vfqp_generate_options_init(vfqp_generate_options* opt);
VFQP_API vfqp_status vfqp_dataset_generate(const vfqp_config* cfg,
                                           const vfqp_generate_options* opt,
                                           vfqp_dataset** out,
                                           vfqp_generate_summary* summary);
VFQP_API vfqp_status vfqp_dataset_save(const vfqp_dataset* ds, const char* path);
/* With cfg given, a dataset generated under a different data configuration
 * loads with *mismatch set to 1. cfg and mismatch may be NULL. */
VFQP_API vfqp_status vfqp_dataset_load(const char* path, const vfqp_config* cfg,
                                       vfqp_dataset** out, int* mismatch);
VFQP_API vfqp_status vfqp_dataset_size(const vfqp_dataset* ds, uint64_t* out);
VFQP_API vfqp_status vfqp_dataset_sample(const vfqp_dataset* ds, uint64_t i,
                                         double* features, double* target);
VFQP_API void vfqp_dataset_destroy(vfqp_dataset* ds);

/* Training */
typedef void (*vfqp_epoch_fn)(int epoch, double train_l1, double val_l1,
                              void* user);

typedef struct vfqp_train_summary {
  int epochs;
  double final_train_l1;
  double final_val_l1;
  double baseline_val_l1;
  uint64_t train_samples;
  uint64_t val_samples;
} vfqp_train_summary;

VFQP_API vfqp_status vfqp_train(const vfqp_config* cfg, const vfqp_dataset* ds,
                                vfqp_epoch_fn on_epoch, void* user,
                                vfqp_model** out, vfqp_train_summary* summary);
VFQP_API vfqp_status vfqp_model_save(const vfqp_model* m, const char* path);
VFQP_API vfqp_status vfqp_model_load(const char* path, vfqp_model** out);
/* Loss curve of the training call that produced m (empty after load). */
VFQP_API vfqp_status vfqp_model_write_loss_csv(const vfqp_model* m,
                                               const char* path);
/* g: 6 numbers, H: 36 numbers row-major, positive definite. */
VFQP_API vfqp_status vfqp_model_predict(const vfqp_model* m,
                                        const double* features, double* g,
                                        double* H);
VFQP_API void vfqp_model_destroy(vfqp_model* m);

/* Simulation */
typedef enum vfqp_predictor {
  VFQP_PREDICTOR_NET = 0,      /* learned model, required */
  VFQP_PREDICTOR_STANDING = 1, /* fixed expansion of the standing problem */
  VFQP_PREDICTOR_ILQR = 2      /* short iLQR solve at every refresh; slow */
} vfqp_predictor;

typedef struct vfqp_segment {
  double t_start;
  double v_cmd[3];
} vfqp_segment;

typedef struct vfqp_impulse {
  double time;
  double dv[6]; /* added to (c_dot, omega) */
} vfqp_impulse;

typedef struct vfqp_sim_options {
  const char* gait;       /* NULL: the model's gait */
  vfqp_predictor predictor;
  double duration;        /* <= 0: config value */
  double prediction_rate; /* <= 0: config value */
  double obs_noise_std;   /* < 0: config value */
  const vfqp_segment* segments;
  size_t n_segments;
  const vfqp_impulse* impulses;
  size_t n_impulses;
  int ablation;
  int record_timing; /* wall-clock QP times; breaks byte reproducibility */
  uint64_t seed;
} vfqp_sim_options;

typedef struct vfqp_metrics {
  int ticks;
  int fallen;
  double fall_time;
  int steady_ticks;
  double mean_error_xy;
  double mean_error_x;
  double mean_abs_vx;
  double min_fz;
  double max_fz;
  double constraint_violation;
} vfqp_metrics;

VFQP_API void vfqp_sim_options_init(vfqp_sim_options* opt);
/* model may be NULL unless predictor is VFQP_PREDICTOR_NET. */
VFQP_API vfqp_status vfqp_simulate(const vfqp_config* cfg, const vfqp_model* model,
                                   const vfqp_sim_options* opt, vfqp_runlog** out);
VFQP_API vfqp_status vfqp_runlog_metrics(const vfqp_runlog* log, vfqp_metrics* out);
/* Fall diagnostic, empty when the run completed. */
VFQP_API const char* vfqp_runlog_fall_reason(const vfqp_runlog* log);
VFQP_API vfqp_status vfqp_runlog_write_csv(const vfqp_runlog* log, const char* path);
VFQP_API void vfqp_runlog_destroy(vfqp_runlog* log);

/* Experiments: "velocity-tracking", "frequency-sweep", "constraint-ablation". */
typedef struct vfqp_experiment_options {
  const char* out_dir; /* NULL: no files */
  int workers;
  const double* velocities; /* NULL: 0, 0.3, -0.3 */
  size_t n_velocities;
  double sweep_velocity;
  uint64_t seed;
} vfqp_experiment_options;

typedef struct vfqp_experiment_row {
  char label[64];
  char gait[16];
  double v_cmd_x;
  double prediction_rate;
  int constrained;
  vfqp_metrics metrics;
} vfqp_experiment_row;

VFQP_API void vfqp_experiment_options_init(vfqp_experiment_options* opt);
/* Writes up to capacity rows; *n_rows receives the total row count. */
VFQP_API vfqp_status vfqp_experiment(const vfqp_config* cfg, const char* name,
                                     const vfqp_model* const* models,
                                     size_t n_models,
                                     const vfqp_experiment_options* opt,
                                     vfqp_experiment_row* rows, size_t capacity,
                                     size_t* n_rows);

/* Contact schedule CSV for inspection. */
VFQP_API vfqp_status vfqp_dump_schedule(const vfqp_config* cfg, const char* gait,
                                        const double* v_cmd, double duration,
                                        const char* path);

#ifdef __cplusplus
}
#endif

#endif /* VFQP_VFQP_H_ */
