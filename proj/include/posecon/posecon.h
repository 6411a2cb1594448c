// Copyright 2026 The posecon Authors. All Rights Reserved.
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

#ifndef POSECON_POSECON_H_
#define POSECON_POSECON_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PC_API __declspec(dllexport)
#else
#define PC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pc_status {
  PC_OK = 0,
  PC_ERR_INVALID_ARGUMENT = 1,
  PC_ERR_IO = 2,
  PC_ERR_PARSE = 3,
  PC_ERR_CONFIG = 4,
  PC_ERR_NUMERIC = 5,
  PC_ERR_SHAPE = 6,
  PC_ERR_STATE = 7,
  PC_ERR_INTERNAL = 8
} pc_status;

/* Message of the last failing call on this thread; "" after success. */
PC_API const char* pc_last_error(void);
PC_API const char* pc_status_name(pc_status status);
PC_API const char* pc_version(void);

/* Training configuration. */
typedef struct pc_config pc_config;

PC_API pc_status pc_config_create(pc_config** out);
/* Flat "key = value" file; unknown keys and invalid values are rejected. */
PC_API pc_status pc_config_load(const char* path, pc_config** out);
/* Not validated until pc_config_validate or first use. */
PC_API pc_status pc_config_set(pc_config* config, const char* key, const char* value);
/* Copies the value (NUL terminated) into buf when it fits; *needed gets the
   required size including the terminator. */
PC_API pc_status pc_config_get(const pc_config* config, const char* key, char* buf, size_t buf_len,
                               size_t* needed);
/* "genpoccl", "genpoccl0" or "baseline-hap". */
PC_API pc_status pc_config_apply_variant(pc_config* config, const char* variant);
PC_API pc_status pc_config_validate(const pc_config* config);
PC_API void pc_config_free(pc_config* config);

/* Synthetic dataset generation. */
typedef struct pc_datagen_options {
  uint32_t n_poses;
  uint32_t m_variations;
  uint64_t seed;
  double occlusion_probability;
} pc_datagen_options;

typedef struct pc_datagen_stats {
  uint64_t attempted;
  uint64_t accepted;
  uint64_t rejected_small_bbox;
  uint64_t rejected_few_keypoints;
} pc_datagen_stats;

PC_API void pc_datagen_default_options(pc_datagen_options* options);
/* Writes images/, poses/ and manifest.jsonl under out_dir. stats may be NULL. */
PC_API pc_status pc_datagen_build(const pc_datagen_options* options, const char* out_dir, pc_datagen_stats* stats);

/* Pre-training. */
typedef struct pc_trainer pc_trainer;

typedef struct pc_epoch_summary {
  int32_t epoch; /* 1-based index of the epoch just finished */
  int32_t micro_batches;
  double lr;     /* learning rate of the last update */
  double rec;    /* epoch means of the logged loss components */
  double align;
  double mp;
  double total;
  double pos_sim;
  double neg_sim;
} pc_epoch_summary;

PC_API pc_status pc_trainer_create(const pc_config* config, const char* data_dir, const char* out_dir,
                                   pc_trainer** out);
PC_API pc_status pc_trainer_resume(const char* checkpoint, const char* data_dir, const char* out_dir,
                                   pc_trainer** out);
/* summary may be NULL. */
PC_API pc_status pc_trainer_run_epoch(pc_trainer* trainer, pc_epoch_summary* summary);
PC_API pc_status pc_trainer_epochs(const pc_trainer* trainer, int32_t* completed, int32_t* total);
/* Path of the checkpoint rewritten after every epoch. */
PC_API pc_status pc_trainer_checkpoint_path(const pc_trainer* trainer, char* buf, size_t buf_len, size_t* needed);
PC_API void pc_trainer_free(pc_trainer* trainer);

/* Trained model loaded from a checkpoint. */
typedef struct pc_model pc_model;

PC_API pc_status pc_model_load(const char* checkpoint, pc_model** out);
PC_API pc_status pc_model_info(const pc_model* model, int32_t* has_pose_token, int32_t* embed_dim,
                               int64_t* parameter_count);
PC_API void pc_model_free(pc_model* model);

/* Pose retrieval over a generated dataset. */
typedef struct pc_retrieval_report {
  int32_t num_poses;
  int32_t m;
  double chance_level;
  double cls_top1;
  double cls_map;
  int32_t has_pose;
  double pose_top1;
  double pose_map;
} pc_retrieval_report;

/* m = 0 uses the smallest group size in the dataset. */
PC_API pc_status pc_eval_retrieval(const pc_model* model, const char* data_dir, int32_t m, uint64_t seed,
                                   pc_retrieval_report* report);

/* 2-D projection of "pose" or "cls" embeddings. Writes a scatter PNG and a
   CSV of coordinates; csv_path may be NULL to use png_path with a .csv
   extension. num_points may be NULL. */
PC_API pc_status pc_eval_project(const pc_model* model, const char* data_dir, const char* token, int32_t m,
                                 uint64_t seed, const char* png_path, const char* csv_path, size_t* num_points);

/* Loss kernels on row-major double arrays of shape (n * m) x dim. Gradient
   outputs may be NULL. */
PC_API pc_status pc_mpc_loss(const double* z1, const double* z2, int32_t n, int32_t m, int32_t dim, double tau,
                             double* loss, double* grad_z1, double* grad_z2);
PC_API pc_status pc_align_loss(const double* c1, const double* c2, int32_t rows, int32_t dim, double tau,
                               double* loss, double* grad_c1, double* grad_c2);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* POSECON_POSECON_H_ */
