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

#include "posecon/posecon.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "datagen/dataset.hpp"
#include "eval/projection.hpp"
#include "eval/retrieval.hpp"
#include "losses/losses.hpp"
#include "trainer/checkpoint.hpp"
#include "trainer/trainer.hpp"

struct pc_config {
  posecon::TrainConfig value;
};

struct pc_trainer {
  std::unique_ptr<posecon::Trainer> trainer;
};

struct pc_model {
  posecon::TrainConfig config;
  std::unique_ptr<posecon::MaskedAutoencoder> model;
};

namespace {

thread_local std::string g_last_error;

pc_status to_status(posecon::ErrorKind kind) {
  switch (kind) {
    case posecon::ErrorKind::kInvalidArgument: return PC_ERR_INVALID_ARGUMENT;
    case posecon::ErrorKind::kIo: return PC_ERR_IO;
    case posecon::ErrorKind::kParse: return PC_ERR_PARSE;
    case posecon::ErrorKind::kConfig: return PC_ERR_CONFIG;
    case posecon::ErrorKind::kNumeric: return PC_ERR_NUMERIC;
    case posecon::ErrorKind::kShape: return PC_ERR_SHAPE;
    case posecon::ErrorKind::kState: return PC_ERR_STATE;
  }
  return PC_ERR_INTERNAL;
}

// Runs fn, translating exceptions into a status and the thread-local message.
template <typename Fn>
pc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PC_OK;
  } catch (const posecon::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return PC_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  posecon::require(p != nullptr, posecon::ErrorKind::kInvalidArgument, std::string(what) + " must not be NULL");
}

void copy_out(const std::string& value, char* buf, size_t buf_len, size_t* needed) {
  if (needed) *needed = value.size() + 1;
  if (buf && buf_len > value.size()) {
    std::memcpy(buf, value.c_str(), value.size() + 1);
    return;
  }
  posecon::require(buf == nullptr, posecon::ErrorKind::kInvalidArgument,
                   "buffer of " + std::to_string(buf_len) + " bytes is too small, need " +
                       std::to_string(value.size() + 1));
}

int resolve_m(const std::vector<posecon::SampleGroup>& groups, int32_t m) {
  if (m > 0) return m;
  posecon::require(!groups.empty(), posecon::ErrorKind::kInvalidArgument, "dataset has no pose groups");
  std::size_t smallest = groups.front().images.size();
  for (const auto& g : groups) smallest = std::min(smallest, g.images.size());
  return static_cast<int>(smallest);
}

posecon::MatrixXd wrap(const double* data, int rows, int cols) {
  return Eigen::Map<const posecon::MatrixXd>(data, rows, cols);
}

void unwrap(const posecon::MatrixXd& m, double* out) {
  if (out) std::memcpy(out, m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
}

}  // namespace

extern "C" {

const char* pc_last_error(void) { return g_last_error.c_str(); }

const char* pc_status_name(pc_status status) {
  switch (status) {
    case PC_OK: return "ok";
    case PC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PC_ERR_IO: return "i/o error";
    case PC_ERR_PARSE: return "parse error";
    case PC_ERR_CONFIG: return "invalid configuration";
    case PC_ERR_NUMERIC: return "numeric error";
    case PC_ERR_SHAPE: return "shape mismatch";
    case PC_ERR_STATE: return "invalid state";
    case PC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pc_version(void) { return "0.1.0"; }

pc_status pc_config_create(pc_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new pc_config{};
  });
}

pc_status pc_config_load(const char* path, pc_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pc_config{posecon::load_config(path)};
  });
}

pc_status pc_config_set(pc_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    posecon::set_config_value(config->value, key, value);
  });
}

pc_status pc_config_get(const pc_config* config, const char* key, char* buf, size_t buf_len, size_t* needed) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    copy_out(posecon::get_config_value(config->value, key), buf, buf_len, needed);
  });
}

pc_status pc_config_apply_variant(pc_config* config, const char* variant) {
  return guarded([&] {
    need(config, "config");
    need(variant, "variant");
    posecon::apply_variant(config->value, posecon::parse_variant(variant));
  });
}

pc_status pc_config_validate(const pc_config* config) {
  return guarded([&] {
    need(config, "config");
    config->value.validate();
  });
}

void pc_config_free(pc_config* config) { delete config; }

void pc_datagen_default_options(pc_datagen_options* options) {
  if (!options) return;
  const posecon::DatagenOptions defaults;
  options->n_poses = static_cast<uint32_t>(defaults.n_poses);
  options->m_variations = static_cast<uint32_t>(defaults.m_variations);
  options->seed = defaults.seed;
  options->occlusion_probability = defaults.occlusion_probability;
}

pc_status pc_datagen_build(const pc_datagen_options* options, const char* out_dir, pc_datagen_stats* stats) {
  return guarded([&] {
    need(options, "options");
    need(out_dir, "out_dir");
    posecon::DatagenOptions opts;
    opts.n_poses = static_cast<int>(options->n_poses);
    opts.m_variations = static_cast<int>(options->m_variations);
    opts.seed = options->seed;
    opts.occlusion_probability = options->occlusion_probability;
    posecon::FilterStats filter;
    posecon::build_dataset(opts, out_dir, &filter);
    if (stats) {
      stats->accepted = static_cast<uint64_t>(filter.accepted);
      stats->rejected_small_bbox = static_cast<uint64_t>(filter.small_bbox);
      stats->rejected_few_keypoints = static_cast<uint64_t>(filter.too_few_keypoints);
      stats->attempted = stats->accepted + stats->rejected_small_bbox + stats->rejected_few_keypoints;
    }
  });
}

pc_status pc_trainer_create(const pc_config* config, const char* data_dir, const char* out_dir, pc_trainer** out) {
  return guarded([&] {
    need(config, "config");
    need(data_dir, "data_dir");
    need(out_dir, "out_dir");
    need(out, "out");
    auto trainer = std::make_unique<posecon::Trainer>(config->value, std::filesystem::path(data_dir), out_dir);
    *out = new pc_trainer{std::move(trainer)};
  });
}

pc_status pc_trainer_resume(const char* checkpoint, const char* data_dir, const char* out_dir, pc_trainer** out) {
  return guarded([&] {
    need(checkpoint, "checkpoint");
    need(data_dir, "data_dir");
    need(out_dir, "out_dir");
    need(out, "out");
    *out = new pc_trainer{posecon::Trainer::resume(checkpoint, std::filesystem::path(data_dir), out_dir)};
  });
}

pc_status pc_trainer_run_epoch(pc_trainer* trainer, pc_epoch_summary* summary) {
  return guarded([&] {
    need(trainer, "trainer");
    auto& t = *trainer->trainer;
    const std::size_t first = t.history().size();
    t.run_epoch();
    if (!summary) return;
    *summary = pc_epoch_summary{};
    const auto& rows = t.history();
    const double count = static_cast<double>(rows.size() - first);
    summary->epoch = t.epochs_completed();
    summary->micro_batches = static_cast<int32_t>(rows.size() - first);
    for (std::size_t i = first; i < rows.size(); ++i) {
      const auto& r = rows[i].report;
      summary->rec += r.rec / count;
      summary->align += r.align / count;
      summary->mp += r.mp / count;
      summary->total += r.total / count;
      summary->pos_sim += r.pos_sim / count;
      summary->neg_sim += r.neg_sim / count;
    }
    summary->lr = rows.back().lr;
  });
}

pc_status pc_trainer_epochs(const pc_trainer* trainer, int32_t* completed, int32_t* total) {
  return guarded([&] {
    need(trainer, "trainer");
    if (completed) *completed = trainer->trainer->epochs_completed();
    if (total) *total = trainer->trainer->config().total_epochs;
  });
}

pc_status pc_trainer_checkpoint_path(const pc_trainer* trainer, char* buf, size_t buf_len, size_t* needed) {
  return guarded([&] {
    need(trainer, "trainer");
    copy_out(trainer->trainer->latest_checkpoint_path().string(), buf, buf_len, needed);
  });
}

void pc_trainer_free(pc_trainer* trainer) { delete trainer; }

pc_status pc_model_load(const char* checkpoint, pc_model** out) {
  return guarded([&] {
    need(checkpoint, "checkpoint");
    need(out, "out");
    const posecon::Checkpoint ck = posecon::read_checkpoint(checkpoint);
    *out = new pc_model{ck.config, posecon::model_from_checkpoint(ck)};
  });
}

pc_status pc_model_info(const pc_model* model, int32_t* has_pose_token, int32_t* embed_dim,
                        int64_t* parameter_count) {
  return guarded([&] {
    need(model, "model");
    const auto& cfg = model->model->config();
    if (has_pose_token) *has_pose_token = cfg.use_pose_token ? 1 : 0;
    if (embed_dim) *embed_dim = cfg.embed_dim;
    if (parameter_count) *parameter_count = static_cast<int64_t>(model->model->parameter_count());
  });
}

void pc_model_free(pc_model* model) { delete model; }

pc_status pc_eval_retrieval(const pc_model* model, const char* data_dir, int32_t m, uint64_t seed,
                            pc_retrieval_report* report) {
  return guarded([&] {
    need(model, "model");
    need(data_dir, "data_dir");
    need(report, "report");
    const auto groups = posecon::load_dataset(data_dir);
    const posecon::RetrievalReport r = posecon::pose_retrieval(*model->model, groups, resolve_m(groups, m), seed);
    *report = pc_retrieval_report{};
    report->num_poses = r.num_poses;
    report->m = r.m;
    report->chance_level = r.chance_level;
    report->cls_top1 = r.cls.top1;
    report->cls_map = r.cls.mean_average_precision;
    report->has_pose = r.pose ? 1 : 0;
    if (r.pose) {
      report->pose_top1 = r.pose->top1;
      report->pose_map = r.pose->mean_average_precision;
    }
  });
}

pc_status pc_eval_project(const pc_model* model, const char* data_dir, const char* token, int32_t m, uint64_t seed,
                          const char* png_path, const char* csv_path, size_t* num_points) {
  return guarded([&] {
    need(model, "model");
    need(data_dir, "data_dir");
    need(token, "token");
    need(png_path, "png_path");
    const auto groups = posecon::load_dataset(data_dir);
    const auto kind = posecon::parse_token_kind(token);
    const auto set = posecon::embed_groups(*model->model, groups, resolve_m(groups, m), kind);
    posecon::ProjectionOptions options;
    options.seed = seed;
    const posecon::MatrixXd coords = posecon::tsne(set.embeddings, options);
    std::filesystem::path csv = csv_path ? std::filesystem::path(csv_path)
                                         : std::filesystem::path(png_path).replace_extension(".csv");
    posecon::write_projection_csv(csv, coords, set.labels, set.pose_ids);
    posecon::write_projection_png(png_path, coords, set.labels);
    if (num_points) *num_points = static_cast<size_t>(coords.rows());
  });
}

pc_status pc_mpc_loss(const double* z1, const double* z2, int32_t n, int32_t m, int32_t dim, double tau,
                      double* loss, double* grad_z1, double* grad_z2) {
  return guarded([&] {
    need(z1, "z1");
    need(z2, "z2");
    need(loss, "loss");
    posecon::require(n >= 1 && m >= 2 && dim >= 1, posecon::ErrorKind::kInvalidArgument,
                     "mpc loss needs n >= 1, m >= 2, dim >= 1");
    posecon::require(tau > 0.0, posecon::ErrorKind::kInvalidArgument, "tau must be positive");
    const auto result = posecon::mpc_loss(wrap(z1, n * m, dim), wrap(z2, n * m, dim),
                                          posecon::repeated_labels(n, m), tau);
    *loss = result.value;
    unwrap(result.grad_a, grad_z1);
    unwrap(result.grad_b, grad_z2);
  });
}

pc_status pc_align_loss(const double* c1, const double* c2, int32_t rows, int32_t dim, double tau, double* loss,
                        double* grad_c1, double* grad_c2) {
  return guarded([&] {
    need(c1, "c1");
    need(c2, "c2");
    need(loss, "loss");
    posecon::require(rows >= 1 && dim >= 1, posecon::ErrorKind::kInvalidArgument, "align loss needs rows, dim >= 1");
    posecon::require(tau > 0.0, posecon::ErrorKind::kInvalidArgument, "tau must be positive");
    const auto result = posecon::align_loss(wrap(c1, rows, dim), wrap(c2, rows, dim), tau);
    *loss = result.value;
    unwrap(result.grad_a, grad_c1);
    unwrap(result.grad_b, grad_c2);
  });
}

}  // extern "C"
