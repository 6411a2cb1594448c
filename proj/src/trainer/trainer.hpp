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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/manifest.hpp"
#include "masking/masking.hpp"
#include "model/vit_mae.hpp"
#include "trainer/checkpoint.hpp"
#include "trainer/optimizer.hpp"
#include "trainer/schedule.hpp"

namespace posecon {

// Augmented, flattened micro-batch ready for the model. Images are
// group-major: image i belongs to group i / m.
struct PreparedBatch {
  int n = 0;
  int m = 0;
  std::vector<Image> images;
  std::vector<PoseLabel> poses;  // warped keypoints, one per image
  std::vector<int> labels;
  std::vector<PatchMask> mask1;
  std::vector<PatchMask> mask2;
};

// Random draws are keyed by (seed, epoch, slot, variation), where slot is the
// group's position in the epoch order. A batch therefore comes out the same
// whether it is prepared whole or in consecutive slices, which keeps gradient
// accumulation equivalent to one large batch.
PreparedBatch prepare_batch(const std::vector<const SampleGroup*>& groups, const TrainConfig& config, int epoch,
                            int first_slot);

struct StepReport {
  double rec = 0.0;
  double align = 0.0;
  double mp = 0.0;
  double total = 0.0;
  double pos_sim = 0.0;  // mean cosine of same-pose cross-view pairs
  double neg_sim = 0.0;  // mean cosine of different-pose pairs
};

// One forward/backward pass over both masked views. Adds
// grad_scale * d(total)/d(theta) into the parameter gradients.
StepReport forward_backward(MaskedAutoencoder& model, const PreparedBatch& batch, const TrainConfig& config,
                            double grad_scale);

// Name of the token the pose loss reads: "pose", "cls", or "none".
std::string mp_token_name(const TrainConfig& config);

struct MetricsRow {
  std::int64_t step = 0;
  int epoch = 0;
  double lr = 0.0;
  StepReport report;
  double grad_norm = 0.0;  // filled on the micro-batch that triggers an update
};

struct TrainerOptions {
  bool keep_epoch_checkpoints = false;
  bool write_metrics = true;
};

std::vector<SampleGroup> load_dataset(const std::filesystem::path& data_dir);

class Trainer {
 public:
  Trainer(TrainConfig config, std::vector<SampleGroup> groups, std::filesystem::path out_dir,
          TrainerOptions options = {});
  Trainer(TrainConfig config, const std::filesystem::path& data_dir, std::filesystem::path out_dir,
          TrainerOptions options = {});

  // Continues from a checkpoint written by save_checkpoint; the run then
  // proceeds exactly as if it had never stopped.
  static std::unique_ptr<Trainer> resume(const std::filesystem::path& checkpoint,
                                         const std::filesystem::path& data_dir, std::filesystem::path out_dir,
                                         TrainerOptions options = {});
  static std::unique_ptr<Trainer> resume(const std::filesystem::path& checkpoint, std::vector<SampleGroup> groups,
                                         std::filesystem::path out_dir, TrainerOptions options = {});

  // Runs the next epoch, appends metrics and overwrites the latest checkpoint.
  void run_epoch();
  // Runs the remaining epochs; returns the latest checkpoint path.
  std::filesystem::path fit();

  int epochs_completed() const { return epochs_completed_; }
  std::int64_t global_step() const { return global_step_; }
  std::int64_t optimizer_steps() const { return optimizer_.steps(); }
  int micro_batches_per_epoch() const;
  int updates_per_epoch() const;

  const TrainConfig& config() const { return config_; }
  MaskedAutoencoder& model() { return *model_; }
  const std::vector<MetricsRow>& history() const { return history_; }
  std::filesystem::path latest_checkpoint_path() const { return out_dir_ / "checkpoint_last.ckpt"; }
  std::filesystem::path metrics_path() const { return out_dir_ / "metrics.csv"; }

  void save_checkpoint(const std::filesystem::path& path) const;

 private:
  void append_metrics(const MetricsRow& row);

  TrainConfig config_;
  std::vector<SampleGroup> groups_;
  std::filesystem::path out_dir_;
  TrainerOptions options_;
  std::unique_ptr<MaskedAutoencoder> model_;
  AdamW optimizer_;
  Schedule schedule_;
  int epochs_completed_ = 0;
  std::int64_t global_step_ = 0;
  std::vector<MetricsRow> history_;
  bool metrics_open_ = false;  // set once this run has written (or adopted) the CSV
};

}  // namespace posecon
