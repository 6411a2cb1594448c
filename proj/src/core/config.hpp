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
#include <string>
#include <string_view>
#include <vector>

#include "core/pose.hpp"

namespace posecon {

// Transformer dimensions. Patch size and the [POSE] switch come from the
// training config so the two never disagree.
struct ModelConfig {
  int embed_dim = 128;
  int depth = 4;
  int heads = 4;
  int decoder_dim = 64;
  int decoder_depth = 2;
  int decoder_heads = 4;
  int mlp_ratio = 4;
  int patch_size = 8;
  ImageHW image_hw{64, 48};
  bool use_pose_token = true;

  int grid_rows() const { return image_hw.height / patch_size; }
  int grid_cols() const { return image_hw.width / patch_size; }
  int num_patches() const { return grid_rows() * grid_cols(); }
  int patch_dim() const { return patch_size * patch_size * 3; }
  int num_special_tokens() const { return use_pose_token ? 2 : 1; }

  void validate() const;
};

struct TrainConfig {
  double tau = 0.2;
  double gamma1 = 0.05;
  double gamma2 = 0.05;
  int n_poses_per_batch = 16;
  int m_variations = 4;
  double mask_ratio = 0.75;
  // Patches within this Chebyshev distance of a keypoint belong to its part.
  int mask_part_radius = 1;
  // Uniform random masks instead of body-part masks when false.
  bool pose_guided_masking = true;
  int patch_size = 8;
  ImageHW image_hw{64, 48};
  double base_lr = 1.5e-3;
  double weight_decay = 0.05;
  int warmup_epochs = 3;
  int total_epochs = 30;
  int grad_accum_steps = 1;
  bool use_pose_token = true;
  bool use_mpc_loss = true;
  std::uint64_t seed = 0;

  // Full augmentation table when true; flip + crop only when false.
  bool strong_augmentation = true;
  // Normalize each target patch by its own mean/std before the MSE.
  bool norm_pix_loss = false;

  int embed_dim = 128;
  int depth = 4;
  int heads = 4;
  int decoder_dim = 64;
  int decoder_depth = 2;
  int decoder_heads = 4;

  // Throws Error(kConfig) naming the first offending field.
  void validate() const;
  ModelConfig model_config() const;
};

enum class Variant { kGenPoCCL, kGenPoCCL0, kBaselineHap };

Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant variant);
// Sets the ablation switches (and gamma2 for the baseline) for a variant.
void apply_variant(TrainConfig& config, Variant variant);

// Flat "key = value" text, '#' starts a comment. Unknown keys are rejected;
// omitted keys keep their defaults. The result is validated.
TrainConfig parse_config(std::string_view text);
TrainConfig load_config(const std::filesystem::path& path);
std::string format_config(const TrainConfig& config);

// Key-level access shared by the file parser and the C API. set_config_value
// does not validate; call validate() once all edits are applied.
void set_config_value(TrainConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const TrainConfig& config, std::string_view key);
std::vector<std::string> config_keys();

}  // namespace posecon
