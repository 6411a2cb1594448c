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

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "core/config.hpp"
#include "core/pose.hpp"
#include "core/rng.hpp"

namespace posecon {

// Row-major patch grid, true = masked (dropped from the encoder input).
struct PatchMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> grid;
  double ratio_actual = 0.0;

  int size() const { return rows * cols; }
  bool masked(int index) const { return grid[index] != 0; }
  int masked_count() const;
  std::vector<int> visible_indices() const;
  std::vector<int> masked_indices() const;

  // Eval-time mask with every patch visible.
  static PatchMask all_visible(int rows, int cols);

  bool operator==(const PatchMask&) const = default;
};

struct BodyPart {
  std::string_view name;
  std::vector<int> joints;
};

// head, torso, left arm, right arm, legs.
const std::array<BodyPart, 5>& body_parts();

struct MaskSettings {
  double mask_ratio = 0.75;
  int patch_size = 8;
  ImageHW image_hw{64, 48};
  // A keypoint claims every patch within this Chebyshev distance of its own.
  int part_radius = 1;
  bool pose_guided = true;

  static MaskSettings from(const TrainConfig& config);
};

// ceil(ratio * total), kept inside [1, total - 1].
int target_masked_count(double mask_ratio, int total_patches);

// Body parts are visited in random order and their patch neighborhoods
// masked until the target count is met; the final part is trimmed at random
// if it overshoots, and any shortfall is filled with random remaining
// patches. Falls back to uniform random masking when no keypoint is visible.
PatchMask gen_mask(const PoseLabel& pose, const MaskSettings& settings, Rng& rng);
PatchMask gen_mask(const PoseLabel& pose, const TrainConfig& config, Rng& rng);

PatchMask uniform_mask(int rows, int cols, double mask_ratio, Rng& rng);

}  // namespace posecon
