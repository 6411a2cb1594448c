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

#include "masking/masking.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace posecon {

int PatchMask::masked_count() const {
  return static_cast<int>(std::count(grid.begin(), grid.end(), std::uint8_t{1}));
}

std::vector<int> PatchMask::visible_indices() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (!grid[i]) out.push_back(i);
  }
  return out;
}

std::vector<int> PatchMask::masked_indices() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (grid[i]) out.push_back(i);
  }
  return out;
}

PatchMask PatchMask::all_visible(int rows, int cols) {
  PatchMask m;
  m.rows = rows;
  m.cols = cols;
  m.grid.assign(static_cast<std::size_t>(rows) * cols, 0);
  return m;
}

const std::array<BodyPart, 5>& body_parts() {
  static const std::array<BodyPart, 5> parts = {{
      {"head", {kNose, kLeftEye, kRightEye, kLeftEar, kRightEar}},
      {"torso", {kLeftShoulder, kRightShoulder, kLeftHip, kRightHip}},
      {"left_arm", {kLeftElbow, kLeftWrist}},
      {"right_arm", {kRightElbow, kRightWrist}},
      {"legs", {kLeftKnee, kRightKnee, kLeftAnkle, kRightAnkle}},
  }};
  return parts;
}

MaskSettings MaskSettings::from(const TrainConfig& config) {
  MaskSettings s;
  s.mask_ratio = config.mask_ratio;
  s.part_radius = config.mask_part_radius;
  s.pose_guided = config.pose_guided_masking;
  s.patch_size = config.patch_size;
  s.image_hw = config.image_hw;
  return s;
}

int target_masked_count(double mask_ratio, int total_patches) {
  require(total_patches >= 2, ErrorKind::kInvalidArgument, "mask grid needs at least two patches");
  // The epsilon keeps exact products such as 0.75 * 48 from rounding up.
  const int target = static_cast<int>(std::ceil(mask_ratio * total_patches - 1e-9));
  return std::clamp(target, 1, total_patches - 1);
}

PatchMask uniform_mask(int rows, int cols, double mask_ratio, Rng& rng) {
  PatchMask m = PatchMask::all_visible(rows, cols);
  const int target = target_masked_count(mask_ratio, m.size());
  std::vector<int> order(m.size());
  for (int i = 0; i < m.size(); ++i) order[i] = i;
  rng.shuffle(order);
  for (int i = 0; i < target; ++i) m.grid[order[i]] = 1;
  m.ratio_actual = static_cast<double>(target) / m.size();
  return m;
}

PatchMask gen_mask(const PoseLabel& pose, const MaskSettings& settings, Rng& rng) {
  require(settings.patch_size > 0 && settings.image_hw.height % settings.patch_size == 0 &&
              settings.image_hw.width % settings.patch_size == 0,
          ErrorKind::kInvalidArgument, "gen_mask: patch size must divide the image size");
  const int rows = settings.image_hw.height / settings.patch_size;
  const int cols = settings.image_hw.width / settings.patch_size;
  if (!settings.pose_guided || pose.visible_count() == 0) return uniform_mask(rows, cols, settings.mask_ratio, rng);

  PatchMask m = PatchMask::all_visible(rows, cols);
  const int target = target_masked_count(settings.mask_ratio, m.size());

  std::vector<int> part_order(body_parts().size());
  for (std::size_t i = 0; i < part_order.size(); ++i) part_order[i] = static_cast<int>(i);
  rng.shuffle(part_order);

  // Whole parts are masked in shuffled order while they fit. The first part
  // that would overshoot stops the walk; if it is the very first part it is
  // trimmed at random, otherwise the rest is filled with random patches.
  int count = 0;
  for (int part : part_order) {
    std::vector<int> fresh;
    for (int joint : body_parts()[part].joints) {
      const auto& kp = pose.keypoints[joint];
      if (!kp.visible) continue;
      const int pr = std::clamp(static_cast<int>(std::floor((kp.y + 0.5) / settings.patch_size)), 0, rows - 1);
      const int pc = std::clamp(static_cast<int>(std::floor((kp.x + 0.5) / settings.patch_size)), 0, cols - 1);
      for (int r = pr - settings.part_radius; r <= pr + settings.part_radius; ++r) {
        for (int c = pc - settings.part_radius; c <= pc + settings.part_radius; ++c) {
          if (r < 0 || r >= rows || c < 0 || c >= cols) continue;
          const int idx = r * cols + c;
          if (m.grid[idx] || std::find(fresh.begin(), fresh.end(), idx) != fresh.end()) continue;
          fresh.push_back(idx);
        }
      }
    }
    if (count + static_cast<int>(fresh.size()) > target) {
      if (count == 0) {
        rng.shuffle(fresh);
        fresh.resize(target);
      } else {
        break;
      }
    }
    for (int idx : fresh) m.grid[idx] = 1;
    count += static_cast<int>(fresh.size());
    if (count == target) break;
  }
  if (count < target) {
    std::vector<int> rest = m.visible_indices();
    rng.shuffle(rest);
    for (int i = 0; count < target; ++i, ++count) m.grid[rest[i]] = 1;
  }
  m.ratio_actual = static_cast<double>(target) / m.size();
  return m;
}

PatchMask gen_mask(const PoseLabel& pose, const TrainConfig& config, Rng& rng) {
  return gen_mask(pose, MaskSettings::from(config), rng);
}

}  // namespace posecon
