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

#include "core/manifest.hpp"
#include "datagen/caption.hpp"

namespace posecon {

struct DatagenOptions {
  int n_poses = 200;  // accepted groups to produce
  int m_variations = 4;
  std::uint64_t seed = 0;
  double occlusion_probability = 0.0;
  ImageHW image_hw{64, 48};
  // Poses are drawn and filtered at this scale, then rescaled to image_hw.
  ImageHW generation_hw{256, 192};
  double bbox_margin = 8.0;  // generation-scale pixels
  const CaptionGrammar* grammar = nullptr;  // default grammar when null
};

struct FilterStats {
  int accepted = 0;
  int small_bbox = 0;
  int too_few_keypoints = 0;
};

// Writes DIR/images/<pose_id>_<k>.png, DIR/poses/<pose_id>.txt and
// DIR/manifest.jsonl. Pose i is generated from its own derived stream, so the
// output does not depend on generation order.
DatasetManifest build_dataset(const DatagenOptions& options, const std::filesystem::path& out_dir,
                              FilterStats* stats = nullptr);

}  // namespace posecon
