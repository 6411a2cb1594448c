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

#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/manifest.hpp"
#include "datagen/pose_sampler.hpp"
#include "datagen/render.hpp"

namespace posecon::fixtures {

// In-memory pose groups rendered procedurally at `hw`.
inline std::vector<SampleGroup> make_groups(int count, int m, ImageHW hw, std::uint64_t seed) {
  std::vector<SampleGroup> groups;
  ProceduralBackend backend(hw);
  const ImageHW big{hw.height * 4, hw.width * 4};
  for (int g = 0; g < count; ++g) {
    Rng rng(seed, "fixture/" + std::to_string(g));
    PoseLabel pose = rescale_pose(sample_pose(rng, big), big, hw);
    pose.pose_id = "g" + std::to_string(g);
    groups.push_back(render_group(pose, m, rng, backend));
  }
  return groups;
}

// Small enough for many forward/backward passes in a unit test.
inline TrainConfig tiny_config() {
  TrainConfig c;
  c.image_hw = {32, 24};
  c.patch_size = 8;
  c.embed_dim = 16;
  c.depth = 1;
  c.heads = 2;
  c.decoder_dim = 8;
  c.decoder_depth = 1;
  c.decoder_heads = 2;
  c.n_poses_per_batch = 4;
  c.m_variations = 2;
  c.warmup_epochs = 1;
  c.total_epochs = 3;
  c.base_lr = 1e-3;
  return c;
}

}  // namespace posecon::fixtures
