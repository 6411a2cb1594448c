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

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "datagen/pose_sampler.hpp"
#include "masking/masking.hpp"

namespace posecon {
namespace {

PoseLabel sampled_pose(int i, double occlusion = 0.0) {
  Rng rng(21, "mask-pose/" + std::to_string(i));
  PoseSamplerOptions opts;
  opts.occlusion_probability = occlusion;
  return rescale_pose(sample_pose(rng, {256, 192}, opts), {256, 192}, {64, 48});
}

// Patches within the part radius of the given visible keypoints (all of
// them when `joints` is empty).
std::set<int> body_neighborhood(const PoseLabel& pose, const MaskSettings& s, const std::vector<int>& joints = {}) {
  const int rows = s.image_hw.height / s.patch_size, cols = s.image_hw.width / s.patch_size;
  std::set<int> out;
  for (int j = 0; j < kNumKeypoints; ++j) {
    const auto& kp = pose.keypoints[j];
    if (!kp.visible || (!joints.empty() && std::find(joints.begin(), joints.end(), j) == joints.end())) continue;
    const int pr = std::clamp(static_cast<int>(std::floor((kp.y + 0.5) / s.patch_size)), 0, rows - 1);
    const int pc = std::clamp(static_cast<int>(std::floor((kp.x + 0.5) / s.patch_size)), 0, cols - 1);
    for (int r = std::max(0, pr - s.part_radius); r <= std::min(rows - 1, pr + s.part_radius); ++r) {
      for (int c = std::max(0, pc - s.part_radius); c <= std::min(cols - 1, pc + s.part_radius); ++c) {
        out.insert(r * cols + c);
      }
    }
  }
  return out;
}

TEST(Masking, TargetCount) {
  EXPECT_EQ(target_masked_count(0.75, 48), 36);
  EXPECT_EQ(target_masked_count(0.75, 196), 147);
  EXPECT_EQ(target_masked_count(0.5, 7), 4);
  EXPECT_EQ(target_masked_count(0.01, 10), 1);
  EXPECT_EQ(target_masked_count(0.99, 10), 9);
}

TEST(Masking, ExactCountAndDeterminism) {
  const MaskSettings s;
  for (int i = 0; i < 200; ++i) {
    const PoseLabel pose = sampled_pose(i, i % 3 == 0 ? 0.5 : 0.0);
    Rng a(1, "m/" + std::to_string(i)), b(1, "m/" + std::to_string(i));
    const PatchMask m = gen_mask(pose, s, a);
    EXPECT_EQ(m.rows, 8);
    EXPECT_EQ(m.cols, 6);
    EXPECT_EQ(m.masked_count(), 36);
    EXPECT_DOUBLE_EQ(m.ratio_actual, 0.75);
    EXPECT_EQ(m, gen_mask(pose, s, b));
    EXPECT_EQ(m.visible_indices().size() + m.masked_indices().size(), 48u);
  }
}

TEST(Masking, WholePartsAreMaskedFirst) {
  for (int i = 0; i < 200; ++i) {
    const PoseLabel pose = sampled_pose(i, 0.3);
    for (const MaskSettings s : {MaskSettings{}, MaskSettings{0.2, 8, {64, 48}, 1}, MaskSettings{0.75, 8, {64, 48}, 0}}) {
      Rng rng(2, "bias/" + std::to_string(i));
      const PatchMask m = gen_mask(pose, s, rng);
      const auto masked = m.masked_indices();
      const std::set<int> masked_set(masked.begin(), masked.end());
      const std::set<int> body = body_neighborhood(pose, s);
      const int target = target_masked_count(s.mask_ratio, m.size());
      if (static_cast<int>(body.size()) <= target) {
        // Every part fits, so the whole body is masked.
        EXPECT_TRUE(std::includes(masked_set.begin(), masked_set.end(), body.begin(), body.end())) << "pose " << i;
        continue;
      }
      // Otherwise some part is masked whole, or the first part alone
      // overflowed and the mask lies inside it.
      bool whole_part = false;
      for (const auto& part : body_parts()) {
        const std::set<int> n = body_neighborhood(pose, s, part.joints);
        if (n.empty()) continue;
        whole_part |= std::includes(masked_set.begin(), masked_set.end(), n.begin(), n.end()) ||
                      std::includes(n.begin(), n.end(), masked_set.begin(), masked_set.end());
      }
      EXPECT_TRUE(whole_part) << "pose " << i;
    }
  }
}

TEST(Masking, BiasedTowardsTheBody) {
  // Averaged over poses, body patches are masked more often than background.
  double body_rate = 0, bg_rate = 0;
  int body_n = 0, bg_n = 0;
  const MaskSettings s{0.4, 8, {64, 48}, 1};
  for (int i = 0; i < 200; ++i) {
    const PoseLabel pose = sampled_pose(i);
    Rng rng(3, "rate/" + std::to_string(i));
    const PatchMask m = gen_mask(pose, s, rng);
    const std::set<int> body = body_neighborhood(pose, s);
    for (int idx = 0; idx < m.size(); ++idx) {
      if (body.count(idx)) {
        body_rate += m.masked(idx);
        ++body_n;
      } else {
        bg_rate += m.masked(idx);
        ++bg_n;
      }
    }
  }
  EXPECT_GT(body_rate / body_n, bg_rate / std::max(bg_n, 1) + 0.2);
}

TEST(Masking, TwoDrawsDiffer) {
  const PoseLabel pose = sampled_pose(0);
  for (double ratio : {0.15, 0.3, 0.5, 0.75, 0.85}) {
    MaskSettings s;
    s.mask_ratio = ratio;
    int differ = 0;
    for (int i = 0; i < 1000; ++i) {
      Rng a(4, "first/" + std::to_string(i)), b(4, "second/" + std::to_string(i));
      differ += gen_mask(pose, s, a) != gen_mask(pose, s, b);
    }
    EXPECT_GE(differ, 990) << "mask_ratio " << ratio;
  }
}

TEST(Masking, MaskPairsDifferAcrossImages) {
  // One mask pair per image over 1,000 images drawn from the sampler.
  const MaskSettings s;
  int differ = 0;
  for (int i = 0; i < 1000; ++i) {
    const PoseLabel pose = sampled_pose(i % 250);
    Rng rng(4, "pair/" + std::to_string(i));
    differ += gen_mask(pose, s, rng) != gen_mask(pose, s, rng);
  }
  EXPECT_GE(differ, 990);
}

TEST(Masking, ExactBodyCoverIsForced) {
  const MaskSettings s;
  for (int i = 0; i < 250; ++i) {
    const PoseLabel pose = sampled_pose(i);
    const std::set<int> body = body_neighborhood(pose, s);
    if (static_cast<int>(body.size()) != target_masked_count(s.mask_ratio, 48)) continue;
    Rng rng(5, "cover/" + std::to_string(i));
    const auto masked = gen_mask(pose, s, rng).masked_indices();
    EXPECT_EQ(std::set<int>(masked.begin(), masked.end()), body);
  }
}

TEST(Masking, NoVisibleKeypointsFallsBackToUniform) {
  PoseLabel pose;
  Rng a(5, "u"), b(5, "u");
  const PatchMask m = gen_mask(pose, MaskSettings{}, a);
  EXPECT_EQ(m, uniform_mask(8, 6, 0.75, b));
  EXPECT_EQ(m.masked_count(), 36);
}

TEST(Masking, ConfigOverloadUsesTrainSettings) {
  TrainConfig c;
  c.mask_ratio = 0.5;
  c.patch_size = 16;
  Rng rng(6, "cfg");
  const PatchMask m = gen_mask(sampled_pose(0), c, rng);
  EXPECT_EQ(m.size(), 12);
  EXPECT_EQ(m.masked_count(), 6);
}

TEST(Masking, AllVisible) {
  const PatchMask m = PatchMask::all_visible(8, 6);
  EXPECT_EQ(m.masked_count(), 0);
  EXPECT_EQ(m.visible_indices().size(), 48u);
}

TEST(Masking, PartsCoverEveryJointOnce) {
  std::set<int> seen;
  for (const auto& part : body_parts()) {
    for (int j : part.joints) EXPECT_TRUE(seen.insert(j).second) << j;
  }
  EXPECT_EQ(seen.size(), static_cast<std::size_t>(kNumKeypoints));
}

}  // namespace
}  // namespace posecon
