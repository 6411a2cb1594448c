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

#include <cmath>

#include <gtest/gtest.h>

#include "augment/augment.hpp"

namespace posecon {
namespace {

Image random_image(int h, int w, std::uint64_t seed) {
  Image img(h, w);
  Rng rng(seed, "augment-image");
  for (auto& v : img.data) v = static_cast<float>(std::round(rng.uniform(0, 255)));
  return img;
}

PoseLabel random_pose(std::uint64_t seed, ImageHW hw) {
  PoseLabel pose;
  pose.pose_id = "p";
  Rng rng(seed, "augment-pose");
  for (auto& kp : pose.keypoints) kp = {rng.uniform(4, hw.width - 5), rng.uniform(4, hw.height - 5), true};
  return pose;
}

// Brightest pixel location (x, y) of channel 0.
std::pair<int, int> argmax(const Image& img) {
  float best = -1.0f;
  std::pair<int, int> at{0, 0};
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(y, x, 0) > best) {
        best = img.at(y, x, 0);
        at = {x, y};
      }
    }
  }
  return at;
}

TEST(Geometric, IdentityLeavesImageAndPoseUnchanged) {
  const Image img = random_image(64, 48, 1);
  const auto params = GeometricParams::identity({64, 48});
  EXPECT_EQ(warp_image(img, params), img);
  const PoseLabel pose = random_pose(2, {64, 48});
  EXPECT_EQ(warp_pose(pose, params), pose);
}

TEST(Geometric, FlipMirrorsPixelsAndSwapsSides) {
  const Image img = random_image(8, 6, 3);
  auto params = GeometricParams::identity({8, 6});
  params.flip = true;
  const Image out = warp_image(img, params);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 6; ++x) {
      for (int c = 0; c < 3; ++c) ASSERT_FLOAT_EQ(out.at(y, x, c), img.at(y, 5 - x, c));
    }
  }
  PoseLabel pose = random_pose(4, {64, 48});
  pose.keypoints[kLeftWrist] = {10, 20, true};
  pose.keypoints[kRightWrist] = {30, 25, true};
  params = GeometricParams::identity({64, 48});
  params.flip = true;
  const PoseLabel flipped = warp_pose(pose, params);
  EXPECT_DOUBLE_EQ(flipped.keypoints[kRightWrist].x, 47 - 10);
  EXPECT_DOUBLE_EQ(flipped.keypoints[kLeftWrist].x, 47 - 30);
  EXPECT_DOUBLE_EQ(flipped.keypoints[kLeftWrist].y, 25);
  const PoseLabel back = warp_pose(flipped, params);
  for (int k = 0; k < kNumKeypoints; ++k) {
    EXPECT_NEAR(back.keypoints[k].x, pose.keypoints[k].x, 1e-12);
    EXPECT_DOUBLE_EQ(back.keypoints[k].y, pose.keypoints[k].y);
    EXPECT_EQ(back.keypoints[k].visible, pose.keypoints[k].visible);
  }
}

TEST(Geometric, RotationFixesTheCenter) {
  auto params = GeometricParams::identity({65, 49});
  params.rotate_degrees = 33.0;
  PoseLabel pose;
  pose.keypoints[0] = {24.0, 32.0, true};
  const PoseLabel out = warp_pose(pose, params);
  EXPECT_NEAR(out.keypoints[0].x, 24.0, 1e-12);
  EXPECT_NEAR(out.keypoints[0].y, 32.0, 1e-12);
}

TEST(Geometric, PositiveAngleTurnsCounterClockwise) {
  auto params = GeometricParams::identity({65, 65});
  params.rotate_degrees = 90.0;
  PoseLabel pose;
  pose.keypoints[0] = {42.0, 32.0, true};  // right of center
  const PoseLabel out = warp_pose(pose, params);
  EXPECT_NEAR(out.keypoints[0].x, 32.0, 1e-9);
  EXPECT_NEAR(out.keypoints[0].y, 22.0, 1e-9);  // now above center
}

TEST(Geometric, PixelsFollowKeypoints) {
  // A single bright dot must land where the warped keypoint says it does.
  for (int trial = 0; trial < 40; ++trial) {
    Rng rng(100 + trial, "follow");
    const ImageHW hw{64, 48};
    const int px = rng.uniform_int(14, 33), py = rng.uniform_int(18, 45);
    Image img(hw.height, hw.width, 0.0f);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) img.at(py + dy, px + dx, 0) = dx == 0 && dy == 0 ? 255.0f : 160.0f;
    }
    PoseLabel pose;
    pose.keypoints[0] = {static_cast<double>(px), static_cast<double>(py), true};
    AugmentationSettings settings;
    settings.rotate_limit_degrees = 20.0;
    const GeometricParams params = draw_geometric(rng, hw, hw, settings);
    const PoseLabel warped = warp_pose(pose, params);
    if (!warped.keypoints[0].visible) continue;
    const auto [mx, my] = argmax(warp_image(img, params));
    EXPECT_LE(std::abs(mx - warped.keypoints[0].x), 1.0) << "trial " << trial;
    EXPECT_LE(std::abs(my - warped.keypoints[0].y), 1.0) << "trial " << trial;
  }
}

TEST(Geometric, OutOfFrameKeypointsBecomeInvisible) {
  auto params = GeometricParams::identity({64, 48});
  params.crop = {16, 12, 32, 24};
  PoseLabel pose;
  pose.keypoints[0] = {2.0, 2.0, true};
  pose.keypoints[1] = {24.0, 32.0, true};
  const PoseLabel out = warp_pose(pose, params);
  EXPECT_FALSE(out.keypoints[0].visible);
  EXPECT_TRUE(out.keypoints[1].visible);
}

TEST(Geometric, DrawnCropsRespectScaleAndRatio) {
  Rng rng(7, "crops");
  for (int i = 0; i < 500; ++i) {
    const GeometricParams p = draw_geometric(rng, {64, 48}, {64, 48});
    EXPECT_GE(p.crop.top, 0.0);
    EXPECT_GE(p.crop.left, 0.0);
    EXPECT_LE(p.crop.top + p.crop.height, 64.0 + 1e-9);
    EXPECT_LE(p.crop.left + p.crop.width, 48.0 + 1e-9);
    const double ratio = p.crop.width / p.crop.height;
    EXPECT_GE(ratio, 3.0 / 8.0 - 1e-9);
    EXPECT_LE(ratio, 2.0 / 3.0 + 1e-9);
    EXPECT_LE(std::abs(p.rotate_degrees), 45.0);
  }
}

TEST(Geometric, WeakSettingsNeverRotate) {
  Rng rng(8, "weak");
  const auto weak = AugmentationSettings::weak();
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(draw_geometric(rng, {64, 48}, {64, 48}, weak).rotate_degrees, 0.0);
    const AppearanceParams a = draw_appearance(rng, weak);
    EXPECT_FALSE(a.color_jitter || a.blur || a.to_gray || a.solarize);
  }
}

TEST(Geometric, GroupSharesExactKeypoints) {
  SampleGroup group;
  group.pose = random_pose(9, {64, 48});
  for (int k = 0; k < 4; ++k) group.images.push_back(random_image(64, 48, 20 + k));
  Rng rng(10, "group");
  const GeometricParams params = draw_geometric(rng, {64, 48}, {64, 48});
  const SampleGroup out = apply_geometric(group, params);
  EXPECT_EQ(out.pose, warp_pose(group.pose, params));
  ASSERT_EQ(out.images.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(out.images[k], warp_image(group.images[k], params));
}

TEST(Appearance, SolarizeMatchesReference) {
  Image img(1, 1);
  img.at(0, 0, 0) = 200;
  img.at(0, 0, 1) = 127;
  img.at(0, 0, 2) = 128;
  const Image out = solarize(img, 128.0f);
  EXPECT_EQ(out.at(0, 0, 0), 55.0f);
  EXPECT_EQ(out.at(0, 0, 1), 127.0f);
  EXPECT_EQ(out.at(0, 0, 2), 127.0f);
}

TEST(Appearance, GrayUsesLumaWeights) {
  Image img(1, 1);
  img.at(0, 0, 0) = 100;
  img.at(0, 0, 1) = 50;
  img.at(0, 0, 2) = 200;
  const Image out = to_gray(img);
  const float luma = 0.299f * 100 + 0.587f * 50 + 0.114f * 200;
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(out.at(0, 0, c), luma, 1e-3);
}

TEST(Appearance, BlurKeepsConstantImages) {
  const Image flat(10, 9, 77.0f);
  for (int k : {3, 5, 7}) {
    const Image out = gaussian_blur(flat, k);
    for (float v : out.data) ASSERT_NEAR(v, 77.0f, 1e-3);
  }
}

TEST(Appearance, ZeroJitterIsIdentity) {
  const Image img = random_image(6, 5, 11);
  const Image out = color_jitter(img, 0, 0, 0, 0);
  for (std::size_t i = 0; i < img.data.size(); ++i) ASSERT_NEAR(out.data[i], img.data[i], 1e-3);
}

TEST(Appearance, LeavesGeometryAlone) {
  const Image img = random_image(64, 48, 12);
  Rng rng(13, "appearance");
  for (int i = 0; i < 20; ++i) {
    const Image out = apply_appearance(img, draw_appearance(rng));
    EXPECT_EQ(out.height, 64);
    EXPECT_EQ(out.width, 48);
    for (float v : out.data) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 255.0f);
    }
  }
}

}  // namespace
}  // namespace posecon
