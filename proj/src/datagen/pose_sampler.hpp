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

#include "core/pose.hpp"
#include "core/rng.hpp"

namespace posecon {

struct PoseSamplerOptions {
  double occlusion_probability = 0.0;
  // Margin kept between every keypoint and the frame edge, as a fraction of
  // the shorter image side.
  double edge_margin = 0.04;
  int max_retries = 200;
};

// Draws a front-facing 17-keypoint skeleton with plausible limb proportions.
// All keypoints (visible or not) land inside the frame; each is hidden
// independently with the configured occlusion probability.
PoseLabel sample_pose(Rng& rng, ImageHW image_hw, const PoseSamplerOptions& options = {});

// Maps pixel-center coordinates from one frame size to another.
PoseLabel rescale_pose(const PoseLabel& pose, ImageHW from, ImageHW to);

// Tight box (x, y, w, h) around the visible keypoints, grown by `margin` on
// every side and clipped to the frame. Empty when nothing is visible.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
};

BoundingBox visible_bbox(const PoseLabel& pose, ImageHW frame, double margin);

}  // namespace posecon
