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

#include "datagen/pose_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/error.hpp"

namespace posecon {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 add(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 scale(Vec2 a, double s) { return {a.x * s, a.y * s}; }

// Unit vector at `angle` radians from straight down (+y), rotating toward +x.
Vec2 dir_from_down(double angle) { return {std::sin(angle), std::cos(angle)}; }

// Skeleton in body units (1 = standing height) around a hip-center root.
std::array<Vec2, kNumKeypoints> draw_skeleton(Rng& rng) {
  auto jitter = [&rng](double length) { return length * rng.uniform(0.9, 1.1); };

  std::array<Vec2, kNumKeypoints> p{};
  const double lean = rng.uniform(-25.0, 25.0) * kDeg;
  const Vec2 up = scale(dir_from_down(lean), -1.0);
  const Vec2 side = {-up.y, up.x};  // points toward image +x when upright

  const Vec2 hip_center{0.0, 0.0};
  const Vec2 shoulder_center = scale(up, jitter(0.30));
  const double shoulder_half = jitter(0.11);
  const double hip_half = jitter(0.08);

  // Front-facing: the person's left side appears on the image right.
  p[kLeftShoulder] = add(shoulder_center, scale(side, shoulder_half));
  p[kRightShoulder] = add(shoulder_center, scale(side, -shoulder_half));
  p[kLeftHip] = add(hip_center, scale(side, hip_half));
  p[kRightHip] = add(hip_center, scale(side, -hip_half));

  const double head_tilt = rng.uniform(-20.0, 20.0) * kDeg;
  const Vec2 head_up = scale(dir_from_down(lean + head_tilt), -1.0);
  const Vec2 head_side = {-head_up.y, head_up.x};
  p[kNose] = add(shoulder_center, scale(head_up, jitter(0.12)));
  const Vec2 eye_mid = add(p[kNose], scale(head_up, 0.02));
  p[kLeftEye] = add(eye_mid, scale(head_side, 0.025));
  p[kRightEye] = add(eye_mid, scale(head_side, -0.025));
  p[kLeftEar] = add(p[kNose], scale(head_side, 0.055));
  p[kRightEar] = add(p[kNose], scale(head_side, -0.055));

  // Arms: angle measured from hanging straight down, positive = raised
  // outward; the elbow bends relative to the upper arm.
  for (int s = 0; s < 2; ++s) {
    const double outward = s == 0 ? 1.0 : -1.0;  // left arm extends toward +side
    const int shoulder = s == 0 ? kLeftShoulder : kRightShoulder;
    const int elbow = s == 0 ? kLeftElbow : kRightElbow;
    const int wrist = s == 0 ? kLeftWrist : kRightWrist;
    const double raise = rng.uniform(-30.0, 170.0) * kDeg;
    const double bend = rng.uniform(-20.0, 140.0) * kDeg;
    const double upper_angle = lean + outward * raise;
    const double fore_angle = upper_angle + outward * bend;
    p[elbow] = add(p[shoulder], scale(dir_from_down(upper_angle), jitter(0.17)));
    p[wrist] = add(p[elbow], scale(dir_from_down(fore_angle), jitter(0.15)));
  }

  for (int s = 0; s < 2; ++s) {
    const double outward = s == 0 ? 1.0 : -1.0;
    const int hip = s == 0 ? kLeftHip : kRightHip;
    const int knee = s == 0 ? kLeftKnee : kRightKnee;
    const int ankle = s == 0 ? kLeftAnkle : kRightAnkle;
    const double spread = rng.uniform(-15.0, 60.0) * kDeg;
    const double bend = rng.uniform(-10.0, 100.0) * kDeg;
    const double thigh_angle = outward * spread;
    const double shin_angle = thigh_angle - outward * bend;
    p[knee] = add(p[hip], scale(dir_from_down(thigh_angle), jitter(0.24)));
    p[ankle] = add(p[knee], scale(dir_from_down(shin_angle), jitter(0.23)));
  }
  return p;
}

}  // namespace

PoseLabel sample_pose(Rng& rng, ImageHW image_hw, const PoseSamplerOptions& options) {
  require(image_hw.height >= 32 && image_hw.width >= 32, ErrorKind::kInvalidArgument,
          "sample_pose needs a frame of at least 32x32");
  const double margin = options.edge_margin * std::min(image_hw.height, image_hw.width);
  const double avail_w = image_hw.width - 1 - 2 * margin;
  const double avail_h = image_hw.height - 1 - 2 * margin;

  for (int attempt = 0; attempt < options.max_retries; ++attempt) {
    const auto body = draw_skeleton(rng);
    double min_x = std::numeric_limits<double>::max(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const auto& v : body) {
      min_x = std::min(min_x, v.x);
      max_x = std::max(max_x, v.x);
      min_y = std::min(min_y, v.y);
      max_y = std::max(max_y, v.y);
    }
    const double extent_w = max_x - min_x;
    const double extent_h = max_y - min_y;
    const double fit = std::min(avail_w / extent_w, avail_h / extent_h);
    const double body_height = image_hw.height * rng.uniform(0.6, 0.9);
    const double s = std::min(body_height, fit);
    // Reject draws that would have to shrink far below the requested size;
    // they are sprawled poses that read poorly at small resolutions.
    if (s < 0.55 * image_hw.height && fit < body_height) continue;

    const double slack_x = avail_w - extent_w * s;
    const double slack_y = avail_h - extent_h * s;
    const double ox = margin + rng.uniform(0.0, std::max(slack_x, 0.0)) - min_x * s;
    const double oy = margin + rng.uniform(0.0, std::max(slack_y, 0.0)) - min_y * s;

    PoseLabel pose;
    bool inside = true;
    for (int j = 0; j < kNumKeypoints; ++j) {
      auto& kp = pose.keypoints[j];
      kp.x = ox + body[j].x * s;
      kp.y = oy + body[j].y * s;
      inside = inside && kp.x >= 0.0 && kp.x <= image_hw.width - 1 && kp.y >= 0.0 &&
               kp.y <= image_hw.height - 1;
    }
    if (!inside) continue;
    for (auto& kp : pose.keypoints) kp.visible = !rng.bernoulli(options.occlusion_probability);
    return pose;
  }
  fail(ErrorKind::kState, "sample_pose: no admissible skeleton after " +
                              std::to_string(options.max_retries) + " attempts");
}

PoseLabel rescale_pose(const PoseLabel& pose, ImageHW from, ImageHW to) {
  PoseLabel out = pose;
  const double sx = static_cast<double>(to.width) / from.width;
  const double sy = static_cast<double>(to.height) / from.height;
  for (auto& kp : out.keypoints) {
    kp.x = (kp.x + 0.5) * sx - 0.5;
    kp.y = (kp.y + 0.5) * sy - 0.5;
  }
  return out;
}

BoundingBox visible_bbox(const PoseLabel& pose, ImageHW frame, double margin) {
  double min_x = std::numeric_limits<double>::max(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  bool any = false;
  for (const auto& kp : pose.keypoints) {
    if (!kp.visible) continue;
    any = true;
    min_x = std::min(min_x, kp.x);
    max_x = std::max(max_x, kp.x);
    min_y = std::min(min_y, kp.y);
    max_y = std::max(max_y, kp.y);
  }
  if (!any) return {};
  const double x0 = std::max(0.0, min_x - margin);
  const double y0 = std::max(0.0, min_y - margin);
  const double x1 = std::min(static_cast<double>(frame.width), max_x + margin);
  const double y1 = std::min(static_cast<double>(frame.height), max_y + margin);
  return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace posecon
