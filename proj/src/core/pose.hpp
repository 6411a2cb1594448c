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
#include <filesystem>
#include <string>
#include <utility>

namespace posecon {

inline constexpr int kNumKeypoints = 17;

// COCO keypoint order.
enum Joint : int {
  kNose = 0,
  kLeftEye,
  kRightEye,
  kLeftEar,
  kRightEar,
  kLeftShoulder,
  kRightShoulder,
  kLeftElbow,
  kRightElbow,
  kLeftWrist,
  kRightWrist,
  kLeftHip,
  kRightHip,
  kLeftKnee,
  kRightKnee,
  kLeftAnkle,
  kRightAnkle,
};

inline constexpr std::array<const char*, kNumKeypoints> kJointNames = {
    "nose",       "left_eye",       "right_eye",      "left_ear",    "right_ear",
    "left_shoulder", "right_shoulder", "left_elbow",  "right_elbow", "left_wrist",
    "right_wrist", "left_hip",      "right_hip",      "left_knee",   "right_knee",
    "left_ankle", "right_ankle"};

// Left/right partner of every joint (self for the nose).
inline constexpr std::array<int, kNumKeypoints> kFlipPartner = {
    0, 2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11, 14, 13, 16, 15};

// COCO skeleton topology, 0-based.
inline constexpr std::array<std::pair<int, int>, 19> kSkeletonEdges = {{
    {15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12},
    {5, 6},   {5, 7},   {6, 8},   {7, 9},   {8, 10},  {1, 2},  {0, 1},
    {0, 2},   {1, 3},   {2, 4},   {3, 5},   {4, 6},
}};

struct Keypoint {
  double x = 0.0;  // pixel column, origin top-left
  double y = 0.0;  // pixel row
  bool visible = false;

  bool operator==(const Keypoint&) const = default;
};

struct PoseLabel {
  std::string pose_id;
  std::array<Keypoint, kNumKeypoints> keypoints{};

  int visible_count() const;
  // Geometry equality, ignoring the identifier.
  bool same_geometry(const PoseLabel& other) const { return keypoints == other.keypoints; }

  bool operator==(const PoseLabel&) const = default;
};

struct ImageHW {
  int height = 0;
  int width = 0;

  bool operator==(const ImageHW&) const = default;
};

// Plain text: 17 lines of "x y v" with v in {0, 1}.
void write_pose_file(const std::filesystem::path& path, const PoseLabel& pose);
PoseLabel read_pose_file(const std::filesystem::path& path, std::string pose_id);

}  // namespace posecon
