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

#include "core/pose.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace posecon {

int PoseLabel::visible_count() const {
  int count = 0;
  for (const auto& kp : keypoints) count += kp.visible ? 1 : 0;
  return count;
}

namespace {

std::string shortest(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace

void write_pose_file(const std::filesystem::path& path, const PoseLabel& pose) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open pose file for writing: " + path.string());
  for (const auto& kp : pose.keypoints) {
    out << shortest(kp.x) << ' ' << shortest(kp.y) << ' ' << (kp.visible ? 1 : 0) << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "failed writing pose file: " + path.string());
}

PoseLabel read_pose_file(const std::filesystem::path& path, std::string pose_id) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open pose file: " + path.string());
  PoseLabel pose;
  pose.pose_id = std::move(pose_id);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    require(count < kNumKeypoints, ErrorKind::kParse, "pose file has more than 17 records: " + path.string());
    std::istringstream fields(line);
    std::string xs, ys;
    int v = -1;
    fields >> xs >> ys >> v;
    require(!fields.fail() && (v == 0 || v == 1), ErrorKind::kParse,
            "malformed pose record " + std::to_string(count) + " in " + path.string());
    auto& kp = pose.keypoints[count];
    auto rx = std::from_chars(xs.data(), xs.data() + xs.size(), kp.x);
    auto ry = std::from_chars(ys.data(), ys.data() + ys.size(), kp.y);
    require(rx.ec == std::errc() && ry.ec == std::errc(), ErrorKind::kParse,
            "malformed coordinate in " + path.string());
    kp.visible = v == 1;
    ++count;
  }
  require(count == kNumKeypoints, ErrorKind::kParse,
          "pose file must hold 17 records, found " + std::to_string(count) + ": " + path.string());
  return pose;
}

}  // namespace posecon
