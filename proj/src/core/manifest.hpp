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
#include <vector>

#include "core/image.hpp"
#include "core/pose.hpp"

namespace posecon {

inline constexpr int kManifestVersion = 1;

// One pose together with its appearance variations.
struct SampleGroup {
  PoseLabel pose;
  std::vector<Image> images;
  std::string caption;
};

struct ManifestEntry {
  std::string pose_id;
  std::string pose_file;                 // relative to the dataset directory
  std::vector<std::string> image_files;  // relative to the dataset directory
  std::string caption;
  std::array<double, 4> bbox{};          // x, y, w, h at generation scale

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  int format_version = kManifestVersion;
  std::vector<ManifestEntry> entries;

  bool operator==(const DatasetManifest&) const = default;
};

// dir/manifest.jsonl, one JSON object per entry.
void write_manifest(const std::filesystem::path& dataset_dir, const DatasetManifest& manifest);
// Reads and validates: schema version, unique pose ids, every referenced file
// present.
DatasetManifest read_manifest(const std::filesystem::path& dataset_dir);

SampleGroup load_group(const std::filesystem::path& dataset_dir, const ManifestEntry& entry);

}  // namespace posecon
