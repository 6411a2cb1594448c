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

#include "core/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "core/error.hpp"

namespace posecon {

using nlohmann::json;

void write_manifest(const std::filesystem::path& dataset_dir, const DatasetManifest& manifest) {
  const auto path = dataset_dir / "manifest.jsonl";
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& e : manifest.entries) {
    json record = {
        {"schema_version", manifest.format_version},
        {"pose_id", e.pose_id},
        {"pose_file", e.pose_file},
        {"images", e.image_files},
        {"caption", e.caption},
        {"bbox", e.bbox},
    };
    out << record.dump() << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "failed writing " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& dataset_dir) {
  const auto path = dataset_dir / "manifest.jsonl";
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());

  DatasetManifest manifest;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& ex) {
      fail(ErrorKind::kParse, where + ": " + ex.what());
    }
    ManifestEntry e;
    try {
      const int version = record.at("schema_version").get<int>();
      require(version == kManifestVersion, ErrorKind::kParse,
              where + ": unsupported schema_version " + std::to_string(version));
      manifest.format_version = version;
      e.pose_id = record.at("pose_id").get<std::string>();
      e.pose_file = record.at("pose_file").get<std::string>();
      e.image_files = record.at("images").get<std::vector<std::string>>();
      e.caption = record.at("caption").get<std::string>();
      if (record.contains("bbox")) e.bbox = record.at("bbox").get<std::array<double, 4>>();
    } catch (const json::exception& ex) {
      fail(ErrorKind::kParse, where + ": " + ex.what());
    }
    require(seen.insert(e.pose_id).second, ErrorKind::kParse, where + ": duplicate pose_id " + e.pose_id);
    require(std::filesystem::exists(dataset_dir / e.pose_file), ErrorKind::kIo,
            where + ": missing pose file " + e.pose_file);
    for (const auto& f : e.image_files) {
      require(std::filesystem::exists(dataset_dir / f), ErrorKind::kIo, where + ": missing image " + f);
    }
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

SampleGroup load_group(const std::filesystem::path& dataset_dir, const ManifestEntry& entry) {
  SampleGroup group;
  group.pose = read_pose_file(dataset_dir / entry.pose_file, entry.pose_id);
  group.caption = entry.caption;
  for (const auto& f : entry.image_files) group.images.push_back(read_png(dataset_dir / f));
  return group;
}

}  // namespace posecon
