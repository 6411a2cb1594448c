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

#include "datagen/dataset.hpp"

#include <cstdio>

#include "core/error.hpp"
#include "datagen/filter.hpp"
#include "datagen/pose_sampler.hpp"
#include "datagen/render.hpp"

namespace posecon {

DatasetManifest build_dataset(const DatagenOptions& options, const std::filesystem::path& out_dir,
                              FilterStats* stats) {
  require(options.n_poses >= 1, ErrorKind::kInvalidArgument, "build_dataset: n_poses must be >= 1");
  require(options.m_variations >= 2, ErrorKind::kInvalidArgument, "build_dataset: variations must be >= 2");
  const CaptionGrammar& grammar = options.grammar ? *options.grammar : CaptionGrammar::default_grammar();
  grammar.validate();

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  require(!ec, ErrorKind::kIo, "cannot create " + (out_dir / "images").string() + ": " + ec.message());
  std::filesystem::create_directories(out_dir / "poses", ec);
  require(!ec, ErrorKind::kIo, "cannot create " + (out_dir / "poses").string() + ": " + ec.message());

  FilterStats local;
  DatasetManifest manifest;
  ProceduralBackend backend(options.image_hw);
  const Rng root(options.seed, "datagen");
  PoseSamplerOptions sampler;
  sampler.occlusion_probability = options.occlusion_probability;

  // Draws continue until n_poses groups pass the filter. Ids follow the draw
  // index, so rejected draws leave gaps.
  const int max_draws = 50 * options.n_poses + 100;
  for (int i = 0; local.accepted < options.n_poses; ++i) {
    require(i < max_draws, ErrorKind::kInvalidArgument,
            "build_dataset: only " + std::to_string(local.accepted) + " of " + std::to_string(i) +
                " drawn poses passed the filter; lower the occlusion probability");
    Rng rng = root.derive("pose/" + std::to_string(i));
    PoseLabel generated = sample_pose(rng, options.generation_hw, sampler);
    const BoundingBox box = visible_bbox(generated, options.generation_hw, options.bbox_margin);
    const FilterVerdict verdict = filter_sample(box, generated);
    if (verdict == FilterVerdict::kSmallBbox) {
      ++local.small_bbox;
      continue;
    }
    if (verdict == FilterVerdict::kTooFewKeypoints) {
      ++local.too_few_keypoints;
      continue;
    }
    ++local.accepted;

    char id[32];
    std::snprintf(id, sizeof(id), "p%06d", i);
    PoseLabel pose = rescale_pose(generated, options.generation_hw, options.image_hw);
    pose.pose_id = id;
    const SampleGroup group = render_group(pose, options.m_variations, rng, backend, grammar);

    ManifestEntry entry;
    entry.pose_id = id;
    entry.caption = group.caption;
    entry.bbox = {box.x, box.y, box.w, box.h};
    entry.pose_file = "poses/" + entry.pose_id + ".txt";
    write_pose_file(out_dir / entry.pose_file, pose);
    for (int k = 0; k < options.m_variations; ++k) {
      const std::string name = "images/" + entry.pose_id + "_" + std::to_string(k) + ".png";
      write_png(out_dir / name, group.images[k]);
      entry.image_files.push_back(name);
    }
    manifest.entries.push_back(std::move(entry));
  }
  write_manifest(out_dir, manifest);
  if (stats) *stats = local;
  return manifest;
}

}  // namespace posecon
