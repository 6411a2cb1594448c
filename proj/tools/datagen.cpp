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

// Generates a pose-grouped synthetic dataset.

#include <cstdio>

#include <CLI11.hpp>

#include "posecon/posecon.h"

int main(int argc, char** argv) {
  CLI::App app{"Render pose groups with appearance variations and write a dataset manifest"};
  pc_datagen_options options;
  pc_datagen_default_options(&options);
  std::string out_dir;
  app.add_option("--n-poses", options.n_poses, "Pose groups to keep after filtering")->check(CLI::PositiveNumber);
  app.add_option("--variations", options.m_variations, "Images per pose")->check(CLI::Range(2u, 1024u));
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--seed", options.seed, "Random seed");
  app.add_option("--occlusion", options.occlusion_probability, "Per-keypoint occlusion probability")
      ->check(CLI::Range(0.0, 1.0));
  CLI11_PARSE(app, argc, argv);

  pc_datagen_stats stats;
  if (pc_datagen_build(&options, out_dir.c_str(), &stats) != PC_OK) {
    std::fprintf(stderr, "datagen: %s\n", pc_last_error());
    return 1;
  }
  std::printf("drawn %llu, accepted %llu, rejected small_bbox %llu, rejected few_keypoints %llu\n",
              static_cast<unsigned long long>(stats.attempted), static_cast<unsigned long long>(stats.accepted),
              static_cast<unsigned long long>(stats.rejected_small_bbox),
              static_cast<unsigned long long>(stats.rejected_few_keypoints));
  std::printf("wrote %s/manifest.jsonl\n", out_dir.c_str());
  return 0;
}
