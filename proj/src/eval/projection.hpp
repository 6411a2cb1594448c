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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "losses/losses.hpp"

namespace posecon {

struct ProjectionOptions {
  double perplexity = 30.0;  // lowered automatically for small inputs
  int iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  std::uint64_t seed = 0;
};

// Exact t-SNE to two dimensions. Returns one (x, y) row per input row.
MatrixXd tsne(const MatrixXd& points, const ProjectionOptions& options = {});

// CSV with columns index,pose_id,label,x,y.
void write_projection_csv(const std::filesystem::path& path, const MatrixXd& coords, const std::vector<int>& labels,
                          const std::vector<std::string>& pose_ids);
// Scatter plot, one color per label, on a white square canvas.
void write_projection_png(const std::filesystem::path& path, const MatrixXd& coords, const std::vector<int>& labels,
                          int size = 512);

}  // namespace posecon
