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
#include <optional>
#include <string_view>
#include <vector>

#include "core/manifest.hpp"
#include "losses/losses.hpp"
#include "model/vit_mae.hpp"

namespace posecon {

enum class TokenKind { kCls, kPose };

TokenKind parse_token_kind(std::string_view name);
std::string_view token_kind_name(TokenKind kind);

struct RetrievalMetrics {
  double top1 = 0.0;
  double mean_average_precision = 0.0;
};

struct RetrievalReport {
  int num_poses = 0;
  int m = 0;
  double chance_level = 0.0;
  RetrievalMetrics cls;
  std::optional<RetrievalMetrics> pose;  // absent when the model has no [POSE] token

  const RetrievalMetrics& metrics(TokenKind kind) const;
};

// Probability that a uniformly random other image shares the anchor's pose.
double chance_level(int num_poses, int m);

// Rows are l2-normalized (zero rows stay zero), every other row is ranked by
// cosine similarity, exact ties are broken by a seeded random order.
RetrievalMetrics retrieval_metrics(const MatrixXd& embeddings, const std::vector<int>& labels,
                                   std::uint64_t seed = 0);

// Embeds the first m images of every group with all patches visible.
RetrievalReport pose_retrieval(const MaskedAutoencoder& model, const std::vector<SampleGroup>& groups, int m,
                               std::uint64_t seed = 0);

// Token embeddings (one row per image, group-major) and their group labels.
struct EmbeddingSet {
  MatrixXd embeddings;
  std::vector<int> labels;
  std::vector<std::string> pose_ids;  // per group
};
EmbeddingSet embed_groups(const MaskedAutoencoder& model, const std::vector<SampleGroup>& groups, int m,
                          TokenKind kind);

}  // namespace posecon
