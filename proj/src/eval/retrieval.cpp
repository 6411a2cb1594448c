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

#include "eval/retrieval.hpp"

#include <algorithm>
#include <numeric>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace posecon {

TokenKind parse_token_kind(std::string_view name) {
  if (name == "cls") return TokenKind::kCls;
  if (name == "pose") return TokenKind::kPose;
  fail(ErrorKind::kInvalidArgument, "unknown token '" + std::string(name) + "' (expected cls or pose)");
}

std::string_view token_kind_name(TokenKind kind) { return kind == TokenKind::kPose ? "pose" : "cls"; }

const RetrievalMetrics& RetrievalReport::metrics(TokenKind kind) const {
  if (kind == TokenKind::kCls) return cls;
  require(pose.has_value(), ErrorKind::kInvalidArgument, "report has no [POSE] token metrics");
  return *pose;
}

double chance_level(int num_poses, int m) {
  require(num_poses >= 1 && m >= 2, ErrorKind::kInvalidArgument, "chance level needs m >= 2");
  return static_cast<double>(m - 1) / static_cast<double>(num_poses * m - 1);
}

RetrievalMetrics retrieval_metrics(const MatrixXd& embeddings, const std::vector<int>& labels, std::uint64_t seed) {
  const auto n = static_cast<int>(embeddings.rows());
  require(n == static_cast<int>(labels.size()), ErrorKind::kShape, "one label per embedding row required");
  require(n >= 2, ErrorKind::kInvalidArgument, "retrieval needs at least two embeddings");

  MatrixXd z = embeddings;
  for (int i = 0; i < n; ++i) {
    const double norm = z.row(i).norm();
    if (norm > 0.0) z.row(i) /= norm;
  }
  const MatrixXd sim = z * z.transpose();

  // One tie-break priority per image, shared by all anchors.
  std::vector<int> priority(n);
  std::iota(priority.begin(), priority.end(), 0);
  Rng rng(seed, "retrieval/tie-break");
  rng.shuffle(priority);

  RetrievalMetrics out;
  int anchors_with_positives = 0;
  std::vector<int> ranked;
  for (int a = 0; a < n; ++a) {
    ranked.clear();
    for (int j = 0; j < n; ++j) {
      if (j != a) ranked.push_back(j);
    }
    std::sort(ranked.begin(), ranked.end(), [&](int x, int y) {
      if (sim(a, x) != sim(a, y)) return sim(a, x) > sim(a, y);
      return priority[x] < priority[y];
    });
    if (labels[ranked.front()] == labels[a]) out.top1 += 1.0;
    int hits = 0;
    double ap = 0.0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      if (labels[ranked[r]] == labels[a]) {
        ++hits;
        ap += static_cast<double>(hits) / static_cast<double>(r + 1);
      }
    }
    if (hits > 0) {
      out.mean_average_precision += ap / hits;
      ++anchors_with_positives;
    }
  }
  out.top1 /= n;
  if (anchors_with_positives > 0) out.mean_average_precision /= anchors_with_positives;
  return out;
}

EmbeddingSet embed_groups(const MaskedAutoencoder& model, const std::vector<SampleGroup>& groups, int m,
                          TokenKind kind) {
  require(m >= 2, ErrorKind::kInvalidArgument, "retrieval needs m >= 2 images per pose");
  EmbeddingSet set;
  std::vector<Image> images;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    require(static_cast<int>(groups[g].images.size()) >= m, ErrorKind::kInvalidArgument,
            "pose group " + groups[g].pose.pose_id + " has fewer than " + std::to_string(m) + " images");
    set.pose_ids.push_back(groups[g].pose.pose_id);
    for (int k = 0; k < m; ++k) {
      images.push_back(groups[g].images[k]);
      set.labels.push_back(static_cast<int>(g));
    }
  }
  set.embeddings = model.embed(images, kind == TokenKind::kPose).cast<double>();
  return set;
}

RetrievalReport pose_retrieval(const MaskedAutoencoder& model, const std::vector<SampleGroup>& groups, int m,
                               std::uint64_t seed) {
  RetrievalReport report;
  report.num_poses = static_cast<int>(groups.size());
  report.m = m;
  report.chance_level = chance_level(report.num_poses, m);
  const EmbeddingSet cls = embed_groups(model, groups, m, TokenKind::kCls);
  report.cls = retrieval_metrics(cls.embeddings, cls.labels, seed);
  if (model.config().use_pose_token) {
    const EmbeddingSet pose = embed_groups(model, groups, m, TokenKind::kPose);
    report.pose = retrieval_metrics(pose.embeddings, pose.labels, seed);
  }
  return report;
}

}  // namespace posecon
