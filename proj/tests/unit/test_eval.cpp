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

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "core/image.hpp"
#include "eval/projection.hpp"
#include "eval/retrieval.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

namespace posecon {
namespace {

using testing::TempDir;

// Brute force: rank by cosine with the same tie-break priority the library
// documents (one seeded permutation shared by all anchors).
RetrievalMetrics brute_force(const MatrixXd& e, const std::vector<int>& labels, std::uint64_t seed) {
  const int n = static_cast<int>(e.rows());
  std::vector<int> priority(n);
  for (int i = 0; i < n; ++i) priority[i] = i;
  Rng rng(seed, "retrieval/tie-break");
  rng.shuffle(priority);
  auto cosine = [&](int a, int b) {
    const double na = e.row(a).norm(), nb = e.row(b).norm();
    if (na == 0 || nb == 0) return 0.0;
    return (e.row(a) / na).dot(e.row(b) / nb);
  };
  RetrievalMetrics out;
  for (int a = 0; a < n; ++a) {
    // Selection sort, deliberately naive.
    std::vector<int> remaining;
    for (int j = 0; j < n; ++j) {
      if (j != a) remaining.push_back(j);
    }
    std::vector<int> ranked;
    while (!remaining.empty()) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < remaining.size(); ++k) {
        const double sk = cosine(a, remaining[k]), sb = cosine(a, remaining[best]);
        if (sk > sb || (sk == sb && priority[remaining[k]] < priority[remaining[best]])) best = k;
      }
      ranked.push_back(remaining[best]);
      remaining.erase(remaining.begin() + static_cast<long>(best));
    }
    out.top1 += labels[ranked[0]] == labels[a];
    double ap = 0;
    int hits = 0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      if (labels[ranked[r]] == labels[a]) ap += static_cast<double>(++hits) / (r + 1);
    }
    out.mean_average_precision += ap / hits;
  }
  out.top1 /= n;
  out.mean_average_precision /= n;
  return out;
}

MatrixXd random_embeddings(int rows, int dim, Rng& rng) {
  MatrixXd m(rows, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

TEST(Retrieval, MatchesBruteForce) {
  Rng rng(1, "retrieval");
  for (int trial = 0; trial < 40; ++trial) {
    const int poses = rng.uniform_int(2, 10), m = rng.uniform_int(2, 5);
    if (poses * m > 50) continue;
    std::vector<int> labels;
    for (int i = 0; i < poses * m; ++i) labels.push_back(i / m);
    MatrixXd e = random_embeddings(poses * m, 3, rng);
    if (trial % 4 == 0) e.row(1) = e.row(0) * 2.0;  // exact tie in cosine
    const auto fast = retrieval_metrics(e, labels, trial);
    const auto slow = brute_force(e, labels, trial);
    EXPECT_EQ(fast.top1, slow.top1);
    EXPECT_NEAR(fast.mean_average_precision, slow.mean_average_precision, 1e-12);
  }
}

TEST(Retrieval, OneHotEmbeddingsArePerfect) {
  std::vector<int> labels;
  MatrixXd e = MatrixXd::Zero(12, 4);
  for (int i = 0; i < 12; ++i) {
    labels.push_back(i / 3);
    e(i, i / 3) = 1.0;
  }
  const auto r = retrieval_metrics(e, labels);
  EXPECT_EQ(r.top1, 1.0);
  EXPECT_EQ(r.mean_average_precision, 1.0);
}

TEST(Retrieval, ConstantEmbeddingsSitAtChance) {
  const int poses = 64, m = 4;
  std::vector<int> labels;
  for (int i = 0; i < poses * m; ++i) labels.push_back(i / m);
  const MatrixXd e = MatrixXd::Ones(poses * m, 8);
  double mean = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) mean += retrieval_metrics(e, labels, seed).top1 / 20;
  EXPECT_NEAR(mean, chance_level(poses, m), 0.01);
  EXPECT_DOUBLE_EQ(chance_level(poses, m), 3.0 / 255.0);
}

TEST(Retrieval, ScaleInvariant) {
  Rng rng(2, "scale");
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(i / 3);
  const MatrixXd e = random_embeddings(30, 6, rng);
  const auto base = retrieval_metrics(e, labels, 4);
  for (double k : {0.5, 3.0, 1e3}) {
    const auto scaled = retrieval_metrics(e * k, labels, 4);
    EXPECT_EQ(scaled.top1, base.top1);
    EXPECT_NEAR(scaled.mean_average_precision, base.mean_average_precision, 1e-12);
  }
}

TEST(Retrieval, RejectsSingletonGroups) {
  EXPECT_THROW(chance_level(10, 1), Error);
  const TrainConfig c = fixtures::tiny_config();
  const MaskedAutoencoder model(c.model_config(), 1);
  EXPECT_THROW(pose_retrieval(model, fixtures::make_groups(3, 2, c.image_hw, 1), 1), Error);
}

TEST(Retrieval, ReportBreakdown) {
  const TrainConfig c = fixtures::tiny_config();
  const auto groups = fixtures::make_groups(5, 3, c.image_hw, 2);
  const MaskedAutoencoder with_pose(c.model_config(), 1);
  const RetrievalReport r = pose_retrieval(with_pose, groups, 3);
  EXPECT_EQ(r.num_poses, 5);
  EXPECT_EQ(r.m, 3);
  EXPECT_DOUBLE_EQ(r.chance_level, 2.0 / 14.0);
  ASSERT_TRUE(r.pose.has_value());
  for (const auto& metrics : {r.cls, *r.pose}) {
    EXPECT_GE(metrics.top1, 0.0);
    EXPECT_LE(metrics.top1, 1.0);
    EXPECT_GT(metrics.mean_average_precision, 0.0);
  }
  TrainConfig no_pose = c;
  no_pose.use_pose_token = false;
  const RetrievalReport r2 = pose_retrieval(MaskedAutoencoder(no_pose.model_config(), 1), groups, 3);
  EXPECT_FALSE(r2.pose.has_value());
  EXPECT_THROW(r2.metrics(TokenKind::kPose), Error);
}

TEST(Projection, PointCountAndDeterminism) {
  Rng rng(3, "proj");
  const MatrixXd x = random_embeddings(6 * 64, 16, rng);
  ProjectionOptions opts;
  opts.iterations = 300;
  const MatrixXd a = tsne(x, opts), b = tsne(x, opts);
  EXPECT_EQ(a.rows(), 384);
  EXPECT_EQ(a.cols(), 2);
  EXPECT_EQ(a, b);
}

TEST(Projection, SeparatesTwoClusters) {
  Rng rng(4, "clusters");
  MatrixXd x(40, 8);
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    labels.push_back(i / 20);
    for (int k = 0; k < 8; ++k) x(i, k) = (i < 20 ? 0.0 : 10.0) + 0.1 * rng.normal();
  }
  const MatrixXd y = tsne(x);
  // Every point's nearest embedded neighbour comes from its own cluster.
  for (int i = 0; i < 40; ++i) {
    int nearest = -1;
    double best = 1e300;
    for (int j = 0; j < 40; ++j) {
      if (j != i && (y.row(i) - y.row(j)).squaredNorm() < best) {
        best = (y.row(i) - y.row(j)).squaredNorm();
        nearest = j;
      }
    }
    EXPECT_EQ(labels[nearest], labels[i]) << "point " << i;
  }
}

TEST(Projection, WritesCsvAndPng) {
  TempDir dir("proj_out");
  MatrixXd y(3, 2);
  y << 0, 0, 1, 2, -1, 0.5;
  write_projection_csv(dir / "p.csv", y, {0, 1, 1}, {"a", "b"});
  write_projection_png(dir / "p.png", y, {0, 1, 1}, 64);
  std::ifstream in(dir / "p.csv");
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "index,pose_id,label,x,y");
  EXPECT_EQ(first, "0,a,0,0,0");
  const Image img = read_png(dir / "p.png");
  EXPECT_EQ(img.width, 64);
  EXPECT_THROW(write_projection_csv(dir / "no/such/dir.csv", y, {0, 1, 1}, {"a", "b"}), Error);
}

}  // namespace
}  // namespace posecon
