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

#include "eval/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "core/error.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"

namespace posecon {
namespace {

MatrixXd squared_distances(const MatrixXd& x) {
  const Eigen::VectorXd sq = x.rowwise().squaredNorm();
  MatrixXd d = (-2.0 * x * x.transpose()).colwise() + sq;
  d.rowwise() += sq.transpose();
  return d.cwiseMax(0.0);
}

// Row-conditional affinities whose entropy matches log(perplexity), found by
// bisection on the Gaussian precision.
MatrixXd conditional_affinities(const MatrixXd& dist, double perplexity) {
  const Eigen::Index n = dist.rows();
  const double target = std::log(perplexity);
  MatrixXd p = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 100; ++iter) {
      double sum = 0.0, weighted = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = std::exp(-beta * dist(i, j));
        p(i, j) = w;
        sum += w;
        weighted += w * dist(i, j);
      }
      if (sum <= 0.0) {
        // Precision too high for every neighbor; back off.
        hi = beta;
        beta = (lo + beta) / 2.0;
        continue;
      }
      const double entropy = std::log(sum) + beta * weighted / sum;
      p.row(i) /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
    p(i, i) = 0.0;
  }
  return p;
}

struct Rgb8 {
  float r, g, b;
};

// Evenly spread hues at full saturation.
Rgb8 label_color(int label, int count) {
  const double h = 6.0 * static_cast<double>(label) / std::max(count, 1);
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const float v = 220.0f, lo = 30.0f;
  const auto up = static_cast<float>(lo + (v - lo) * f), down = static_cast<float>(v - (v - lo) * f);
  switch (sector) {
    case 0: return {v, up, lo};
    case 1: return {down, v, lo};
    case 2: return {lo, v, up};
    case 3: return {lo, down, v};
    case 4: return {up, lo, v};
    default: return {v, lo, down};
  }
}

}  // namespace

MatrixXd tsne(const MatrixXd& points, const ProjectionOptions& options) {
  const Eigen::Index n = points.rows();
  require(n >= 2, ErrorKind::kInvalidArgument, "projection needs at least two points");
  require(options.iterations >= 1 && options.perplexity > 0.0, ErrorKind::kInvalidArgument,
          "projection iterations and perplexity must be positive");

  const double perplexity = std::min(options.perplexity, std::max(1.0, (static_cast<double>(n) - 1.0) / 3.0));
  MatrixXd p = conditional_affinities(squared_distances(points), perplexity);
  p = (p + p.transpose()) / (2.0 * static_cast<double>(n));
  p = p.cwiseMax(1e-12);
  p.diagonal().setZero();

  Rng rng(options.seed, "projection/init");
  MatrixXd y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i, 0) = 1e-4 * rng.normal();
    y(i, 1) = 1e-4 * rng.normal();
  }
  MatrixXd velocity = MatrixXd::Zero(n, 2);
  MatrixXd gains = MatrixXd::Ones(n, 2);
  MatrixXd grad(n, 2);
  MatrixXd num(n, n);

  for (int iter = 0; iter < options.iterations; ++iter) {
    const double exaggeration = iter < options.exaggeration_iterations ? options.early_exaggeration : 1.0;
    const double momentum = iter < options.exaggeration_iterations ? 0.5 : 0.8;

    num = (1.0 + squared_distances(y).array()).inverse().matrix();
    num.diagonal().setZero();
    const double z = std::max(num.sum(), 1e-300);

    // dC/dy_i = 4 sum_j (P_ij - Q_ij) num_ij (y_i - y_j)
    const MatrixXd w = ((exaggeration * p).array() - num.array() / z).matrix().cwiseProduct(num);
    const Eigen::VectorXd row_sum = w.rowwise().sum();
    grad = 4.0 * (row_sum.asDiagonal() * y - w * y);

    for (Eigen::Index i = 0; i < n; ++i) {
      for (int d = 0; d < 2; ++d) {
        const bool same_sign = (grad(i, d) > 0.0) == (velocity(i, d) > 0.0);
        gains(i, d) = same_sign ? std::max(gains(i, d) * 0.8, 0.01) : gains(i, d) + 0.2;
        velocity(i, d) = momentum * velocity(i, d) - options.learning_rate * gains(i, d) * grad(i, d);
        y(i, d) += velocity(i, d);
      }
    }
    y.rowwise() -= y.colwise().mean();
  }
  return y;
}

void write_projection_csv(const std::filesystem::path& path, const MatrixXd& coords, const std::vector<int>& labels,
                          const std::vector<std::string>& pose_ids) {
  require(static_cast<std::size_t>(coords.rows()) == labels.size(), ErrorKind::kShape,
          "one label per projected point required");
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << "index,pose_id,label,x,y\n";
  char buf[64];
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    const int label = labels[i];
    const std::string id = label >= 0 && label < static_cast<int>(pose_ids.size()) ? pose_ids[label] : "";
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g", coords(i, 0), coords(i, 1));
    out << i << ',' << id << ',' << label << ',' << buf << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "failed writing " + path.string());
}

void write_projection_png(const std::filesystem::path& path, const MatrixXd& coords, const std::vector<int>& labels,
                          int size) {
  require(static_cast<std::size_t>(coords.rows()) == labels.size(), ErrorKind::kShape,
          "one label per projected point required");
  require(size >= 16, ErrorKind::kInvalidArgument, "plot size must be at least 16 pixels");
  Image canvas;
  canvas.height = size;
  canvas.width = size;
  canvas.data.assign(static_cast<std::size_t>(size) * size * 3, 255.0f);

  const int label_count = labels.empty() ? 1 : *std::max_element(labels.begin(), labels.end()) + 1;
  const Eigen::Vector2d lo = coords.colwise().minCoeff().transpose();
  const Eigen::Vector2d hi = coords.colwise().maxCoeff().transpose();
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  const double margin = 0.06 * size;
  const double scale = (size - 2.0 * margin) / span;
  const int radius = std::max(2, size / 160);

  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    const Rgb8 c = label_color(labels[i], label_count);
    const int cx = static_cast<int>(std::lround(margin + (coords(i, 0) - lo.x()) * scale));
    const int cy = static_cast<int>(std::lround(size - margin - (coords(i, 1) - lo.y()) * scale));
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) {
        if (dx * dx + dy * dy > radius * radius) continue;
        const int x = cx + dx, yy = cy + dy;
        if (x < 0 || yy < 0 || x >= size || yy >= size) continue;
        canvas.at(yy, x, 0) = c.r;
        canvas.at(yy, x, 1) = c.g;
        canvas.at(yy, x, 2) = c.b;
      }
    }
  }
  write_png(path, canvas);
}

}  // namespace posecon
