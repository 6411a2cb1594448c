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

// Brute-force reference implementations used as test oracles. They follow
// the textbook definitions with explicit loops and share no code with the
// library.

#include <cmath>
#include <vector>

#include "core/rng.hpp"
#include "losses/losses.hpp"

namespace posecon::oracle {

inline double dot(const MatrixXd& a, int i, const MatrixXd& b, int j) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
  return s;
}

// Softmax over candidates j != i of anchor_i . cand_j / tau; q[i][i] = 0.
inline std::vector<std::vector<double>> q_matrix(const MatrixXd& a, const MatrixXd& b, double tau) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    double mx = -1e300;
    for (int j = 0; j < n; ++j) {
      if (j != i) mx = std::max(mx, dot(a, i, b, j) / tau);
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) denom += std::exp(dot(a, i, b, j) / tau - mx);
    }
    for (int j = 0; j < n; ++j) {
      if (j != i) q[i][j] = std::exp(dot(a, i, b, j) / tau - mx) / denom;
    }
  }
  return q;
}

// p[i][j] = 1 / (#same-label others) for j != i sharing i's label.
inline std::vector<std::vector<double>> p_matrix(const std::vector<int>& labels) {
  const int n = static_cast<int>(labels.size());
  std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    int positives = 0;
    for (int j = 0; j < n; ++j) positives += (j != i && labels[j] == labels[i]);
    for (int j = 0; j < n; ++j) {
      if (j != i && labels[j] == labels[i]) p[i][j] = 1.0 / positives;
    }
  }
  return p;
}

// Cross-entropy H(p, q) averaged over anchors, one direction. q is floored at
// 1e-12 inside the log, as in the library.
inline double mpc_directed(const MatrixXd& a, const MatrixXd& b, const std::vector<int>& labels, double tau) {
  const auto q = q_matrix(a, b, tau);
  const auto p = p_matrix(labels);
  const int n = static_cast<int>(labels.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double h = 0.0;
    for (int j = 0; j < n; ++j) {
      if (p[i][j] > 0.0) h -= p[i][j] * std::log(std::max(q[i][j], 1e-12));
    }
    total += h;
  }
  return total / n;
}

inline double mpc_symmetric(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels, double tau) {
  return 0.5 * (mpc_directed(z1, z2, labels, tau) + mpc_directed(z2, z1, labels, tau));
}

// InfoNCE with positive at the same index, all candidates in the denominator.
inline double info_nce(const MatrixXd& a, const MatrixXd& b, double tau) {
  const int n = static_cast<int>(a.rows());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double denom = 0.0;
    for (int j = 0; j < n; ++j) denom += std::exp(dot(a, i, b, j) / tau);
    total -= std::log(std::exp(dot(a, i, b, i) / tau) / denom);
  }
  return total / n;
}

inline double align_symmetric(const MatrixXd& c1, const MatrixXd& c2, double tau) {
  return 0.5 * (info_nce(c1, c2, tau) + info_nce(c2, c1, tau));
}

// Per-image mean over masked patches of the per-patch pixel MSE, then mean
// over images.
inline double reconstruction(const MatrixXd& pred, const MatrixXd& target, const std::vector<PatchMask>& masks) {
  const int patches = masks.front().size();
  double total = 0.0;
  for (std::size_t b = 0; b < masks.size(); ++b) {
    double image_sum = 0.0;
    int count = 0;
    for (int p = 0; p < patches; ++p) {
      if (!masks[b].masked(p)) continue;
      const int row = static_cast<int>(b) * patches + p;
      double se = 0.0;
      for (Eigen::Index k = 0; k < pred.cols(); ++k) se += (pred(row, k) - target(row, k)) * (pred(row, k) - target(row, k));
      image_sum += se / static_cast<double>(pred.cols());
      ++count;
    }
    total += image_sum / count;
  }
  return total / static_cast<double>(masks.size());
}

inline MatrixXd random_unit_rows(int rows, int dim, Rng& rng) {
  MatrixXd z(rows, dim);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < dim; ++k) z(i, k) = rng.normal();
    z.row(i) /= z.row(i).norm();
  }
  return z;
}

// Central finite-difference gradient of f at x (double precision).
template <typename F>
MatrixXd numeric_gradient(F&& f, const MatrixXd& x, double h = 1e-6) {
  MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    MatrixXd xp = x, xm = x;
    xp.data()[i] += h;
    xm.data()[i] -= h;
    g.data()[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const MatrixXd& analytic, const MatrixXd& numeric) {
  return (analytic - numeric).norm() / std::max({analytic.norm(), numeric.norm(), 1e-12});
}

}  // namespace posecon::oracle
