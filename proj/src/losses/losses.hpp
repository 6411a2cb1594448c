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

#include <vector>

#include <Eigen/Core>

#include "core/config.hpp"
#include "masking/masking.hpp"

namespace posecon {

using MatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Logit written onto the diagonal before the softmax to exclude
// self-matches.
inline constexpr double kSelfMaskLogit = -1e9;
// Floor applied to q before the log where p > 0.
inline constexpr double kProbabilityFloor = 1e-12;

// n pose ids each repeated m times: label[i] = i / m.
std::vector<int> repeated_labels(int n, int m);

// Softmax over candidates of anchor . candidate / tau, diagonal logit
// replaced by kSelfMaskLogit. Rows must be unit norm within 1e-3.
MatrixXd contrastive_distribution(const MatrixXd& anchors, const MatrixXd& candidates, double tau);

// p[i][j] = 1 / (count(label[i]) - 1) for j != i with equal labels. Every
// label must occur at least twice.
MatrixXd ground_truth_distribution(const std::vector<int>& labels);

struct LossWithGrad {
  double value = 0.0;
  MatrixXd grad_a;  // d value / d first argument
  MatrixXd grad_b;  // d value / d second argument
};

// H(p, q) averaged over anchors, one direction (anchors from z1).
double mpc_loss_directed(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels, double tau);
LossWithGrad mpc_loss_directed_with_grad(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels,
                                         double tau);
// 0.5 * (L(z1, z2) + L(z2, z1)).
LossWithGrad mpc_loss(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels, double tau);
// Per-anchor cross entropies of the directed loss.
std::vector<double> mpc_loss_per_anchor(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels,
                                        double tau);

// InfoNCE with the positive of anchor i at candidate i; no self masking.
LossWithGrad info_nce_with_grad(const MatrixXd& a, const MatrixXd& b, double tau);
// 0.5 * (InfoNCE(c1, c2) + InfoNCE(c2, c1)).
LossWithGrad align_loss(const MatrixXd& cls1, const MatrixXd& cls2, double tau);

// Mean over masked patches (per image), then over images, of the per-patch
// mean squared error. pred and target are (batch * P) x patch_dim.
struct ReconstructionResult {
  double value = 0.0;
  MatrixXd grad;  // d value / d pred
};
ReconstructionResult reconstruction_loss(const MatrixXd& pred, const MatrixXd& target,
                                         const std::vector<PatchMask>& masks);
double reconstruction_loss(const MatrixXd& pred, const MatrixXd& target, const PatchMask& mask);

struct LossTerms {
  double rec = 0.0;
  double align = 0.0;
  double mp = 0.0;
};

// rec + gamma1 * align + gamma2 * mp; the mp term is dropped when the MPC
// loss is switched off. Any non-finite term raises an error naming it.
double total_loss(const LossTerms& terms, const TrainConfig& config);

}  // namespace posecon
