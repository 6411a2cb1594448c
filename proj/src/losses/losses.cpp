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

#include "losses/losses.hpp"

#include <cmath>
#include <map>

#include "core/error.hpp"

namespace posecon {
namespace {

void check_unit_rows(const MatrixXd& z, const char* what) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double norm = z.row(i).norm();
    require(std::abs(norm - 1.0) <= 1e-3, ErrorKind::kNumeric,
            std::string(what) + ": row " + std::to_string(i) + " is not l2-normalized (norm " +
                std::to_string(norm) + ")");
  }
}

void check_pair(const MatrixXd& a, const MatrixXd& b, const char* what) {
  require(a.rows() == b.rows() && a.cols() == b.cols() && a.rows() > 0, ErrorKind::kShape,
          std::string(what) + ": embedding matrices must have equal, non-empty shapes");
}

// Row-wise softmax of logits with the diagonal suppressed.
MatrixXd masked_softmax(const MatrixXd& logits_in) {
  MatrixXd q = logits_in;
  for (Eigen::Index i = 0; i < q.rows() && i < q.cols(); ++i) q(i, i) = kSelfMaskLogit;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const double mx = q.row(i).maxCoeff();
    q.row(i) = (q.row(i).array() - mx).exp();
    q.row(i) /= q.row(i).sum();
  }
  return q;
}

MatrixXd row_softmax(const MatrixXd& logits) {
  MatrixXd q = logits;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const double mx = q.row(i).maxCoeff();
    q.row(i) = (q.row(i).array() - mx).exp();
    q.row(i) /= q.row(i).sum();
  }
  return q;
}

}  // namespace

std::vector<int> repeated_labels(int n, int m) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) labels.push_back(i);
  }
  return labels;
}

MatrixXd contrastive_distribution(const MatrixXd& anchors, const MatrixXd& candidates, double tau) {
  check_pair(anchors, candidates, "contrastive_distribution");
  require(tau > 0.0, ErrorKind::kInvalidArgument, "contrastive_distribution: tau must be > 0");
  check_unit_rows(anchors, "contrastive_distribution anchors");
  check_unit_rows(candidates, "contrastive_distribution candidates");
  return masked_softmax(anchors * candidates.transpose() / tau);
}

MatrixXd ground_truth_distribution(const std::vector<int>& labels) {
  std::map<int, int> counts;
  for (int l : labels) ++counts[l];
  for (const auto& [label, count] : counts) {
    require(count >= 2, ErrorKind::kInvalidArgument,
            "ground_truth_distribution: label " + std::to_string(label) + " has no positive");
  }
  const auto k = static_cast<Eigen::Index>(labels.size());
  MatrixXd p = MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double w = 1.0 / (counts[labels[i]] - 1);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i != j && labels[i] == labels[j]) p(i, j) = w;
    }
  }
  return p;
}

std::vector<double> mpc_loss_per_anchor(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels,
                                        double tau) {
  require(static_cast<Eigen::Index>(labels.size()) == z1.rows(), ErrorKind::kShape,
          "mpc_loss: label count does not match batch");
  const MatrixXd p = ground_truth_distribution(labels);
  const MatrixXd q = contrastive_distribution(z1, z2, tau);
  std::vector<double> out(labels.size(), 0.0);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double h = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (p(i, j) > 0.0) h -= p(i, j) * std::log(std::max(q(i, j), kProbabilityFloor));
    }
    out[i] = h;
  }
  return out;
}

double mpc_loss_directed(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels, double tau) {
  const auto per_anchor = mpc_loss_per_anchor(z1, z2, labels, tau);
  double sum = 0.0;
  for (double v : per_anchor) sum += v;
  return sum / static_cast<double>(per_anchor.size());
}

LossWithGrad mpc_loss_directed_with_grad(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels,
                                         double tau) {
  require(static_cast<Eigen::Index>(labels.size()) == z1.rows(), ErrorKind::kShape,
          "mpc_loss: label count does not match batch");
  const MatrixXd p = ground_truth_distribution(labels);
  const MatrixXd q = contrastive_distribution(z1, z2, tau);
  const auto k = static_cast<double>(labels.size());
  LossWithGrad out;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (p(i, j) > 0.0) out.value -= p(i, j) * std::log(std::max(q(i, j), kProbabilityFloor));
    }
  }
  out.value /= k;
  // dH/dlogits = (q - p) / K per row (rows of p sum to one); the diagonal
  // logit is a constant and carries no gradient.
  MatrixXd dlogits = (q - p) / k;
  dlogits.diagonal().setZero();
  out.grad_a = dlogits * z2 / tau;
  out.grad_b = dlogits.transpose() * z1 / tau;
  return out;
}

LossWithGrad mpc_loss(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels, double tau) {
  check_pair(z1, z2, "mpc_loss");
  const LossWithGrad forward = mpc_loss_directed_with_grad(z1, z2, labels, tau);
  const LossWithGrad reverse = mpc_loss_directed_with_grad(z2, z1, labels, tau);
  LossWithGrad out;
  out.value = 0.5 * (forward.value + reverse.value);
  out.grad_a = 0.5 * (forward.grad_a + reverse.grad_b);
  out.grad_b = 0.5 * (forward.grad_b + reverse.grad_a);
  return out;
}

LossWithGrad info_nce_with_grad(const MatrixXd& a, const MatrixXd& b, double tau) {
  check_pair(a, b, "info_nce");
  require(a.rows() >= 2, ErrorKind::kInvalidArgument, "align_loss: batch size must be >= 2");
  require(tau > 0.0, ErrorKind::kInvalidArgument, "align_loss: tau must be > 0");
  check_unit_rows(a, "align_loss anchors");
  check_unit_rows(b, "align_loss candidates");
  const auto k = static_cast<double>(a.rows());
  const MatrixXd q = row_softmax(a * b.transpose() / tau);
  LossWithGrad out;
  for (Eigen::Index i = 0; i < q.rows(); ++i) out.value -= std::log(std::max(q(i, i), kProbabilityFloor));
  out.value /= k;
  MatrixXd dlogits = q;
  dlogits.diagonal().array() -= 1.0;
  dlogits /= k;
  out.grad_a = dlogits * b / tau;
  out.grad_b = dlogits.transpose() * a / tau;
  return out;
}

LossWithGrad align_loss(const MatrixXd& cls1, const MatrixXd& cls2, double tau) {
  const LossWithGrad forward = info_nce_with_grad(cls1, cls2, tau);
  const LossWithGrad reverse = info_nce_with_grad(cls2, cls1, tau);
  LossWithGrad out;
  out.value = 0.5 * (forward.value + reverse.value);
  out.grad_a = 0.5 * (forward.grad_a + reverse.grad_b);
  out.grad_b = 0.5 * (forward.grad_b + reverse.grad_a);
  return out;
}

ReconstructionResult reconstruction_loss(const MatrixXd& pred, const MatrixXd& target,
                                         const std::vector<PatchMask>& masks) {
  require(!masks.empty(), ErrorKind::kInvalidArgument, "reconstruction_loss: no masks");
  const int P = masks.front().size();
  const auto batch = static_cast<Eigen::Index>(masks.size());
  require(pred.rows() == batch * P && target.rows() == pred.rows() && target.cols() == pred.cols(),
          ErrorKind::kShape, "reconstruction_loss: prediction must cover every patch of every image");
  ReconstructionResult out;
  out.grad = MatrixXd::Zero(pred.rows(), pred.cols());
  const double dim = static_cast<double>(pred.cols());
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& mask = masks[b];
    require(mask.size() == P, ErrorKind::kShape, "reconstruction_loss: masks differ in size");
    const int masked = mask.masked_count();
    require(masked > 0, ErrorKind::kInvalidArgument, "reconstruction_loss: mask has no masked patch");
    const double weight = 1.0 / (dim * masked * static_cast<double>(batch));
    for (int p = 0; p < P; ++p) {
      if (!mask.masked(p)) continue;
      const auto row = b * P + p;
      const auto diff = (pred.row(row) - target.row(row)).eval();
      out.value += diff.squaredNorm() * weight;
      out.grad.row(row) = 2.0 * weight * diff;
    }
  }
  return out;
}

double reconstruction_loss(const MatrixXd& pred, const MatrixXd& target, const PatchMask& mask) {
  return reconstruction_loss(pred, target, std::vector<PatchMask>{mask}).value;
}

double total_loss(const LossTerms& terms, const TrainConfig& config) {
  // Only terms that enter the sum are checked, so a disabled term cannot
  // abort a run.
  require(std::isfinite(terms.rec), ErrorKind::kNumeric, "total_loss: non-finite reconstruction loss (rec)");
  double total = terms.rec;
  if (config.gamma1 != 0.0) {
    require(std::isfinite(terms.align), ErrorKind::kNumeric, "total_loss: non-finite alignment loss (align)");
    total += config.gamma1 * terms.align;
  }
  if (config.use_mpc_loss && config.gamma2 != 0.0) {
    require(std::isfinite(terms.mp), ErrorKind::kNumeric, "total_loss: non-finite multi-positive loss (mp)");
    total += config.gamma2 * terms.mp;
  }
  return total;
}

}  // namespace posecon
