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

// Minimal reverse-mode tape over float matrices. Each op records a closure
// that pushes its output gradient into its parents; parameters are leaf
// nodes whose gradients persist (and accumulate) across backward calls until
// zeroed by the optimizer.

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "model/kernels.hpp"

namespace posecon::ag {

using Matrix = kernels::Mat<float>;

struct Node {
  Matrix value;
  Matrix grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  void accumulate(const Matrix& g);
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  const Matrix& grad() const { return node_->grad; }
  bool has_grad() const { return node_->grad.size() > 0; }
  void zero_grad() { node_->grad.setZero(node_->value.rows(), node_->value.cols()); }
  bool requires_grad() const { return node_->requires_grad; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<Node> node_;
};

Var constant(Matrix value);
Var parameter(Matrix value);

Var matmul(const Var& a, const Var& b);
// x * w + b, with b a 1 x out row broadcast over rows.
Var linear(const Var& x, const Var& w, const Var& b);
Var add(const Var& a, const Var& b);
Var layer_norm(const Var& x, const Var& gamma, const Var& beta, float eps = 1e-6f);
Var gelu(const Var& x);
Var attention(const Var& qkv, int batch, int seq, int heads);
Var l2_normalize_rows(const Var& x);
Var gather_rows(const Var& x, const std::vector<int>& rows);

// Per sample b: [specials..., patches rows b*V .. b*V+V-1]. Specials are
// 1 x D vars shared by every sample.
Var assemble_sequence(const std::vector<Var>& specials, const Var& patches, int batch, int visible);

// Builds the full-grid decoder input. For sample b the output holds the
// `specials` leading rows of that sample in `tokens`, then one row per patch:
// the matching visible token, or `mask_token` where the patch was dropped.
// visible[b] lists sample b's kept patch indices in ascending order.
Var scatter_with_mask_token(const Var& tokens, const Var& mask_token, const std::vector<std::vector<int>>& visible,
                            int specials, int num_patches);

// Runs the tape backward from several outputs at once.
void backward(const std::vector<std::pair<Var, Matrix>>& seeds);

}  // namespace posecon::ag
