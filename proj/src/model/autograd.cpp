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

#include "model/autograd.hpp"

#include <unordered_set>

#include "core/error.hpp"

namespace posecon::ag {
namespace {

Var make(Matrix value, std::vector<std::shared_ptr<Node>> parents, std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  for (const auto& p : parents) node->requires_grad = node->requires_grad || p->requires_grad;
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward = std::move(backward);
  }
  return Var(std::move(node));
}

void check_shape(bool ok, const char* op) {
  require(ok, ErrorKind::kShape, std::string("autograd shape mismatch in ") + op);
}

}  // namespace

void Node::accumulate(const Matrix& g) {
  if (!requires_grad) return;
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

Var constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var parameter(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

Var matmul(const Var& a, const Var& b) {
  check_shape(a.cols() == b.rows(), "matmul");
  Node* pa = a.node();
  Node* pb = b.node();
  return make(a.value() * b.value(), {a.shared(), b.shared()}, [pa, pb](Node& self) {
    if (pa->requires_grad) pa->accumulate(self.grad * pb->value.transpose());
    if (pb->requires_grad) pb->accumulate(pa->value.transpose() * self.grad);
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  check_shape(x.cols() == w.rows() && b.rows() == 1 && b.cols() == w.cols(), "linear");
  Matrix y = x.value() * w.value();
  y.rowwise() += b.value().row(0);
  Node* px = x.node();
  Node* pw = w.node();
  Node* pb = b.node();
  return make(std::move(y), {x.shared(), w.shared(), b.shared()}, [px, pw, pb](Node& self) {
    if (px->requires_grad) px->accumulate(self.grad * pw->value.transpose());
    if (pw->requires_grad) pw->accumulate(px->value.transpose() * self.grad);
    if (pb->requires_grad) pb->accumulate(self.grad.colwise().sum());
  });
}

Var add(const Var& a, const Var& b) {
  check_shape(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  Node* pa = a.node();
  Node* pb = b.node();
  return make(a.value() + b.value(), {a.shared(), b.shared()}, [pa, pb](Node& self) {
    pa->accumulate(self.grad);
    pb->accumulate(self.grad);
  });
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, float eps) {
  check_shape(gamma.cols() == x.cols() && beta.cols() == x.cols(), "layer_norm");
  auto cache = std::make_shared<kernels::LayerNormCache<float>>();
  Matrix y = kernels::layer_norm_forward<float>(x.value(), gamma.value(), beta.value(), eps, *cache);
  Node* px = x.node();
  Node* pg = gamma.node();
  Node* pbeta = beta.node();
  return make(std::move(y), {x.shared(), gamma.shared(), beta.shared()}, [px, pg, pbeta, cache](Node& self) {
    Matrix dgamma = Matrix::Zero(1, pg->value.cols());
    Matrix dbeta = Matrix::Zero(1, pbeta->value.cols());
    Matrix dx = kernels::layer_norm_backward<float>(self.grad, pg->value, *cache, dgamma, dbeta);
    px->accumulate(dx);
    pg->accumulate(dgamma);
    pbeta->accumulate(dbeta);
  });
}

Var gelu(const Var& x) {
  Matrix y = x.value().unaryExpr([](float v) { return kernels::gelu(v); });
  Node* px = x.node();
  return make(std::move(y), {x.shared()}, [px](Node& self) {
    px->accumulate(
        (self.grad.array() * px->value.unaryExpr([](float v) { return kernels::gelu_grad(v); }).array()).matrix());
  });
}

Var attention(const Var& qkv, int batch, int seq, int heads) {
  check_shape(qkv.rows() == static_cast<Eigen::Index>(batch) * seq && qkv.cols() % 3 == 0 &&
                  (qkv.cols() / 3) % heads == 0,
              "attention");
  auto cache = std::make_shared<kernels::AttentionCache<float>>();
  Matrix y = kernels::attention_forward<float>(qkv.value(), batch, seq, heads, *cache);
  Node* p = qkv.node();
  return make(std::move(y), {qkv.shared()}, [p, batch, seq, heads, cache](Node& self) {
    p->accumulate(kernels::attention_backward<float>(self.grad, p->value, batch, seq, heads, *cache));
  });
}

Var l2_normalize_rows(const Var& x) {
  auto norms = std::make_shared<std::vector<float>>();
  Matrix y = kernels::l2_normalize_rows_forward<float>(x.value(), *norms);
  Node* px = x.node();
  return make(std::move(y), {x.shared()}, [px, norms](Node& self) {
    px->accumulate(kernels::l2_normalize_rows_backward<float>(self.grad, self.value, *norms));
  });
}

Var gather_rows(const Var& x, const std::vector<int>& rows) {
  Matrix y(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check_shape(rows[i] >= 0 && rows[i] < x.rows(), "gather_rows");
    y.row(static_cast<Eigen::Index>(i)) = x.value().row(rows[i]);
  }
  Node* px = x.node();
  return make(std::move(y), {x.shared()}, [px, rows](Node& self) {
    Matrix g = Matrix::Zero(px->value.rows(), px->value.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) g.row(rows[i]) += self.grad.row(static_cast<Eigen::Index>(i));
    px->accumulate(g);
  });
}

Var assemble_sequence(const std::vector<Var>& specials, const Var& patches, int batch, int visible) {
  const auto dim = patches.cols();
  const int s = static_cast<int>(specials.size());
  const int seq = s + visible;
  check_shape(patches.rows() == static_cast<Eigen::Index>(batch) * visible, "assemble_sequence");
  Matrix y(static_cast<Eigen::Index>(batch) * seq, dim);
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < s; ++t) {
      check_shape(specials[t].rows() == 1 && specials[t].cols() == dim, "assemble_sequence");
      y.row(static_cast<Eigen::Index>(b) * seq + t) = specials[t].value().row(0);
    }
    y.block(static_cast<Eigen::Index>(b) * seq + s, 0, visible, dim) =
        patches.value().block(static_cast<Eigen::Index>(b) * visible, 0, visible, dim);
  }
  std::vector<std::shared_ptr<Node>> parents;
  std::vector<Node*> special_nodes;
  for (const auto& v : specials) {
    parents.push_back(v.shared());
    special_nodes.push_back(v.node());
  }
  parents.push_back(patches.shared());
  Node* pp = patches.node();
  return make(std::move(y), std::move(parents), [special_nodes, pp, batch, visible, seq, s](Node& self) {
    const auto dim = self.grad.cols();
    for (int t = 0; t < s; ++t) {
      if (!special_nodes[t]->requires_grad) continue;
      Matrix g = Matrix::Zero(1, dim);
      for (int b = 0; b < batch; ++b) g.row(0) += self.grad.row(static_cast<Eigen::Index>(b) * seq + t);
      special_nodes[t]->accumulate(g);
    }
    if (pp->requires_grad) {
      Matrix g(static_cast<Eigen::Index>(batch) * visible, dim);
      for (int b = 0; b < batch; ++b) {
        g.block(static_cast<Eigen::Index>(b) * visible, 0, visible, dim) =
            self.grad.block(static_cast<Eigen::Index>(b) * seq + s, 0, visible, dim);
      }
      pp->accumulate(g);
    }
  });
}

Var scatter_with_mask_token(const Var& tokens, const Var& mask_token, const std::vector<std::vector<int>>& visible,
                            int specials, int num_patches) {
  const int batch = static_cast<int>(visible.size());
  check_shape(batch > 0, "scatter_with_mask_token");
  const int nvis = static_cast<int>(visible[0].size());
  const int in_seq = specials + nvis;
  const int out_seq = specials + num_patches;
  const auto dim = tokens.cols();
  check_shape(tokens.rows() == static_cast<Eigen::Index>(batch) * in_seq && mask_token.rows() == 1 &&
                  mask_token.cols() == dim,
              "scatter_with_mask_token");

  // source[r] = input row for output row r, or -1 for the mask token.
  std::vector<int> source(static_cast<std::size_t>(batch) * out_seq, -1);
  for (int b = 0; b < batch; ++b) {
    check_shape(static_cast<int>(visible[b].size()) == nvis, "scatter_with_mask_token");
    for (int t = 0; t < specials; ++t) source[static_cast<std::size_t>(b) * out_seq + t] = b * in_seq + t;
    for (int i = 0; i < nvis; ++i) {
      source[static_cast<std::size_t>(b) * out_seq + specials + visible[b][i]] = b * in_seq + specials + i;
    }
  }
  Matrix y(static_cast<Eigen::Index>(batch) * out_seq, dim);
  for (std::size_t r = 0; r < source.size(); ++r) {
    y.row(static_cast<Eigen::Index>(r)) =
        source[r] >= 0 ? tokens.value().row(source[r]) : mask_token.value().row(0);
  }
  Node* pt = tokens.node();
  Node* pm = mask_token.node();
  return make(std::move(y), {tokens.shared(), mask_token.shared()}, [pt, pm, source](Node& self) {
    const auto dim = self.grad.cols();
    Matrix gt = Matrix::Zero(pt->value.rows(), dim);
    Matrix gm = Matrix::Zero(1, dim);
    for (std::size_t r = 0; r < source.size(); ++r) {
      if (source[r] >= 0) {
        gt.row(source[r]) += self.grad.row(static_cast<Eigen::Index>(r));
      } else {
        gm.row(0) += self.grad.row(static_cast<Eigen::Index>(r));
      }
    }
    pt->accumulate(gt);
    pm->accumulate(gm);
  });
}

void backward(const std::vector<std::pair<Var, Matrix>>& seeds) {
  // Iterative post-order DFS gives a topological order of the graph.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  for (const auto& [var, grad] : seeds) {
    Node* root = var.node();
    if (!root->requires_grad || seen.count(root)) continue;
    seen.insert(root);
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < node->parents.size()) {
        Node* parent = node->parents[next++].get();
        if (parent->requires_grad && !seen.count(parent)) {
          seen.insert(parent);
          stack.emplace_back(parent, 0);
        }
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
  }
  for (const auto& [var, grad] : seeds) {
    check_shape(grad.rows() == var.rows() && grad.cols() == var.cols(), "backward seed");
    var.node()->accumulate(grad);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && node->grad.size() > 0) {
      node->backward(*node);
      // Interior gradients are not needed once propagated.
      node->grad = Matrix();
    }
  }
}

}  // namespace posecon::ag
