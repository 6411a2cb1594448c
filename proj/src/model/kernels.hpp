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

// Forward/backward kernels for the transformer layers. Templated on the
// scalar type so the training path runs in float while tests check the
// backward passes against finite differences in double.

#include <cmath>
#include <vector>

#include <Eigen/Core>

namespace posecon::kernels {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

template <typename S>
struct LayerNormCache {
  Mat<S> xhat;
  std::vector<S> rstd;
};

template <typename S>
Mat<S> layer_norm_forward(const Mat<S>& x, const Mat<S>& gamma, const Mat<S>& beta, S eps,
                          LayerNormCache<S>& cache) {
  const auto n = x.rows();
  const auto d = x.cols();
  cache.xhat.resize(n, d);
  cache.rstd.resize(n);
  Mat<S> y(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const S mean = x.row(i).mean();
    const S var = (x.row(i).array() - mean).square().mean();
    const S rstd = S(1) / std::sqrt(var + eps);
    cache.rstd[i] = rstd;
    cache.xhat.row(i) = (x.row(i).array() - mean) * rstd;
    y.row(i) = cache.xhat.row(i).array() * gamma.row(0).array() + beta.row(0).array();
  }
  return y;
}

// Accumulates into dgamma/dbeta; returns dx.
template <typename S>
Mat<S> layer_norm_backward(const Mat<S>& dy, const Mat<S>& gamma, const LayerNormCache<S>& cache,
                           Mat<S>& dgamma, Mat<S>& dbeta) {
  const auto n = dy.rows();
  const auto d = dy.cols();
  dgamma.row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  dbeta.row(0) += dy.colwise().sum();
  Mat<S> dx(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const RowVec<S> dxhat = (dy.row(i).array() * gamma.row(0).array()).matrix();
    const S sum_dxhat = dxhat.sum();
    const S sum_dxhat_xhat = (dxhat.array() * cache.xhat.row(i).array()).sum();
    dx.row(i) = (cache.rstd[i] / S(d)) *
                (S(d) * dxhat.array() - sum_dxhat - cache.xhat.row(i).array() * sum_dxhat_xhat).matrix();
  }
  return dx;
}

template <typename S>
S gelu(S x) {
  return S(0.5) * x * (S(1) + std::erf(x * S(0.70710678118654752440)));
}

template <typename S>
S gelu_grad(S x) {
  const S cdf = S(0.5) * (S(1) + std::erf(x * S(0.70710678118654752440)));
  const S pdf = std::exp(S(-0.5) * x * x) * S(0.39894228040143267794);
  return cdf + x * pdf;
}

// Multi-head self-attention over `batch` independent sequences of length
// `seq`. qkv rows are [q | k | v], each `dim` wide; head h uses columns
// [h*dh, (h+1)*dh) of each part.
template <typename S>
struct AttentionCache {
  std::vector<Mat<S>> probs;  // batch*heads matrices of seq x seq
};

template <typename S>
Mat<S> attention_forward(const Mat<S>& qkv, int batch, int seq, int heads, AttentionCache<S>& cache) {
  const int dim = static_cast<int>(qkv.cols() / 3);
  const int dh = dim / heads;
  const S scale = S(1) / std::sqrt(S(dh));
  Mat<S> out(static_cast<Eigen::Index>(batch) * seq, dim);
  cache.probs.assign(static_cast<std::size_t>(batch) * heads, Mat<S>());
  for (int b = 0; b < batch; ++b) {
    const auto r0 = static_cast<Eigen::Index>(b) * seq;
    for (int h = 0; h < heads; ++h) {
      const auto q = qkv.block(r0, h * dh, seq, dh);
      const auto k = qkv.block(r0, dim + h * dh, seq, dh);
      const auto v = qkv.block(r0, 2 * dim + h * dh, seq, dh);
      Mat<S> logits = (q * k.transpose()) * scale;
      for (Eigen::Index i = 0; i < seq; ++i) {
        const S mx = logits.row(i).maxCoeff();
        logits.row(i) = (logits.row(i).array() - mx).exp();
        logits.row(i) /= logits.row(i).sum();
      }
      out.block(r0, h * dh, seq, dh).noalias() = logits * v;
      cache.probs[static_cast<std::size_t>(b) * heads + h] = std::move(logits);
    }
  }
  return out;
}

template <typename S>
Mat<S> attention_backward(const Mat<S>& dout, const Mat<S>& qkv, int batch, int seq, int heads,
                          const AttentionCache<S>& cache) {
  const int dim = static_cast<int>(qkv.cols() / 3);
  const int dh = dim / heads;
  const S scale = S(1) / std::sqrt(S(dh));
  Mat<S> dqkv = Mat<S>::Zero(qkv.rows(), qkv.cols());
  for (int b = 0; b < batch; ++b) {
    const auto r0 = static_cast<Eigen::Index>(b) * seq;
    for (int h = 0; h < heads; ++h) {
      const Mat<S>& p = cache.probs[static_cast<std::size_t>(b) * heads + h];
      const auto q = qkv.block(r0, h * dh, seq, dh);
      const auto k = qkv.block(r0, dim + h * dh, seq, dh);
      const auto v = qkv.block(r0, 2 * dim + h * dh, seq, dh);
      const auto dO = dout.block(r0, h * dh, seq, dh);
      dqkv.block(r0, 2 * dim + h * dh, seq, dh).noalias() = p.transpose() * dO;
      Mat<S> dp = dO * v.transpose();
      // softmax backward: ds = p * (dp - rowsum(dp * p))
      for (Eigen::Index i = 0; i < seq; ++i) {
        const S dot = (dp.row(i).array() * p.row(i).array()).sum();
        dp.row(i) = (p.row(i).array() * (dp.row(i).array() - dot)).matrix();
      }
      dp *= scale;
      dqkv.block(r0, h * dh, seq, dh).noalias() = dp * k;
      dqkv.block(r0, dim + h * dh, seq, dh).noalias() = dp.transpose() * q;
    }
  }
  return dqkv;
}

template <typename S>
Mat<S> l2_normalize_rows_forward(const Mat<S>& x, std::vector<S>& norms) {
  Mat<S> y(x.rows(), x.cols());
  norms.resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    norms[i] = x.row(i).norm();
    y.row(i) = x.row(i) / norms[i];
  }
  return y;
}

template <typename S>
Mat<S> l2_normalize_rows_backward(const Mat<S>& dy, const Mat<S>& y, const std::vector<S>& norms) {
  Mat<S> dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const S dot = dy.row(i).dot(y.row(i));
    dx.row(i) = (dy.row(i) - dot * y.row(i)) / norms[i];
  }
  return dx;
}

}  // namespace posecon::kernels
