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
#include <functional>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "augment/augment.hpp"
#include "model/autograd.hpp"
#include "model/kernels.hpp"
#include "model/vit_mae.hpp"

namespace posecon {
namespace {

using MatD = kernels::Mat<double>;

MatD random_matd(int rows, int cols, Rng& rng, double scale = 1.0) {
  MatD m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

// Central-difference check of d(sum(W .* f(x)))/dx against an analytic
// gradient, in double precision.
void expect_gradient(const std::function<MatD(const MatD&)>& f, const MatD& x, const MatD& analytic,
                     const MatD& weights, double tol = 1e-6) {
  const double h = 1e-6;
  double max_err = 0.0, max_ref = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    MatD xp = x, xm = x;
    xp.data()[i] += h;
    xm.data()[i] -= h;
    const double numeric = ((f(xp).cwiseProduct(weights)).sum() - (f(xm).cwiseProduct(weights)).sum()) / (2 * h);
    max_err = std::max(max_err, std::abs(numeric - analytic.data()[i]));
    max_ref = std::max(max_ref, std::abs(numeric));
  }
  EXPECT_LT(max_err / std::max(max_ref, 1e-8), tol);
}

TEST(Kernels, LayerNormGradients) {
  Rng rng(1, "ln");
  const MatD x = random_matd(4, 6, rng), gamma = random_matd(1, 6, rng), beta = random_matd(1, 6, rng);
  const MatD w = random_matd(4, 6, rng);
  kernels::LayerNormCache<double> cache;
  kernels::layer_norm_forward<double>(x, gamma, beta, 1e-6, cache);
  MatD dg = MatD::Zero(1, 6), db = MatD::Zero(1, 6);
  const MatD dx = kernels::layer_norm_backward<double>(w, gamma, cache, dg, db);
  expect_gradient(
      [&](const MatD& v) {
        kernels::LayerNormCache<double> c;
        return kernels::layer_norm_forward<double>(v, gamma, beta, 1e-6, c);
      },
      x, dx, w);
  expect_gradient(
      [&](const MatD& g) {
        kernels::LayerNormCache<double> c;
        return kernels::layer_norm_forward<double>(x, g, beta, 1e-6, c);
      },
      gamma, dg, w);
}

TEST(Kernels, GeluMatchesErfFormAndDerivative) {
  for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
    EXPECT_NEAR(kernels::gelu(x), 0.5 * x * (1 + std::erf(x / std::sqrt(2.0))), 1e-14);
    const double h = 1e-6;
    EXPECT_NEAR(kernels::gelu_grad(x), (kernels::gelu(x + h) - kernels::gelu(x - h)) / (2 * h), 1e-8);
  }
}

TEST(Kernels, AttentionGradients) {
  Rng rng(2, "attn");
  const int batch = 2, seq = 3, heads = 2, dim = 4;
  const MatD qkv = random_matd(batch * seq, 3 * dim, rng);
  const MatD w = random_matd(batch * seq, dim, rng);
  kernels::AttentionCache<double> cache;
  kernels::attention_forward<double>(qkv, batch, seq, heads, cache);
  const MatD grad = kernels::attention_backward<double>(w, qkv, batch, seq, heads, cache);
  expect_gradient(
      [&](const MatD& v) {
        kernels::AttentionCache<double> c;
        return kernels::attention_forward<double>(v, batch, seq, heads, c);
      },
      qkv, grad, w);
}

TEST(Kernels, AttentionKeepsSamplesSeparate) {
  Rng rng(3, "attn-sep");
  const MatD qkv = random_matd(6, 12, rng);
  kernels::AttentionCache<double> c1, c2;
  const MatD both = kernels::attention_forward<double>(qkv, 2, 3, 2, c1);
  const MatD first = kernels::attention_forward<double>(MatD(qkv.topRows(3)), 1, 3, 2, c2);
  EXPECT_LT((both.topRows(3) - first).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Kernels, L2NormalizeGradients) {
  Rng rng(4, "l2");
  const MatD x = random_matd(3, 5, rng), w = random_matd(3, 5, rng);
  std::vector<double> norms;
  const MatD y = kernels::l2_normalize_rows_forward<double>(x, norms);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(y.row(i).norm(), 1.0, 1e-14);
  const MatD dx = kernels::l2_normalize_rows_backward<double>(w, y, norms);
  expect_gradient(
      [&](const MatD& v) {
        std::vector<double> n;
        return kernels::l2_normalize_rows_forward<double>(v, n);
      },
      x, dx, w);
}

TEST(Autograd, ComposedGraphMatchesFiniteDifferences) {
  // loss = sum(W .* l2norm(gelu(layer_norm(x A + b)) B)) in float; compared
  // against float finite differences with a loose tolerance.
  Rng rng(5, "graph");
  auto rnd = [&](int r, int c) {
    ag::Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(0.5 * rng.normal());
    return m;
  };
  const ag::Matrix x0 = rnd(3, 4), a0 = rnd(4, 6), b0 = rnd(1, 6), g0 = rnd(1, 6), be0 = rnd(1, 6), c0 = rnd(6, 5);
  const ag::Matrix w = rnd(3, 5);
  auto forward = [&](const ag::Var& a) {
    const ag::Var x = ag::constant(x0);
    const ag::Var h = ag::gelu(ag::layer_norm(ag::linear(x, a, ag::constant(b0)), ag::constant(g0), ag::constant(be0)));
    return ag::l2_normalize_rows(ag::matmul(h, ag::constant(c0)));
  };
  ag::Var a = ag::parameter(a0);
  ag::backward({{forward(a), w}});
  const ag::Matrix grad = a.grad();
  const float h = 1e-2f;
  for (Eigen::Index i = 0; i < a0.size(); ++i) {
    ag::Matrix ap = a0, am = a0;
    ap.data()[i] += h;
    am.data()[i] -= h;
    const double lp = forward(ag::constant(ap)).value().cwiseProduct(w).sum();
    const double lm = forward(ag::constant(am)).value().cwiseProduct(w).sum();
    EXPECT_NEAR(grad.data()[i], (lp - lm) / (2 * h), 2e-3 + 2e-2 * std::abs(grad.data()[i]));
  }
}

TEST(Autograd, ParameterGradientsAccumulateAcrossBackwardCalls) {
  ag::Var p = ag::parameter(ag::Matrix::Ones(2, 2));
  const ag::Matrix seed = ag::Matrix::Constant(2, 2, 0.5f);
  ag::backward({{ag::add(p, p), seed}});
  ag::backward({{ag::add(p, p), seed}});
  EXPECT_FLOAT_EQ(p.grad()(0, 0), 2.0f);
  p.zero_grad();
  EXPECT_FLOAT_EQ(p.grad()(1, 1), 0.0f);
}

ModelConfig tiny_config(bool pose = true) {
  ModelConfig c;
  c.embed_dim = 16;
  c.depth = 1;
  c.heads = 2;
  c.decoder_dim = 8;
  c.decoder_depth = 1;
  c.decoder_heads = 2;
  c.patch_size = 8;
  c.image_hw = {32, 24};
  c.use_pose_token = pose;
  return c;
}

Image random_image(int h, int w, std::uint64_t seed) {
  Image img(h, w);
  Rng rng(seed, "model-image");
  for (auto& v : img.data) v = static_cast<float>(rng.uniform(0, 255));
  return img;
}

PatchMask random_mask(int rows, int cols, double ratio, std::uint64_t seed) {
  Rng rng(seed, "model-mask");
  return uniform_mask(rows, cols, ratio, rng);
}

TEST(Model, TokenCounts) {
  for (bool pose : {true, false}) {
    const MaskedAutoencoder model(tiny_config(pose), 1);
    const PatchMask mask = random_mask(4, 3, 0.75, 2);
    const TokenBundle t = model.encode(random_image(32, 24, 3), mask);
    EXPECT_EQ(t.token_count(), (pose ? 2 : 1) + 3);
    EXPECT_EQ(t.pose.has_value(), pose);
    EXPECT_EQ(t.patch_indices, mask.visible_indices());
    EXPECT_EQ(t.cls.size(), 16u);
  }
}

TEST(Model, SameSeedSameWeights) {
  const MaskedAutoencoder a(tiny_config(), 7), b(tiny_config(), 7), c(tiny_config(), 8);
  ASSERT_EQ(a.parameters().size(), b.parameters().size());
  bool any_diff = false;
  for (std::size_t i = 0; i < a.parameters().size(); ++i) {
    EXPECT_EQ(a.parameters()[i].var.value(), b.parameters()[i].var.value());
    any_diff |= a.parameters()[i].var.value() != c.parameters()[i].var.value();
  }
  EXPECT_TRUE(any_diff);
}

TEST(Model, XavierVarianceAndDecayFlags) {
  ModelConfig cfg;
  const MaskedAutoencoder model(cfg, 3);
  for (const auto& p : model.parameters()) {
    const auto& v = p.var.value();
    if (p.name == "encoder.0.attn.qkv.weight") {
      const double expected = 2.0 / (v.rows() + v.cols());
      const double var = v.cast<double>().array().square().mean();
      EXPECT_NEAR(var / expected, 1.0, 0.05);
    }
    const bool is_weight = p.name.size() > 7 && p.name.compare(p.name.size() - 7, 7, ".weight") == 0 &&
                           p.name.find("norm") == std::string::npos;
    EXPECT_EQ(p.weight_decay, is_weight) << p.name;
  }
}

TEST(Model, BatchedEncodeMatchesSingleImages) {
  const MaskedAutoencoder model(tiny_config(), 4);
  std::vector<Image> images = {random_image(32, 24, 10), random_image(32, 24, 11)};
  std::vector<PatchMask> masks = {random_mask(4, 3, 0.5, 12), random_mask(4, 3, 0.5, 13)};
  const EncodedBatch enc = model.encode(patchify(images, 8), masks);
  const ag::Var pred = model.decode(enc);
  EXPECT_EQ(pred.rows(), 2 * 12);
  EXPECT_EQ(pred.cols(), 8 * 8 * 3);
  for (int b = 0; b < 2; ++b) {
    const TokenBundle t = model.encode(images[b], masks[b]);
    for (int j = 0; j < 16; ++j) EXPECT_NEAR(t.cls[j], enc.tokens.value()(b * enc.seq, j), 1e-5);
    const ag::Matrix single = model.decode(t, masks[b]);
    EXPECT_LT((single - pred.value().middleRows(b * 12, 12)).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(Model, MaskedPatchContentDoesNotReachTheEncoder) {
  const MaskedAutoencoder model(tiny_config(), 5);
  const PatchMask mask = random_mask(4, 3, 0.5, 14);
  Image a = random_image(32, 24, 15), b = a;
  const int masked = mask.masked_indices().front();
  const int pr = masked / 3, pc = masked % 3;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) b.at(pr * 8 + y, pc * 8 + x, 1) = 0.0f;
  }
  EXPECT_EQ(model.encode(a, mask).cls, model.encode(b, mask).cls);
}

TEST(Model, EveryParameterReceivesGradient) {
  MaskedAutoencoder model(tiny_config(), 6);
  std::vector<Image> images = {random_image(32, 24, 16), random_image(32, 24, 17)};
  std::vector<PatchMask> masks = {random_mask(4, 3, 0.5, 18), random_mask(4, 3, 0.5, 19)};
  const EncodedBatch enc = model.encode(patchify(images, 8), masks);
  const ag::Var pred = model.decode(enc);
  const ag::Var pose = enc.special_rows(1);
  ag::backward({{pred, ag::Matrix::Ones(pred.rows(), pred.cols())}, {pose, ag::Matrix::Ones(2, 16)}});
  for (const auto& p : model.parameters()) {
    ASSERT_TRUE(p.var.has_grad()) << p.name;
    EXPECT_GT(p.var.grad().cwiseAbs().maxCoeff(), 0.0f) << p.name;
  }
}

TEST(Model, PatchifyLayoutAndNormalization) {
  Image img(8, 16, 0.0f);
  img.at(2, 9, 1) = 255.0f;  // second patch, row 2, col 1, green
  const ag::Matrix p = patchify({img}, 8);
  ASSERT_EQ(p.rows(), 2);
  ASSERT_EQ(p.cols(), 192);
  const float zero_g = (0.0f - kPixelMean[1]) / kPixelStd[1];
  EXPECT_FLOAT_EQ(p(1, (2 * 8 + 1) * 3 + 1), (255.0f - kPixelMean[1]) / kPixelStd[1]);
  EXPECT_FLOAT_EQ(p(0, (2 * 8 + 1) * 3 + 1), zero_g);
  const ag::Matrix n = normalize_patches(p);
  EXPECT_NEAR(n.row(1).mean(), 0.0f, 1e-5);
}

TEST(Model, PositionTableIsFixedSinCos) {
  const ag::Matrix t = sincos_position_table(16, 4, 3);
  ASSERT_EQ(t.rows(), 12);
  ASSERT_EQ(t.cols(), 16);
  for (Eigen::Index i = 0; i < t.size(); ++i) ASSERT_LE(std::abs(t.data()[i]), 1.0f + 1e-6f);
  for (int i = 0; i < 12; ++i) {
    for (int j = i + 1; j < 12; ++j) EXPECT_GT((t.row(i) - t.row(j)).norm(), 1e-3f);
  }
}

TEST(Model, RejectsBadInputs) {
  const MaskedAutoencoder model(tiny_config(false), 1);
  EXPECT_THROW(model.embed({random_image(32, 24, 1)}, true), Error);
  EXPECT_THROW(model.encode(random_image(32, 24, 1), random_mask(8, 6, 0.5, 1)), Error);
  EXPECT_THROW(normalize_token({0.0, 0.0}), Error);
  const auto n = normalize_token({3.0, 4.0});
  EXPECT_DOUBLE_EQ(n[0], 0.6);
}

TEST(Model, EmbedUsesAllPatches) {
  const MaskedAutoencoder model(tiny_config(), 9);
  const Image img = random_image(32, 24, 20);
  const ag::Matrix e = model.embed({img, img}, true, 1);
  const TokenBundle t = model.encode(img, PatchMask::all_visible(4, 3));
  for (int j = 0; j < 16; ++j) EXPECT_NEAR(e(1, j), (*t.pose)[j], 1e-5);
}

}  // namespace
}  // namespace posecon
