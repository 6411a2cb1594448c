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

#include "model/vit_mae.hpp"

#include <cmath>

#include "augment/augment.hpp"
#include "core/error.hpp"

namespace posecon {
namespace {

ag::Matrix xavier_uniform(int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  ag::Matrix w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<float>(rng.uniform(-bound, bound));
  return w;
}

ag::Matrix normal_init(int rows, int cols, double std, Rng& rng) {
  ag::Matrix w(rows, cols);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<float>(std * rng.normal());
  return w;
}

ag::Matrix zeros(int rows, int cols) { return ag::Matrix::Zero(rows, cols); }
ag::Matrix ones(int rows, int cols) { return ag::Matrix::Ones(rows, cols); }

}  // namespace

ag::Var EncodedBatch::special_rows(int index) const {
  require(index >= 0 && index < specials, ErrorKind::kInvalidArgument, "special token index out of range");
  std::vector<int> rows(batch);
  for (int b = 0; b < batch; ++b) rows[b] = b * seq + index;
  return ag::gather_rows(tokens, rows);
}

ag::Matrix patchify(const std::vector<Image>& images, int patch_size) {
  require(!images.empty(), ErrorKind::kInvalidArgument, "patchify: no images");
  const int h = images[0].height, w = images[0].width;
  require(h % patch_size == 0 && w % patch_size == 0, ErrorKind::kShape, "patchify: patch size must divide image");
  const int gr = h / patch_size, gc = w / patch_size;
  const int per_image = gr * gc;
  const int dim = patch_size * patch_size * 3;
  ag::Matrix out(static_cast<Eigen::Index>(images.size()) * per_image, dim);
  for (std::size_t n = 0; n < images.size(); ++n) {
    const Image& img = images[n];
    require(img.height == h && img.width == w, ErrorKind::kShape, "patchify: images differ in size");
    for (int pr = 0; pr < gr; ++pr) {
      for (int pc = 0; pc < gc; ++pc) {
        const auto row = static_cast<Eigen::Index>(n) * per_image + pr * gc + pc;
        int col = 0;
        for (int y = 0; y < patch_size; ++y) {
          for (int x = 0; x < patch_size; ++x) {
            for (int c = 0; c < 3; ++c) {
              out(row, col++) = (img.at(pr * patch_size + y, pc * patch_size + x, c) - kPixelMean[c]) / kPixelStd[c];
            }
          }
        }
      }
    }
  }
  return out;
}

ag::Matrix normalize_patches(const ag::Matrix& patches) {
  ag::Matrix out(patches.rows(), patches.cols());
  for (Eigen::Index i = 0; i < patches.rows(); ++i) {
    const float mean = patches.row(i).mean();
    const float var = (patches.row(i).array() - mean).square().sum() / std::max<Eigen::Index>(1, patches.cols() - 1);
    out.row(i) = (patches.row(i).array() - mean) / std::sqrt(var + 1e-6f);
  }
  return out;
}

ag::Matrix sincos_position_table(int dim, int grid_rows, int grid_cols) {
  require(dim % 4 == 0, ErrorKind::kInvalidArgument, "position table width must be a multiple of 4");
  const int quarter = dim / 4;
  ag::Matrix table(grid_rows * grid_cols, dim);
  for (int r = 0; r < grid_rows; ++r) {
    for (int c = 0; c < grid_cols; ++c) {
      const int row = r * grid_cols + c;
      for (int i = 0; i < quarter; ++i) {
        const double omega = 1.0 / std::pow(10000.0, static_cast<double>(i) / quarter);
        // First half encodes the column, second half the row.
        table(row, i) = static_cast<float>(std::sin(c * omega));
        table(row, quarter + i) = static_cast<float>(std::cos(c * omega));
        table(row, 2 * quarter + i) = static_cast<float>(std::sin(r * omega));
        table(row, 3 * quarter + i) = static_cast<float>(std::cos(r * omega));
      }
    }
  }
  return table;
}

MaskedAutoencoder::MaskedAutoencoder(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed, "model-init");
  const int l = config_.embed_dim;
  const int d = config_.decoder_dim;
  const int pd = config_.patch_dim();

  auto reg = [this](const std::string& name, ag::Matrix value, bool decay) {
    ag::Var v = ag::parameter(std::move(value));
    params_.push_back({name, v, decay});
    return v;
  };

  patch_w_ = reg("patch_embed.weight", xavier_uniform(pd, l, rng), true);
  patch_b_ = reg("patch_embed.bias", zeros(1, l), false);
  cls_token_ = reg("cls_token", normal_init(1, l, 0.02, rng), false);
  if (config_.use_pose_token) pose_token_ = reg("pose_token", normal_init(1, l, 0.02, rng), false);
  for (int i = 0; i < config_.depth; ++i) {
    encoder_.push_back(make_block("encoder." + std::to_string(i), l, l * config_.mlp_ratio, rng));
  }
  norm_g_ = reg("encoder_norm.weight", ones(1, l), false);
  norm_b_ = reg("encoder_norm.bias", zeros(1, l), false);
  decoder_embed_w_ = reg("decoder_embed.weight", xavier_uniform(l, d, rng), true);
  decoder_embed_b_ = reg("decoder_embed.bias", zeros(1, d), false);
  mask_token_ = reg("mask_token", normal_init(1, d, 0.02, rng), false);
  for (int i = 0; i < config_.decoder_depth; ++i) {
    decoder_.push_back(make_block("decoder." + std::to_string(i), d, d * config_.mlp_ratio, rng));
  }
  decoder_norm_g_ = reg("decoder_norm.weight", ones(1, d), false);
  decoder_norm_b_ = reg("decoder_norm.bias", zeros(1, d), false);
  pred_w_ = reg("decoder_pred.weight", xavier_uniform(d, pd, rng), true);
  pred_b_ = reg("decoder_pred.bias", zeros(1, pd), false);

  encoder_pos_ = sincos_position_table(l, config_.grid_rows(), config_.grid_cols());
  decoder_pos_ = sincos_position_table(d, config_.grid_rows(), config_.grid_cols());
}

MaskedAutoencoder::Block MaskedAutoencoder::make_block(const std::string& prefix, int dim, int hidden, Rng& rng) {
  auto reg = [this, &prefix](const std::string& name, ag::Matrix value, bool decay) {
    ag::Var v = ag::parameter(std::move(value));
    params_.push_back({prefix + "." + name, v, decay});
    return v;
  };
  Block b;
  b.ln1_g = reg("norm1.weight", ones(1, dim), false);
  b.ln1_b = reg("norm1.bias", zeros(1, dim), false);
  b.qkv_w = reg("attn.qkv.weight", xavier_uniform(dim, 3 * dim, rng), true);
  b.qkv_b = reg("attn.qkv.bias", zeros(1, 3 * dim), false);
  b.proj_w = reg("attn.proj.weight", xavier_uniform(dim, dim, rng), true);
  b.proj_b = reg("attn.proj.bias", zeros(1, dim), false);
  b.ln2_g = reg("norm2.weight", ones(1, dim), false);
  b.ln2_b = reg("norm2.bias", zeros(1, dim), false);
  b.fc1_w = reg("mlp.fc1.weight", xavier_uniform(dim, hidden, rng), true);
  b.fc1_b = reg("mlp.fc1.bias", zeros(1, hidden), false);
  b.fc2_w = reg("mlp.fc2.weight", xavier_uniform(hidden, dim, rng), true);
  b.fc2_b = reg("mlp.fc2.bias", zeros(1, dim), false);
  return b;
}

std::size_t MaskedAutoencoder::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += static_cast<std::size_t>(p.var.value().size());
  return total;
}

ag::Var MaskedAutoencoder::run_block(const Block& b, const ag::Var& x, int batch, int seq, int heads) const {
  ag::Var h = ag::layer_norm(x, b.ln1_g, b.ln1_b);
  h = ag::linear(h, b.qkv_w, b.qkv_b);
  h = ag::attention(h, batch, seq, heads);
  h = ag::linear(h, b.proj_w, b.proj_b);
  ag::Var y = ag::add(x, h);
  ag::Var m = ag::layer_norm(y, b.ln2_g, b.ln2_b);
  m = ag::gelu(ag::linear(m, b.fc1_w, b.fc1_b));
  m = ag::linear(m, b.fc2_w, b.fc2_b);
  return ag::add(y, m);
}

void MaskedAutoencoder::check_mask(const PatchMask& mask) const {
  require(mask.rows == config_.grid_rows() && mask.cols == config_.grid_cols(), ErrorKind::kShape,
          "mask grid does not match the model's patch grid");
}

EncodedBatch MaskedAutoencoder::encode(const ag::Matrix& patch_pixels, const std::vector<PatchMask>& masks) const {
  const int batch = static_cast<int>(masks.size());
  const int P = config_.num_patches();
  require(batch > 0, ErrorKind::kInvalidArgument, "encode: empty batch");
  require(patch_pixels.rows() == static_cast<Eigen::Index>(batch) * P && patch_pixels.cols() == config_.patch_dim(),
          ErrorKind::kShape, "encode: patch matrix does not match batch and patch size");

  EncodedBatch out;
  out.batch = batch;
  out.specials = config_.num_special_tokens();
  out.visible.reserve(batch);
  for (const auto& m : masks) {
    check_mask(m);
    out.visible.push_back(m.visible_indices());
    require(out.visible.back().size() == out.visible.front().size(), ErrorKind::kShape,
            "encode: masks in one batch must keep the same number of patches");
  }
  const int nvis = static_cast<int>(out.visible.front().size());
  require(nvis > 0, ErrorKind::kShape, "encode: mask hides every patch");
  out.seq = out.specials + nvis;

  ag::Matrix kept(static_cast<Eigen::Index>(batch) * nvis, patch_pixels.cols());
  ag::Matrix pos(static_cast<Eigen::Index>(batch) * nvis, config_.embed_dim);
  for (int b = 0; b < batch; ++b) {
    for (int i = 0; i < nvis; ++i) {
      const int p = out.visible[b][i];
      kept.row(static_cast<Eigen::Index>(b) * nvis + i) = patch_pixels.row(static_cast<Eigen::Index>(b) * P + p);
      pos.row(static_cast<Eigen::Index>(b) * nvis + i) = encoder_pos_.row(p);
    }
  }
  ag::Var x = ag::linear(ag::constant(std::move(kept)), patch_w_, patch_b_);
  x = ag::add(x, ag::constant(std::move(pos)));
  std::vector<ag::Var> specials = {cls_token_};
  if (config_.use_pose_token) specials.push_back(pose_token_);
  x = ag::assemble_sequence(specials, x, batch, nvis);
  for (const auto& block : encoder_) x = run_block(block, x, batch, out.seq, config_.heads);
  out.tokens = ag::layer_norm(x, norm_g_, norm_b_);
  return out;
}

ag::Var MaskedAutoencoder::decode(const EncodedBatch& encoded) const {
  const int P = config_.num_patches();
  const int S = encoded.specials;
  const int seq = S + P;
  ag::Var y = ag::linear(encoded.tokens, decoder_embed_w_, decoder_embed_b_);
  y = ag::scatter_with_mask_token(y, mask_token_, encoded.visible, S, P);
  ag::Matrix pos = ag::Matrix::Zero(static_cast<Eigen::Index>(encoded.batch) * seq, config_.decoder_dim);
  for (int b = 0; b < encoded.batch; ++b) {
    pos.block(static_cast<Eigen::Index>(b) * seq + S, 0, P, config_.decoder_dim) = decoder_pos_;
  }
  y = ag::add(y, ag::constant(std::move(pos)));
  for (const auto& block : decoder_) y = run_block(block, y, encoded.batch, seq, config_.decoder_heads);
  y = ag::layer_norm(y, decoder_norm_g_, decoder_norm_b_);
  y = ag::linear(y, pred_w_, pred_b_);
  // Special tokens pass through the decoder but are not reconstructed.
  std::vector<int> patch_rows;
  patch_rows.reserve(static_cast<std::size_t>(encoded.batch) * P);
  for (int b = 0; b < encoded.batch; ++b) {
    for (int p = 0; p < P; ++p) patch_rows.push_back(b * seq + S + p);
  }
  return ag::gather_rows(y, patch_rows);
}

TokenBundle MaskedAutoencoder::encode(const Image& image, const PatchMask& mask) const {
  require(image.height == config_.image_hw.height && image.width == config_.image_hw.width, ErrorKind::kShape,
          "encode: image size does not match the model");
  check_mask(mask);
  const EncodedBatch enc = encode(patchify({image}, config_.patch_size), {mask});
  const ag::Matrix& t = enc.tokens.value();
  TokenBundle bundle;
  bundle.cls.assign(t.row(0).data(), t.row(0).data() + t.cols());
  if (config_.use_pose_token) bundle.pose = std::vector<float>(t.row(1).data(), t.row(1).data() + t.cols());
  bundle.patch_tokens = t.bottomRows(t.rows() - enc.specials);
  bundle.patch_indices = enc.visible.front();
  return bundle;
}

ag::Matrix MaskedAutoencoder::decode(const TokenBundle& bundle, const PatchMask& mask) const {
  check_mask(mask);
  require(bundle.patch_indices == mask.visible_indices(), ErrorKind::kShape,
          "decode: token bundle was not produced with this mask");
  require(bundle.pose.has_value() == config_.use_pose_token, ErrorKind::kShape,
          "decode: bundle token layout does not match the model");
  EncodedBatch enc;
  enc.batch = 1;
  enc.specials = config_.num_special_tokens();
  enc.seq = enc.specials + static_cast<int>(bundle.patch_tokens.rows());
  enc.visible = {bundle.patch_indices};
  ag::Matrix tokens(enc.seq, config_.embed_dim);
  tokens.row(0) = Eigen::Map<const ag::Matrix>(bundle.cls.data(), 1, config_.embed_dim);
  if (bundle.pose) tokens.row(1) = Eigen::Map<const ag::Matrix>(bundle.pose->data(), 1, config_.embed_dim);
  tokens.bottomRows(bundle.patch_tokens.rows()) = bundle.patch_tokens;
  enc.tokens = ag::constant(std::move(tokens));
  return decode(enc).value();
}

ag::Matrix MaskedAutoencoder::embed(const std::vector<Image>& images, bool pose_token, int batch_size) const {
  require(!pose_token || config_.use_pose_token, ErrorKind::kInvalidArgument,
          "embed: model was built without a [POSE] token");
  const int index = pose_token ? 1 : 0;
  ag::Matrix out(static_cast<Eigen::Index>(images.size()), config_.embed_dim);
  for (std::size_t start = 0; start < images.size(); start += batch_size) {
    const std::size_t end = std::min(images.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<Image> chunk(images.begin() + start, images.begin() + end);
    std::vector<PatchMask> masks(chunk.size(), PatchMask::all_visible(config_.grid_rows(), config_.grid_cols()));
    const EncodedBatch enc = encode(patchify(chunk, config_.patch_size), masks);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      out.row(static_cast<Eigen::Index>(start + i)) = enc.tokens.value().row(static_cast<Eigen::Index>(i) * enc.seq + index);
    }
  }
  return out;
}

std::vector<double> normalize_token(const std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  require(norm > 0.0 && std::isfinite(norm), ErrorKind::kNumeric, "normalize_token: zero-length vector");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
  return out;
}

}  // namespace posecon
