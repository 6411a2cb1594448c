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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"
#include "masking/masking.hpp"
#include "model/autograd.hpp"

namespace posecon {

struct NamedParameter {
  std::string name;
  ag::Var var;
  bool weight_decay = true;  // false for biases, norms and special tokens
};

// Encoder output for one image: [CLS], optional [POSE], and the visible
// patch tokens in ascending patch order.
struct TokenBundle {
  std::vector<float> cls;
  std::optional<std::vector<float>> pose;
  ag::Matrix patch_tokens;
  std::vector<int> patch_indices;

  int token_count() const { return 1 + (pose ? 1 : 0) + static_cast<int>(patch_tokens.rows()); }
};

// Batched encoder result: `tokens` holds batch * seq rows, sample-major.
struct EncodedBatch {
  ag::Var tokens;
  int batch = 0;
  int seq = 0;
  int specials = 0;
  std::vector<std::vector<int>> visible;

  // Rows of special token `index` for every sample (batch x embed_dim).
  ag::Var special_rows(int index) const;
};

// Normalized patch pixels: row b * P + p holds patch p of image b, laid out
// as (row-in-patch, col-in-patch, channel).
ag::Matrix patchify(const std::vector<Image>& images, int patch_size);
// Per-patch mean/std normalization of a target matrix.
ag::Matrix normalize_patches(const ag::Matrix& patches);

// 2-D sine-cosine table, one row per patch.
ag::Matrix sincos_position_table(int dim, int grid_rows, int grid_cols);

// Small vision transformer masked autoencoder with [CLS] and optional
// [POSE] tokens.
class MaskedAutoencoder {
 public:
  MaskedAutoencoder(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::vector<NamedParameter>& parameters() { return params_; }
  const std::vector<NamedParameter>& parameters() const { return params_; }
  std::size_t parameter_count() const;

  // All masks must drop the same number of patches.
  EncodedBatch encode(const ag::Matrix& patch_pixels, const std::vector<PatchMask>& masks) const;
  // Pixel predictions for every patch: (batch * P) x patch_dim.
  ag::Var decode(const EncodedBatch& encoded) const;

  TokenBundle encode(const Image& image, const PatchMask& mask) const;
  ag::Matrix decode(const TokenBundle& bundle, const PatchMask& mask) const;

  // Special-token embeddings of full (unmasked) images; row i = image i.
  ag::Matrix embed(const std::vector<Image>& images, bool pose_token, int batch_size = 64) const;

 private:
  struct Block {
    ag::Var ln1_g, ln1_b, qkv_w, qkv_b, proj_w, proj_b;
    ag::Var ln2_g, ln2_b, fc1_w, fc1_b, fc2_w, fc2_b;
  };

  Block make_block(const std::string& prefix, int dim, int hidden, Rng& rng);
  ag::Var run_block(const Block& block, const ag::Var& x, int batch, int seq, int heads) const;
  void check_mask(const PatchMask& mask) const;

  ModelConfig config_;
  std::vector<NamedParameter> params_;

  ag::Var patch_w_, patch_b_;
  ag::Var cls_token_, pose_token_;
  std::vector<Block> encoder_;
  ag::Var norm_g_, norm_b_;
  ag::Var decoder_embed_w_, decoder_embed_b_;
  ag::Var mask_token_;
  std::vector<Block> decoder_;
  ag::Var decoder_norm_g_, decoder_norm_b_;
  ag::Var pred_w_, pred_b_;

  ag::Matrix encoder_pos_;
  ag::Matrix decoder_pos_;
};

// v / |v|. Zero vectors are rejected.
std::vector<double> normalize_token(const std::vector<double>& v);

}  // namespace posecon
