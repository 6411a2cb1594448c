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

#include "core/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "core/error.hpp"

namespace posecon {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc() && ptr == text.data() + text.size(), ErrorKind::kParse,
          "field '" + std::string(key) + "': not a number: '" + std::string(text) + "'");
  return value;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  Int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc() && ptr == text.data() + text.size(), ErrorKind::kParse,
          "field '" + std::string(key) + "': not an integer: '" + std::string(text) + "'");
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorKind::kParse, "field '" + std::string(key) + "': not a boolean: '" + std::string(text) + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

struct Field {
  const char* key;
  std::function<void(TrainConfig&, std::string_view)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define PC_DOUBLE_FIELD(name)                                                             \
  Field {                                                                                 \
    #name, [](TrainConfig& c, std::string_view v) { c.name = parse_double(#name, v); },   \
        [](const TrainConfig& c) { return format_double(c.name); }                        \
  }
#define PC_INT_FIELD(name, expr)                                                          \
  Field {                                                                                 \
    #name, [](TrainConfig& c, std::string_view v) { c.expr = parse_int<int>(#name, v); }, \
        [](const TrainConfig& c) { return std::to_string(c.expr); }                       \
  }
#define PC_BOOL_FIELD(name)                                                               \
  Field {                                                                                 \
    #name, [](TrainConfig& c, std::string_view v) { c.name = parse_bool(#name, v); },     \
        [](const TrainConfig& c) { return std::string(c.name ? "true" : "false"); }       \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      PC_DOUBLE_FIELD(tau),
      PC_DOUBLE_FIELD(gamma1),
      PC_DOUBLE_FIELD(gamma2),
      PC_INT_FIELD(n_poses_per_batch, n_poses_per_batch),
      PC_INT_FIELD(m_variations, m_variations),
      PC_DOUBLE_FIELD(mask_ratio),
      PC_INT_FIELD(mask_part_radius, mask_part_radius),
      PC_BOOL_FIELD(pose_guided_masking),
      PC_INT_FIELD(patch_size, patch_size),
      PC_INT_FIELD(image_height, image_hw.height),
      PC_INT_FIELD(image_width, image_hw.width),
      PC_DOUBLE_FIELD(base_lr),
      PC_DOUBLE_FIELD(weight_decay),
      PC_INT_FIELD(warmup_epochs, warmup_epochs),
      PC_INT_FIELD(total_epochs, total_epochs),
      PC_INT_FIELD(grad_accum_steps, grad_accum_steps),
      PC_BOOL_FIELD(use_pose_token),
      PC_BOOL_FIELD(use_mpc_loss),
      Field{"seed",
            [](TrainConfig& c, std::string_view v) { c.seed = parse_int<std::uint64_t>("seed", v); },
            [](const TrainConfig& c) { return std::to_string(c.seed); }},
      PC_BOOL_FIELD(strong_augmentation),
      PC_BOOL_FIELD(norm_pix_loss),
      PC_INT_FIELD(embed_dim, embed_dim),
      PC_INT_FIELD(depth, depth),
      PC_INT_FIELD(heads, heads),
      PC_INT_FIELD(decoder_dim, decoder_dim),
      PC_INT_FIELD(decoder_depth, decoder_depth),
      PC_INT_FIELD(decoder_heads, decoder_heads),
  };
  return table;
}

#undef PC_DOUBLE_FIELD
#undef PC_INT_FIELD
#undef PC_BOOL_FIELD

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (key == f.key) return f;
  }
  fail(ErrorKind::kParse, "unknown config key '" + std::string(key) + "'");
}

void check(bool ok, const char* field, const std::string& rule) {
  require(ok, ErrorKind::kConfig, std::string("invalid config field '") + field + "': " + rule);
}

}  // namespace

void ModelConfig::validate() const {
  check(embed_dim > 0, "embed_dim", "must be positive");
  check(depth > 0, "depth", "must be positive");
  check(heads > 0, "heads", "must be positive");
  check(embed_dim % heads == 0, "heads", "must divide embed_dim");
  check(decoder_dim > 0, "decoder_dim", "must be positive");
  check(decoder_depth > 0, "decoder_depth", "must be positive");
  check(decoder_heads > 0 && decoder_dim % decoder_heads == 0, "decoder_heads",
        "must be positive and divide decoder_dim");
  check(mlp_ratio > 0, "mlp_ratio", "must be positive");
  check(patch_size > 0, "patch_size", "must be positive");
  check(image_hw.height > 0 && image_hw.height % patch_size == 0, "image_height",
        "must be a positive multiple of patch_size");
  check(image_hw.width > 0 && image_hw.width % patch_size == 0, "image_width",
        "must be a positive multiple of patch_size");
}

void TrainConfig::validate() const {
  check(std::isfinite(tau) && tau > 0.0, "tau", "must be > 0");
  check(std::isfinite(gamma1) && gamma1 >= 0.0, "gamma1", "must be >= 0");
  check(std::isfinite(gamma2) && gamma2 >= 0.0, "gamma2", "must be >= 0");
  check(n_poses_per_batch > 0, "n_poses_per_batch", "must be positive");
  check(m_variations > 0, "m_variations", "must be positive");
  check(mask_ratio > 0.0 && mask_ratio < 1.0, "mask_ratio", "must lie in (0, 1)");
  check(mask_part_radius >= 0, "mask_part_radius", "must be >= 0");
  check(patch_size > 0, "patch_size", "must be positive");
  check(image_hw.height > 0 && image_hw.height % std::max(patch_size, 1) == 0, "image_height",
        "must be a positive multiple of patch_size");
  check(image_hw.width > 0 && image_hw.width % std::max(patch_size, 1) == 0, "image_width",
        "must be a positive multiple of patch_size");
  check(std::isfinite(base_lr) && base_lr > 0.0, "base_lr", "must be > 0");
  check(std::isfinite(weight_decay) && weight_decay > 0.0, "weight_decay", "must be > 0");
  check(warmup_epochs > 0, "warmup_epochs", "must be positive");
  check(total_epochs > 0, "total_epochs", "must be positive");
  check(grad_accum_steps > 0, "grad_accum_steps", "must be positive");
  model_config().validate();
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig m;
  m.embed_dim = embed_dim;
  m.depth = depth;
  m.heads = heads;
  m.decoder_dim = decoder_dim;
  m.decoder_depth = decoder_depth;
  m.decoder_heads = decoder_heads;
  m.patch_size = patch_size;
  m.image_hw = image_hw;
  m.use_pose_token = use_pose_token;
  return m;
}

Variant parse_variant(std::string_view name) {
  if (name == "genpoccl") return Variant::kGenPoCCL;
  if (name == "genpoccl0") return Variant::kGenPoCCL0;
  if (name == "baseline-hap") return Variant::kBaselineHap;
  fail(ErrorKind::kInvalidArgument, "unknown variant '" + std::string(name) + "'");
}

std::string_view variant_name(Variant variant) {
  switch (variant) {
    case Variant::kGenPoCCL: return "genpoccl";
    case Variant::kGenPoCCL0: return "genpoccl0";
    case Variant::kBaselineHap: return "baseline-hap";
  }
  return "genpoccl";
}

void apply_variant(TrainConfig& config, Variant variant) {
  switch (variant) {
    case Variant::kGenPoCCL:
      config.use_pose_token = true;
      config.use_mpc_loss = true;
      break;
    case Variant::kGenPoCCL0:
      config.use_pose_token = false;
      config.use_mpc_loss = true;
      break;
    case Variant::kBaselineHap:
      config.use_pose_token = false;
      config.use_mpc_loss = false;
      config.gamma2 = 0.0;
      break;
  }
}

void set_config_value(TrainConfig& config, std::string_view key, std::string_view value) {
  find_field(key).set(config, trim(value));
}

std::string get_config_value(const TrainConfig& config, std::string_view key) {
  return find_field(key).get(config);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

TrainConfig parse_config(std::string_view text) {
  TrainConfig config;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string_view::npos, ErrorKind::kParse,
            "line " + std::to_string(line_no) + ": expected 'key = value'");
    set_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  config.validate();
  return config;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open config: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_config(const TrainConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

}  // namespace posecon
