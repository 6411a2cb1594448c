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

#include "trainer/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "core/error.hpp"

namespace posecon {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'P', 'O', 'S', 'E', 'C', 'K', 'P', 'T'};

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

void write_tensors(std::ostream& out, const std::vector<ag::Matrix>& tensors) {
  for (const auto& t : tensors) {
    out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(float)));
  }
}

std::vector<ag::Matrix> read_tensors(std::istream& in, const std::vector<std::pair<int, int>>& shapes,
                                     const std::string& where) {
  std::vector<ag::Matrix> out;
  out.reserve(shapes.size());
  for (const auto& [r, c] : shapes) {
    ag::Matrix t(r, c);
    in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(float)));
    require(static_cast<bool>(in), ErrorKind::kParse, where + ": truncated tensor payload");
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

Checkpoint capture_checkpoint(const TrainConfig& config, const MaskedAutoencoder& model, const AdamW* optimizer,
                              int epochs_completed, std::int64_t global_step) {
  Checkpoint ck;
  ck.config = config;
  ck.epochs_completed = epochs_completed;
  ck.global_step = global_step;
  for (const auto& p : model.parameters()) {
    ck.names.push_back(p.name);
    ck.params.push_back(p.var.value());
  }
  if (optimizer) {
    ck.optimizer_steps = optimizer->steps();
    ck.exp_avg = optimizer->exp_avg();
    ck.exp_avg_sq = optimizer->exp_avg_sq();
  }
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  nlohmann::json header;
  header["config"] = format_config(ck.config);
  header["epochs_completed"] = ck.epochs_completed;
  header["global_step"] = ck.global_step;
  header["optimizer_steps"] = ck.optimizer_steps;
  header["has_optimizer_state"] = !ck.exp_avg.empty();
  header["tensors"] = nlohmann::json::array();
  for (std::size_t i = 0; i < ck.params.size(); ++i) {
    header["tensors"].push_back({{"name", ck.names[i]}, {"rows", ck.params[i].rows()}, {"cols", ck.params[i].cols()}});
  }
  const std::string text = header.dump();

  // Write to a sibling file first so a crash never leaves a torn checkpoint.
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot write checkpoint " + tmp.string());
    out.write(kMagic, sizeof(kMagic));
    write_pod<std::uint32_t>(out, kCheckpointVersion);
    write_pod<std::uint32_t>(out, 0);
    write_pod<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    write_tensors(out, ck.params);
    if (!ck.exp_avg.empty()) {
      write_tensors(out, ck.exp_avg);
      write_tensors(out, ck.exp_avg_sq);
    }
    require(static_cast<bool>(out), ErrorKind::kIo, "failed writing checkpoint " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorKind::kIo, "cannot move checkpoint into place: " + ec.message());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open checkpoint " + path.string());
  const std::string where = path.string();
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, ErrorKind::kParse, where + ": not a checkpoint");
  const auto version = read_pod<std::uint32_t>(in);
  require(version == kCheckpointVersion, ErrorKind::kParse,
          where + ": unsupported checkpoint version " + std::to_string(version));
  read_pod<std::uint32_t>(in);
  const auto header_len = read_pod<std::uint64_t>(in);
  require(static_cast<bool>(in) && header_len < (1u << 28), ErrorKind::kParse, where + ": bad header length");
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  require(static_cast<bool>(in), ErrorKind::kParse, where + ": truncated header");

  Checkpoint ck;
  std::vector<std::pair<int, int>> shapes;
  bool has_optimizer = false;
  try {
    const auto header = nlohmann::json::parse(text);
    ck.config = parse_config(header.at("config").get<std::string>());
    ck.epochs_completed = header.at("epochs_completed").get<int>();
    ck.global_step = header.at("global_step").get<std::int64_t>();
    ck.optimizer_steps = header.at("optimizer_steps").get<std::int64_t>();
    has_optimizer = header.at("has_optimizer_state").get<bool>();
    for (const auto& t : header.at("tensors")) {
      ck.names.push_back(t.at("name").get<std::string>());
      shapes.emplace_back(t.at("rows").get<int>(), t.at("cols").get<int>());
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::kParse, where + ": " + ex.what());
  }
  ck.params = read_tensors(in, shapes, where);
  if (has_optimizer) {
    ck.exp_avg = read_tensors(in, shapes, where);
    ck.exp_avg_sq = read_tensors(in, shapes, where);
  }
  return ck;
}

void restore_checkpoint(const Checkpoint& ck, MaskedAutoencoder& model, AdamW* optimizer) {
  auto& params = model.parameters();
  require(params.size() == ck.params.size(), ErrorKind::kShape,
          "checkpoint holds " + std::to_string(ck.params.size()) + " tensors, model expects " +
              std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i].name == ck.names[i] && params[i].var.rows() == ck.params[i].rows() &&
                params[i].var.cols() == ck.params[i].cols(),
            ErrorKind::kShape, "checkpoint tensor mismatch at " + ck.names[i]);
    params[i].var.mutable_value() = ck.params[i];
  }
  if (optimizer && !ck.exp_avg.empty()) optimizer->restore(ck.optimizer_steps, ck.exp_avg, ck.exp_avg_sq);
}

std::unique_ptr<MaskedAutoencoder> model_from_checkpoint(const Checkpoint& ck) {
  auto model = std::make_unique<MaskedAutoencoder>(ck.config.model_config(), ck.config.seed);
  restore_checkpoint(ck, *model, nullptr);
  return model;
}

}  // namespace posecon
