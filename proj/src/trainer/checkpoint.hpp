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
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "model/vit_mae.hpp"
#include "trainer/optimizer.hpp"

namespace posecon {

// On-disk layout (all integers little-endian):
//   8 bytes   magic "POSECKPT"
//   u32       format version (kCheckpointVersion)
//   u32       reserved, 0
//   u64       header length N
//   N bytes   JSON header: config (flat key = value text), epochs_completed,
//             global_step, optimizer_steps, has_optimizer_state, and the
//             tensor table [{name, rows, cols}, ...]
//   payload   float32 row-major data of every tensor in table order, then,
//             when optimizer state is present, the first-moment tensors and
//             the second-moment tensors in the same order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainConfig config;
  int epochs_completed = 0;
  std::int64_t global_step = 0;
  std::int64_t optimizer_steps = 0;
  std::vector<std::string> names;
  std::vector<ag::Matrix> params;
  std::vector<ag::Matrix> exp_avg;     // empty without optimizer state
  std::vector<ag::Matrix> exp_avg_sq;
};

Checkpoint capture_checkpoint(const TrainConfig& config, const MaskedAutoencoder& model, const AdamW* optimizer,
                              int epochs_completed, std::int64_t global_step);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Copies parameters (and optimizer moments when both sides have them).
void restore_checkpoint(const Checkpoint& checkpoint, MaskedAutoencoder& model, AdamW* optimizer);
std::unique_ptr<MaskedAutoencoder> model_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace posecon
