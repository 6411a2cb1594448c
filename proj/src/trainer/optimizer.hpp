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
#include <vector>

#include "model/vit_mae.hpp"

namespace posecon {

struct AdamWSettings {
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  double weight_decay = 0.05;
};

// Decoupled weight decay Adam. Parameters flagged without weight decay
// (biases, norms, special tokens) only take the adaptive step.
class AdamW {
 public:
  AdamW(std::vector<NamedParameter>& params, AdamWSettings settings);

  void step(double lr);
  void zero_grad();

  std::int64_t steps() const { return steps_; }
  const std::vector<ag::Matrix>& exp_avg() const { return exp_avg_; }
  const std::vector<ag::Matrix>& exp_avg_sq() const { return exp_avg_sq_; }
  void restore(std::int64_t steps, std::vector<ag::Matrix> exp_avg, std::vector<ag::Matrix> exp_avg_sq);

 private:
  std::vector<NamedParameter>* params_;
  AdamWSettings settings_;
  std::int64_t steps_ = 0;
  std::vector<ag::Matrix> exp_avg_;
  std::vector<ag::Matrix> exp_avg_sq_;
};

// Euclidean norm over all accumulated parameter gradients.
double gradient_norm(const std::vector<NamedParameter>& params);

}  // namespace posecon
