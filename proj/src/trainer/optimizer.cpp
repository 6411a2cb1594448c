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

#include "trainer/optimizer.hpp"

#include <cmath>

#include "core/error.hpp"

namespace posecon {

AdamW::AdamW(std::vector<NamedParameter>& params, AdamWSettings settings) : params_(&params), settings_(settings) {
  for (const auto& p : params) {
    exp_avg_.push_back(ag::Matrix::Zero(p.var.rows(), p.var.cols()));
    exp_avg_sq_.push_back(ag::Matrix::Zero(p.var.rows(), p.var.cols()));
  }
}

void AdamW::step(double lr) {
  ++steps_;
  const double bc1 = 1.0 - std::pow(settings_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(settings_.beta2, static_cast<double>(steps_));
  const auto b1 = static_cast<float>(settings_.beta1);
  const auto b2 = static_cast<float>(settings_.beta2);
  for (std::size_t i = 0; i < params_->size(); ++i) {
    auto& p = (*params_)[i];
    if (!p.var.has_grad()) continue;
    ag::Matrix& value = p.var.mutable_value();
    const ag::Matrix& g = p.var.grad();
    if (p.weight_decay) value *= static_cast<float>(1.0 - lr * settings_.weight_decay);
    exp_avg_[i] = b1 * exp_avg_[i] + (1.0f - b1) * g;
    exp_avg_sq_[i] = b2 * exp_avg_sq_[i] + (1.0f - b2) * g.cwiseProduct(g);
    const auto step_size = static_cast<float>(lr / bc1);
    const auto denom = (exp_avg_sq_[i].array() / static_cast<float>(bc2)).sqrt() + static_cast<float>(settings_.eps);
    value.array() -= step_size * exp_avg_[i].array() / denom;
  }
}

void AdamW::zero_grad() {
  for (auto& p : *params_) p.var.zero_grad();
}

void AdamW::restore(std::int64_t steps, std::vector<ag::Matrix> exp_avg, std::vector<ag::Matrix> exp_avg_sq) {
  require(exp_avg.size() == params_->size() && exp_avg_sq.size() == params_->size(), ErrorKind::kShape,
          "optimizer state does not match the parameter list");
  for (std::size_t i = 0; i < params_->size(); ++i) {
    const auto& p = (*params_)[i];
    require(exp_avg[i].rows() == p.var.rows() && exp_avg[i].cols() == p.var.cols() &&
                exp_avg_sq[i].rows() == p.var.rows() && exp_avg_sq[i].cols() == p.var.cols(),
            ErrorKind::kShape, "optimizer state shape mismatch for " + p.name);
  }
  steps_ = steps;
  exp_avg_ = std::move(exp_avg);
  exp_avg_sq_ = std::move(exp_avg_sq);
}

double gradient_norm(const std::vector<NamedParameter>& params) {
  double sum = 0.0;
  for (const auto& p : params) {
    if (p.var.has_grad()) sum += p.var.grad().cast<double>().squaredNorm();
  }
  return std::sqrt(sum);
}

}  // namespace posecon
