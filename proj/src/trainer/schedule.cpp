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

#include "trainer/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace posecon {

double lr_at(double epoch_fraction, const Schedule& s) {
  const double e = std::clamp(epoch_fraction, 0.0, s.total_epochs);
  if (e < s.warmup_epochs) return s.base_lr * e / s.warmup_epochs;
  const double span = s.total_epochs - s.warmup_epochs;
  if (span <= 0.0) return s.base_lr;
  const double progress = (e - s.warmup_epochs) / span;
  return 0.5 * s.base_lr * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace posecon
