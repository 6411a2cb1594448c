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

namespace posecon {

struct Schedule {
  double base_lr = 1.5e-3;
  double warmup_epochs = 3;
  double total_epochs = 30;
};

// Linear warmup from 0 to base_lr, then half-cosine decay to 0 at
// total_epochs. epoch_fraction counts epochs, fractional within an epoch.
double lr_at(double epoch_fraction, const Schedule& schedule);

}  // namespace posecon
