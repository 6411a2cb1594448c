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

#include <string_view>

#include "core/pose.hpp"
#include "datagen/pose_sampler.hpp"

namespace posecon {

inline constexpr double kMinBboxArea = 4096.0;
inline constexpr int kMinVisibleKeypoints = 5;

enum class FilterVerdict { kAccept, kSmallBbox, kTooFewKeypoints };

std::string_view verdict_name(FilterVerdict verdict);

// Area is checked before keypoint count. Both thresholds are inclusive on
// the accepting side.
FilterVerdict filter_sample(const BoundingBox& bbox, const PoseLabel& pose);

}  // namespace posecon
