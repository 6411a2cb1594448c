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

#include "datagen/filter.hpp"

#include "core/error.hpp"

namespace posecon {

std::string_view verdict_name(FilterVerdict verdict) {
  switch (verdict) {
    case FilterVerdict::kAccept: return "accept";
    case FilterVerdict::kSmallBbox: return "small_bbox";
    case FilterVerdict::kTooFewKeypoints: return "too_few_keypoints";
  }
  return "accept";
}

FilterVerdict filter_sample(const BoundingBox& bbox, const PoseLabel& pose) {
  require(bbox.w >= 0.0 && bbox.h >= 0.0, ErrorKind::kInvalidArgument, "filter_sample: negative bbox extent");
  if (bbox.area() < kMinBboxArea) return FilterVerdict::kSmallBbox;
  if (pose.visible_count() < kMinVisibleKeypoints) return FilterVerdict::kTooFewKeypoints;
  return FilterVerdict::kAccept;
}

}  // namespace posecon
