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

#include <array>

#include "core/image.hpp"
#include "core/manifest.hpp"
#include "core/pose.hpp"
#include "core/rng.hpp"

namespace posecon {

// Out-of-frame fill value (per-channel pixel mean).
inline constexpr std::array<float, 3> kPixelMean = {123.675f, 116.28f, 103.53f};
inline constexpr std::array<float, 3> kPixelStd = {58.395f, 57.12f, 57.375f};

// Crop rectangle in pixel-edge coordinates: the full frame is
// (0, 0, height, width). Sub-pixel values are allowed.
struct CropBox {
  double top = 0.0;
  double left = 0.0;
  double height = 0.0;
  double width = 0.0;
};

// Spatial transform shared by every image of one pose group.
struct GeometricParams {
  bool flip = false;
  double rotate_degrees = 0.0;  // counter-clockwise on screen
  CropBox crop;
  double crop_scale = 1.0;      // crop area / source area as drawn
  ImageHW source_hw;
  ImageHW target_hw;

  static GeometricParams identity(ImageHW hw);
};

struct AppearanceParams {
  bool color_jitter = false;
  double brightness = 0.0;  // deltas, each in [-0.2, 0.2]
  double contrast = 0.0;
  double saturation = 0.0;
  double hue = 0.0;         // fraction of the hue circle
  bool blur = false;
  int blur_kernel = 3;      // odd, in [3, 7]
  bool to_gray = false;
  bool solarize = false;
  float solarize_threshold = 128.0f;
};

struct AugmentationSettings {
  double flip_probability = 0.5;
  double rotate_limit_degrees = 45.0;
  double crop_scale_min = 0.8;
  double crop_scale_max = 1.0;
  double crop_ratio_min = 3.0 / 8.0;  // width / height
  double crop_ratio_max = 2.0 / 3.0;
  double jitter_probability = 0.8;
  double jitter_strength = 0.2;
  double blur_probability = 0.8;
  double gray_probability = 0.2;
  double solarize_probability = 0.2;

  // Flip and resized crop only.
  static AugmentationSettings weak();
};

// Draws flip, rotation and resized-crop parameters. With `strong == false`
// the rotation is fixed at 0.
GeometricParams draw_geometric(Rng& rng, ImageHW source_hw, ImageHW target_hw,
                               const AugmentationSettings& settings = {});
AppearanceParams draw_appearance(Rng& rng, const AugmentationSettings& settings = {});

// Forward map (source pixel centers -> target pixel centers) as a row-major
// 2x3 affine matrix: flip, then rotation about the center, then crop and
// resize.
std::array<double, 6> geometric_affine(const GeometricParams& params);

Image warp_image(const Image& image, const GeometricParams& params);
PoseLabel warp_pose(const PoseLabel& pose, const GeometricParams& params);
SampleGroup apply_geometric(const SampleGroup& group, const GeometricParams& params);

// Table order: color jitter, blur, grayscale, solarize.
Image apply_appearance(const Image& image, const AppearanceParams& params);

// Individual pixel operations, exposed for testing.
Image solarize(const Image& image, float threshold);
Image to_gray(const Image& image);
Image gaussian_blur(const Image& image, int kernel);
Image color_jitter(const Image& image, double brightness, double contrast, double saturation, double hue);

}  // namespace posecon
