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
#include <cstdint>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/manifest.hpp"
#include "core/pose.hpp"
#include "core/rng.hpp"
#include "datagen/caption.hpp"

namespace posecon {

using Rgb = std::array<float, 3>;

struct RenderStyle {
  std::vector<Rgb> limb_palette;
  Rgb background_top{};
  Rgb background_bottom{};
  bool gradient = false;
  bool horizontal_gradient = false;
  int limb_thickness = 2;
  double noise_amplitude = 0.0;  // fraction of full scale, in [0, 0.1]
  int clutter_blobs = 0;

  void validate() const;
};

RenderStyle sample_style(Rng& rng);

// Boundary between pose-conditioned image synthesis and the rest of the
// pipeline: (pose, caption, seed) -> image.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual Image generate(const PoseLabel& pose, const std::string& caption, std::uint64_t seed) = 0;
};

// Draws the skeleton as thick colored limbs over a randomized background.
// The caption does not influence the output.
class ProceduralBackend final : public GenerationBackend {
 public:
  explicit ProceduralBackend(ImageHW image_hw) : image_hw_(image_hw) {}

  Image generate(const PoseLabel& pose, const std::string& caption, std::uint64_t seed) override;
  Image render(const PoseLabel& pose, const RenderStyle& style, Rng& rng) const;

 private:
  ImageHW image_hw_;
};

// m images of one pose, each with an independent style, plus a caption.
SampleGroup render_group(const PoseLabel& pose, int m, Rng& rng, GenerationBackend& backend,
                         const CaptionGrammar& grammar = CaptionGrammar::default_grammar());

}  // namespace posecon
