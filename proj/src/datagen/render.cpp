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

#include "datagen/render.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace posecon {
namespace {

Rgb random_color(Rng& rng) {
  return {static_cast<float>(rng.uniform(0.0, 255.0)), static_cast<float>(rng.uniform(0.0, 255.0)),
          static_cast<float>(rng.uniform(0.0, 255.0))};
}

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double cx = ax + t * dx - px, cy = ay + t * dy - py;
  return std::sqrt(cx * cx + cy * cy);
}

void draw_segment(Image& img, double ax, double ay, double bx, double by, double radius, const Rgb& color) {
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - radius)));
  const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(ax, bx) + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - radius)));
  const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(ay, by) + radius)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (segment_distance(x, y, ax, ay, bx, by) <= radius) {
        for (int c = 0; c < 3; ++c) img.at(y, x, c) = color[c];
      }
    }
  }
}

void draw_ellipse(Image& img, double cx, double cy, double rx, double ry, const Rgb& color) {
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double u = (x - cx) / rx, v = (y - cy) / ry;
      if (u * u + v * v <= 1.0) {
        for (int c = 0; c < 3; ++c) img.at(y, x, c) = color[c];
      }
    }
  }
}

}  // namespace

void RenderStyle::validate() const {
  require(!limb_palette.empty(), ErrorKind::kInvalidArgument, "render style: empty limb palette");
  require(limb_thickness >= 1, ErrorKind::kInvalidArgument, "render style: limb thickness < 1");
  require(noise_amplitude >= 0.0 && noise_amplitude <= 0.1, ErrorKind::kInvalidArgument,
          "render style: noise amplitude outside [0, 0.1]");
}

RenderStyle sample_style(Rng& rng) {
  RenderStyle style;
  const int colors = rng.uniform_int(3, 6);
  for (int i = 0; i < colors; ++i) style.limb_palette.push_back(random_color(rng));
  style.background_top = random_color(rng);
  style.gradient = rng.bernoulli(0.5);
  style.horizontal_gradient = rng.bernoulli(0.5);
  style.background_bottom = style.gradient ? random_color(rng) : style.background_top;
  style.limb_thickness = rng.uniform_int(2, 4);
  style.noise_amplitude = rng.uniform(0.0, 0.1);
  style.clutter_blobs = rng.uniform_int(0, 3);
  return style;
}

Image ProceduralBackend::generate(const PoseLabel& pose, const std::string& /*caption*/, std::uint64_t seed) {
  Rng rng(seed, "procedural-render");
  const RenderStyle style = sample_style(rng);
  return render(pose, style, rng);
}

Image ProceduralBackend::render(const PoseLabel& pose, const RenderStyle& style, Rng& rng) const {
  style.validate();
  Image img(image_hw_.height, image_hw_.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double t = 0.0;
      if (style.gradient) {
        t = style.horizontal_gradient ? static_cast<double>(x) / std::max(1, img.width - 1)
                                      : static_cast<double>(y) / std::max(1, img.height - 1);
      }
      for (int c = 0; c < 3; ++c) {
        img.at(y, x, c) = static_cast<float>((1.0 - t) * style.background_top[c] + t * style.background_bottom[c]);
      }
    }
  }

  for (int b = 0; b < style.clutter_blobs; ++b) {
    const double cx = rng.uniform(0.0, img.width), cy = rng.uniform(0.0, img.height);
    const double rx = rng.uniform(2.0, img.width * 0.25), ry = rng.uniform(2.0, img.height * 0.25);
    draw_ellipse(img, cx, cy, rx, ry, random_color(rng));
  }

  // Palette assignment is shuffled per image so limb colors do not encode
  // which limb is which.
  std::vector<Rgb> palette = style.limb_palette;
  rng.shuffle(palette);
  const double radius = 0.5 * style.limb_thickness;
  for (std::size_t e = 0; e < kSkeletonEdges.size(); ++e) {
    const auto [a, b] = kSkeletonEdges[e];
    const auto& ka = pose.keypoints[a];
    const auto& kb = pose.keypoints[b];
    if (!ka.visible || !kb.visible) continue;
    // Face edges are drawn thinner than body limbs.
    const double r = (a <= kRightEar && b <= kRightEar) ? std::max(0.5, radius * 0.5) : radius;
    draw_segment(img, ka.x, ka.y, kb.x, kb.y, r, palette[e % palette.size()]);
  }
  for (int j = 0; j < kNumKeypoints; ++j) {
    const auto& kp = pose.keypoints[j];
    if (!kp.visible) continue;
    const double r = j == kNose ? radius * 1.6 : radius * 0.9;
    draw_segment(img, kp.x, kp.y, kp.x, kp.y, r, palette[(j + 3) % palette.size()]);
  }

  if (style.noise_amplitude > 0.0) {
    const double amp = style.noise_amplitude * 255.0;
    for (auto& v : img.data) v += static_cast<float>(rng.uniform(-amp, amp));
  }
  quantize(img);
  return img;
}

SampleGroup render_group(const PoseLabel& pose, int m, Rng& rng, GenerationBackend& backend,
                         const CaptionGrammar& grammar) {
  require(m >= 2, ErrorKind::kInvalidArgument, "render_group: m must be >= 2");
  SampleGroup group;
  group.pose = pose;
  group.caption = generate_caption(rng, grammar);
  for (int k = 0; k < m; ++k) {
    group.images.push_back(backend.generate(pose, group.caption, rng.next_u64()));
  }
  return group;
}

}  // namespace posecon
