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

#include "augment/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace posecon {
namespace {

using Affine = std::array<double, 9>;  // row-major 3x3

Affine multiply(const Affine& a, const Affine& b) {
  Affine r{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * b[k * 3 + j];
      r[i * 3 + j] = s;
    }
  }
  return r;
}

Affine full_affine(const GeometricParams& p) {
  const double W = p.source_hw.width, H = p.source_hw.height;
  Affine m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  if (p.flip) m = multiply(Affine{-1, 0, W - 1, 0, 1, 0, 0, 0, 1}, m);
  if (p.rotate_degrees != 0.0) {
    // Same convention as cv::getRotationMatrix2D with unit scale.
    const double a = std::cos(p.rotate_degrees * std::numbers::pi / 180.0);
    const double b = std::sin(p.rotate_degrees * std::numbers::pi / 180.0);
    const double cx = (W - 1) / 2.0, cy = (H - 1) / 2.0;
    m = multiply(Affine{a, b, (1 - a) * cx - b * cy, -b, a, b * cx + (1 - a) * cy, 0, 0, 1}, m);
  }
  // Centers -> edges, crop, scale, edges -> centers.
  const double sx = p.target_hw.width / p.crop.width;
  const double sy = p.target_hw.height / p.crop.height;
  m = multiply(Affine{sx, 0, (0.5 - p.crop.left) * sx - 0.5, 0, sy, (0.5 - p.crop.top) * sy - 0.5, 0, 0, 1}, m);
  return m;
}

// Keys cubic convolution kernel with a = -0.75 (OpenCV INTER_CUBIC).
void cubic_weights(double t, double w[4]) {
  constexpr double A = -0.75;
  const double x0 = 1.0 + t, x1 = t, x2 = 1.0 - t;
  w[0] = ((A * x0 - 5 * A) * x0 + 8 * A) * x0 - 4 * A;
  w[1] = ((A + 2) * x1 - (A + 3)) * x1 * x1 + 1;
  w[2] = ((A + 2) * x2 - (A + 3)) * x2 * x2 + 1;
  w[3] = 1.0 - w[0] - w[1] - w[2];
}

float clamp255(double v) { return static_cast<float>(std::clamp(v, 0.0, 255.0)); }

double luma(float r, float g, float b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  v = mx;
  const double d = mx - mn;
  s = mx > 0 ? d / mx : 0.0;
  if (d <= 0) {
    h = 0.0;
    return;
  }
  if (mx == r) {
    h = (g - b) / d;
  } else if (mx == g) {
    h = 2.0 + (b - r) / d;
  } else {
    h = 4.0 + (r - g) / d;
  }
  h /= 6.0;
  if (h < 0) h += 1.0;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  h = h - std::floor(h);
  const double h6 = h * 6.0;
  const int i = static_cast<int>(std::floor(h6)) % 6;
  const double f = h6 - std::floor(h6);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (i) {
    case 0: r = v, g = t, b = p; break;
    case 1: r = q, g = v, b = p; break;
    case 2: r = p, g = v, b = t; break;
    case 3: r = p, g = q, b = v; break;
    case 4: r = t, g = p, b = v; break;
    default: r = v, g = p, b = q; break;
  }
}

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) i = i < 0 ? -i : 2 * n - 2 - i;
  return i;
}

}  // namespace

GeometricParams GeometricParams::identity(ImageHW hw) {
  GeometricParams p;
  p.crop = {0.0, 0.0, static_cast<double>(hw.height), static_cast<double>(hw.width)};
  p.source_hw = hw;
  p.target_hw = hw;
  return p;
}

AugmentationSettings AugmentationSettings::weak() {
  AugmentationSettings s;
  s.rotate_limit_degrees = 0.0;
  s.jitter_probability = 0.0;
  s.blur_probability = 0.0;
  s.gray_probability = 0.0;
  s.solarize_probability = 0.0;
  return s;
}

GeometricParams draw_geometric(Rng& rng, ImageHW source_hw, ImageHW target_hw, const AugmentationSettings& s) {
  GeometricParams p;
  p.source_hw = source_hw;
  p.target_hw = target_hw;
  p.flip = rng.bernoulli(s.flip_probability);
  p.rotate_degrees = s.rotate_limit_degrees > 0.0 ? rng.uniform(-s.rotate_limit_degrees, s.rotate_limit_degrees) : 0.0;

  const double H = source_hw.height, W = source_hw.width;
  const double area = H * W;
  const double log_lo = std::log(s.crop_ratio_min), log_hi = std::log(s.crop_ratio_max);
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double scale = rng.uniform(s.crop_scale_min, s.crop_scale_max);
    const double ratio = std::exp(rng.uniform(log_lo, log_hi));
    const double w = std::sqrt(area * scale * ratio);
    const double h = std::sqrt(area * scale / ratio);
    if (w <= W && h <= H) {
      p.crop = {rng.uniform(0.0, H - h), rng.uniform(0.0, W - w), h, w};
      p.crop_scale = scale;
      return p;
    }
  }
  // Fallback: the largest centered crop whose aspect ratio is in range.
  const double in_ratio = W / H;
  double w = W, h = H;
  if (in_ratio < s.crop_ratio_min) {
    h = W / s.crop_ratio_min;
  } else if (in_ratio > s.crop_ratio_max) {
    w = H * s.crop_ratio_max;
  }
  p.crop = {(H - h) / 2.0, (W - w) / 2.0, h, w};
  p.crop_scale = (w * h) / area;
  return p;
}

AppearanceParams draw_appearance(Rng& rng, const AugmentationSettings& s) {
  AppearanceParams p;
  p.color_jitter = rng.bernoulli(s.jitter_probability);
  if (p.color_jitter) {
    const double k = s.jitter_strength;
    p.brightness = rng.uniform(-k, k);
    p.contrast = rng.uniform(-k, k);
    p.saturation = rng.uniform(-k, k);
    p.hue = rng.uniform(-k, k);
  }
  p.blur = rng.bernoulli(s.blur_probability);
  if (p.blur) p.blur_kernel = 3 + 2 * rng.uniform_int(0, 2);
  p.to_gray = rng.bernoulli(s.gray_probability);
  p.solarize = rng.bernoulli(s.solarize_probability);
  return p;
}

std::array<double, 6> geometric_affine(const GeometricParams& params) {
  const Affine m = full_affine(params);
  return {m[0], m[1], m[2], m[3], m[4], m[5]};
}

Image warp_image(const Image& image, const GeometricParams& params) {
  require(params.crop.width > 0.0 && params.crop.height > 0.0, ErrorKind::kInvalidArgument,
          "degenerate crop box (zero area)");
  require(image.height == params.source_hw.height && image.width == params.source_hw.width, ErrorKind::kShape,
          "image does not match the source size of the geometric params");
  const Affine m = full_affine(params);
  // Invert the 2x3 affine part.
  const double det = m[0] * m[4] - m[1] * m[3];
  const double i00 = m[4] / det, i01 = -m[1] / det, i10 = -m[3] / det, i11 = m[0] / det;
  const double i02 = -(i00 * m[2] + i01 * m[5]);
  const double i12 = -(i10 * m[2] + i11 * m[5]);

  Image out(params.target_hw.height, params.target_hw.width);
  for (int v = 0; v < out.height; ++v) {
    for (int u = 0; u < out.width; ++u) {
      const double sx = i00 * u + i01 * v + i02;
      const double sy = i10 * u + i11 * v + i12;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      double wx[4], wy[4];
      cubic_weights(sx - x0, wx);
      cubic_weights(sy - y0, wy);
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
          const int yy = y0 - 1 + j;
          if (wy[j] == 0.0) continue;
          for (int i = 0; i < 4; ++i) {
            const int xx = x0 - 1 + i;
            if (wx[i] == 0.0) continue;
            const bool inside = xx >= 0 && xx < image.width && yy >= 0 && yy < image.height;
            const double value = inside ? image.at(yy, xx, c) : kPixelMean[c];
            acc += wy[j] * wx[i] * value;
          }
        }
        out.at(v, u, c) = clamp255(acc);
      }
    }
  }
  return out;
}

PoseLabel warp_pose(const PoseLabel& pose, const GeometricParams& params) {
  const Affine m = full_affine(params);
  PoseLabel out;
  out.pose_id = pose.pose_id;
  const double max_x = params.target_hw.width - 1, max_y = params.target_hw.height - 1;
  for (int j = 0; j < kNumKeypoints; ++j) {
    const auto& kp = pose.keypoints[j];
    Keypoint mapped;
    mapped.x = m[0] * kp.x + m[1] * kp.y + m[2];
    mapped.y = m[3] * kp.x + m[4] * kp.y + m[5];
    mapped.visible = kp.visible && mapped.x >= 0.0 && mapped.x <= max_x && mapped.y >= 0.0 && mapped.y <= max_y;
    // A mirrored left wrist is anatomically the right wrist.
    out.keypoints[params.flip ? kFlipPartner[j] : j] = mapped;
  }
  return out;
}

SampleGroup apply_geometric(const SampleGroup& group, const GeometricParams& params) {
  SampleGroup out;
  out.caption = group.caption;
  out.pose = warp_pose(group.pose, params);
  out.images.reserve(group.images.size());
  for (const auto& img : group.images) out.images.push_back(warp_image(img, params));
  return out;
}

Image solarize(const Image& image, float threshold) {
  Image out = image;
  for (auto& v : out.data) {
    if (v >= threshold) v = 255.0f - v;
  }
  return out;
}

Image to_gray(const Image& image) {
  Image out = image;
  for (std::size_t p = 0; p < out.data.size(); p += 3) {
    const float g = clamp255(luma(out.data[p], out.data[p + 1], out.data[p + 2]));
    out.data[p] = out.data[p + 1] = out.data[p + 2] = g;
  }
  return out;
}

Image gaussian_blur(const Image& image, int kernel) {
  require(kernel >= 3 && kernel % 2 == 1, ErrorKind::kInvalidArgument, "blur kernel must be odd and >= 3");
  // sigma derived from the kernel size as cv::getGaussianKernel does for sigma <= 0.
  const double sigma = 0.3 * ((kernel - 1) * 0.5 - 1.0) + 0.8;
  const int r = kernel / 2;
  std::vector<double> w(kernel);
  double total = 0.0;
  for (int i = 0; i < kernel; ++i) {
    const double d = i - r;
    w[i] = std::exp(-d * d / (2 * sigma * sigma));
    total += w[i];
  }
  for (auto& x : w) x /= total;

  Image tmp(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = 0; i < kernel; ++i) acc += w[i] * image.at(y, reflect101(x + i - r, image.width), c);
        tmp.at(y, x, c) = static_cast<float>(acc);
      }
    }
  }
  Image out(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = 0; i < kernel; ++i) acc += w[i] * tmp.at(reflect101(y + i - r, image.height), x, c);
        out.at(y, x, c) = clamp255(acc);
      }
    }
  }
  return out;
}

Image color_jitter(const Image& image, double brightness, double contrast, double saturation, double hue) {
  Image out = image;
  auto& d = out.data;
  if (brightness != 0.0) {
    for (auto& v : d) v = clamp255(v * (1.0 + brightness));
  }
  if (contrast != 0.0) {
    double mean = 0.0;
    for (std::size_t p = 0; p < d.size(); p += 3) mean += luma(d[p], d[p + 1], d[p + 2]);
    mean /= static_cast<double>(d.size() / 3);
    for (auto& v : d) v = clamp255((v - mean) * (1.0 + contrast) + mean);
  }
  if (saturation != 0.0) {
    for (std::size_t p = 0; p < d.size(); p += 3) {
      const double g = luma(d[p], d[p + 1], d[p + 2]);
      for (int c = 0; c < 3; ++c) d[p + c] = clamp255((d[p + c] - g) * (1.0 + saturation) + g);
    }
  }
  if (hue != 0.0) {
    for (std::size_t p = 0; p < d.size(); p += 3) {
      double h, s, v, r, g, b;
      rgb_to_hsv(d[p], d[p + 1], d[p + 2], h, s, v);
      hsv_to_rgb(h + hue, s, v, r, g, b);
      d[p] = clamp255(r);
      d[p + 1] = clamp255(g);
      d[p + 2] = clamp255(b);
    }
  }
  return out;
}

Image apply_appearance(const Image& image, const AppearanceParams& params) {
  Image out = image;
  if (params.color_jitter) out = color_jitter(out, params.brightness, params.contrast, params.saturation, params.hue);
  if (params.blur) out = gaussian_blur(out, params.blur_kernel);
  if (params.to_gray) out = to_gray(out);
  if (params.solarize) out = solarize(out, params.solarize_threshold);
  return out;
}

}  // namespace posecon
