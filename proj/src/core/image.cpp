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

#include "core/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace posecon {

void quantize(Image& image) {
  for (auto& v : image.data) v = std::clamp(std::round(v), 0.0f, 255.0f);
}

double differing_pixel_fraction(const Image& a, const Image& b) {
  require(a.height == b.height && a.width == b.width, ErrorKind::kShape, "image size mismatch");
  const std::size_t pixels = static_cast<std::size_t>(a.height) * a.width;
  if (pixels == 0) return 0.0;
  std::size_t differing = 0;
  for (std::size_t p = 0; p < pixels; ++p) {
    const float* pa = &a.data[p * 3];
    const float* pb = &b.data[p * 3];
    if (pa[0] != pb[0] || pa[1] != pb[1] || pa[2] != pb[2]) ++differing;
  }
  return static_cast<double>(differing) / static_cast<double>(pixels);
}

void write_png(const std::filesystem::path& path, const Image& image) {
  std::vector<png_byte> bytes(image.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<png_byte>(std::clamp(std::lround(image.data[i]), 0L, 255L));
  }
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(image.width);
  desc.height = static_cast<png_uint_32>(image.height);
  desc.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&desc, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    const std::string reason = desc.message;
    png_image_free(&desc);
    fail(ErrorKind::kIo, "cannot write " + path.string() + ": " + reason);
  }
}

Image read_png(const std::filesystem::path& path) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&desc, path.c_str())) {
    fail(ErrorKind::kIo, "cannot read " + path.string() + ": " + desc.message);
  }
  desc.format = PNG_FORMAT_RGB;
  std::vector<png_byte> bytes(PNG_IMAGE_SIZE(desc));
  if (!png_image_finish_read(&desc, nullptr, bytes.data(), 0, nullptr)) {
    const std::string reason = desc.message;
    png_image_free(&desc);
    fail(ErrorKind::kIo, "cannot decode " + path.string() + ": " + reason);
  }
  Image image(static_cast<int>(desc.height), static_cast<int>(desc.width));
  std::copy(bytes.begin(), bytes.end(), image.data.begin());
  return image;
}

}  // namespace posecon
