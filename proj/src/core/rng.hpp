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

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace posecon {

// Deterministic random stream identified by (seed, tag). Streams with the
// same identity replay bit-identical draws; distinct tags are decorrelated
// through the seed sequence.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream_tag);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  bool bernoulli(double p) { return uniform() < p; }
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<int>(i) - 1));
      std::swap(values[i - 1], values[j]);
    }
  }

  // Child stream keyed by this stream's identity plus `tag`. Does not consume
  // draws from the parent.
  Rng derive(std::string_view tag) const;

  std::uint64_t seed() const { return seed_; }
  const std::string& tag() const { return tag_; }

 private:
  std::uint64_t seed_;
  std::string tag_;
  std::mt19937_64 engine_;
};

Rng seeded_rng(std::uint64_t seed, std::string_view stream_tag);

}  // namespace posecon
