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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/rng.hpp"

namespace posecon {

// A format is literal text with "{variable}" placeholders.
struct CaptionFormat {
  std::string pattern;
  double probability = 0.0;
};

struct CaptionGrammar {
  std::vector<CaptionFormat> formats;
  std::map<std::string, std::vector<std::string>> vocab;

  // Probabilities sum to 1 and every placeholder has candidates.
  void validate() const;

  // Two-format grammar with a truncated vocabulary.
  static const CaptionGrammar& default_grammar();
  // Same formats; vocabulary read from a JSON object of variable -> list.
  static CaptionGrammar from_vocab_file(const std::filesystem::path& path);
};

std::string generate_caption(Rng& rng, const CaptionGrammar& grammar);

struct ParsedCaption {
  int format_index = -1;
  std::map<std::string, std::string> bindings;
};

// Every format the caption matches under some assignment of vocabulary
// entries. A well-formed caption matches exactly one.
std::vector<ParsedCaption> parse_caption(std::string_view caption, const CaptionGrammar& grammar);

// Placeholder names in order of appearance.
std::vector<std::string> format_variables(std::string_view pattern);

}  // namespace posecon
