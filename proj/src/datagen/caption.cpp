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

#include "datagen/caption.hpp"

#include <cmath>
#include <fstream>
#include <functional>

#include <json.hpp>

#include "core/error.hpp"

namespace posecon {
namespace {

struct Segment {
  bool is_variable = false;
  std::string text;  // literal text or variable name
};

std::vector<Segment> split_pattern(std::string_view pattern) {
  std::vector<Segment> out;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const auto open = pattern.find('{', pos);
    if (open == std::string_view::npos) {
      out.push_back({false, std::string(pattern.substr(pos))});
      break;
    }
    if (open > pos) out.push_back({false, std::string(pattern.substr(pos, open - pos))});
    const auto close = pattern.find('}', open);
    require(close != std::string_view::npos, ErrorKind::kParse,
            "unterminated placeholder in caption format: " + std::string(pattern));
    out.push_back({true, std::string(pattern.substr(open + 1, close - open - 1))});
    pos = close + 1;
  }
  return out;
}

std::vector<CaptionFormat> standard_formats() {
  return {
      {"{race} {identity} wearing {color1} {upper_cloth} and {color2} {lower_cloth}", 0.7},
      {"{race} {identity} wearing {color1} {clothing}", 0.3},
  };
}

}  // namespace

std::vector<std::string> format_variables(std::string_view pattern) {
  std::vector<std::string> names;
  for (const auto& s : split_pattern(pattern)) {
    if (s.is_variable) names.push_back(s.text);
  }
  return names;
}

void CaptionGrammar::validate() const {
  require(!formats.empty(), ErrorKind::kInvalidArgument, "caption grammar has no formats");
  double total = 0.0;
  for (const auto& f : formats) {
    require(f.probability >= 0.0, ErrorKind::kInvalidArgument, "negative format probability");
    total += f.probability;
    for (const auto& name : format_variables(f.pattern)) {
      const auto it = vocab.find(name);
      require(it != vocab.end() && !it->second.empty(), ErrorKind::kInvalidArgument,
              "caption variable '" + name + "' has no candidates");
    }
  }
  require(std::abs(total - 1.0) < 1e-9, ErrorKind::kInvalidArgument, "format probabilities must sum to 1");
}

const CaptionGrammar& CaptionGrammar::default_grammar() {
  static const CaptionGrammar grammar = [] {
    CaptionGrammar g;
    g.formats = standard_formats();
    const std::vector<std::string> colors = {"sky blue", "crimson", "olive", "ivory", "navy blue",
                                             "mustard", "lavender", "charcoal gray"};
    g.vocab = {
        {"race", {"An Asian", "An Australian", "An African", "An European", "A North American",
                  "A South American"}},
        {"identity", {"man", "woman", "boy", "girl"}},
        {"color1", colors},
        {"color2", colors},
        {"upper_cloth", {"t-shirt", "hoodie", "blazer", "sweater", "tank top"}},
        {"lower_cloth", {"jeans", "shorts", "pleated skirt", "cargo pants", "leggings"}},
        {"clothing", {"dress", "one-piece", "jumpsuit", "kimono", "overalls"}},
    };
    g.validate();
    return g;
  }();
  return grammar;
}

CaptionGrammar CaptionGrammar::from_vocab_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open vocabulary file: " + path.string());
  CaptionGrammar g;
  g.formats = standard_formats();
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& [key, value] : doc.items()) {
      g.vocab[key] = value.get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::kParse, path.string() + ": " + ex.what());
  }
  g.validate();
  return g;
}

std::string generate_caption(Rng& rng, const CaptionGrammar& grammar) {
  const double u = rng.uniform();
  std::size_t chosen = grammar.formats.size() - 1;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < grammar.formats.size(); ++i) {
    cumulative += grammar.formats[i].probability;
    if (u < cumulative) {
      chosen = i;
      break;
    }
  }
  std::string caption;
  for (const auto& seg : split_pattern(grammar.formats[chosen].pattern)) {
    if (!seg.is_variable) {
      caption += seg.text;
      continue;
    }
    const auto& candidates = grammar.vocab.at(seg.text);
    caption += candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
  }
  return caption;
}

std::vector<ParsedCaption> parse_caption(std::string_view caption, const CaptionGrammar& grammar) {
  std::vector<ParsedCaption> matches;
  for (std::size_t f = 0; f < grammar.formats.size(); ++f) {
    const auto segments = split_pattern(grammar.formats[f].pattern);
    std::map<std::string, std::string> bindings;
    // Depth-first over candidate choices; vocab entries may be prefixes of
    // one another ("pink" / "pink rose"), so greedy matching is not enough.
    std::function<bool(std::size_t, std::size_t)> match = [&](std::size_t seg, std::size_t pos) -> bool {
      if (seg == segments.size()) return pos == caption.size();
      const auto& s = segments[seg];
      if (!s.is_variable) {
        if (caption.substr(pos, s.text.size()) != s.text) return false;
        return match(seg + 1, pos + s.text.size());
      }
      const auto it = grammar.vocab.find(s.text);
      if (it == grammar.vocab.end()) return false;
      for (const auto& candidate : it->second) {
        if (caption.substr(pos, candidate.size()) != candidate) continue;
        bindings[s.text] = candidate;
        if (match(seg + 1, pos + candidate.size())) return true;
      }
      bindings.erase(s.text);
      return false;
    };
    if (match(0, 0)) matches.push_back({static_cast<int>(f), bindings});
  }
  return matches;
}

}  // namespace posecon
