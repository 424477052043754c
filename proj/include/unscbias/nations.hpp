// Copyright 2026 The unscbias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

#include <nlohmann/json.hpp>

namespace unscbias {

inline constexpr std::string_view kUnitedStates = "United States";
inline constexpr std::string_view kUnitedKingdom = "United Kingdom";
inline constexpr std::string_view kFrance = "France";
inline constexpr std::string_view kRussia = "Russian Federation";
inline constexpr std::string_view kChina = "China";

/// The five permanent members, in the order the result tables use.
const std::vector<std::string>& p5_nations();
bool is_p5(std::string_view canonical_name);

/// A located nation reference inside free text.
struct NationMention {
  std::size_t pos = 0;
  std::size_t len = 0;
  std::string nation;  // canonical name
};

/// Canonicalization table mapping surface forms ("U.S.", "Russia") to one
/// canonical name per nation. Acronym-like aliases (no lowercase letters)
/// match case-sensitively so that "US" never matches the pronoun "us".
class NationAliases {
 public:
  static constexpr std::string_view kSchema = "unscbias/nation-aliases@1";

  NationAliases() = default;
  static NationAliases defaults();
  static NationAliases from_json(const nlohmann::json& doc);
  static NationAliases load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  void add(std::string_view canonical, std::string_view alias);

  /// Canonical name for `name`, or nullopt when `name` is not a known alias.
  std::optional<std::string> canonicalize(std::string_view name) const;

  /// Canonical name when known, otherwise the trimmed input.
  std::string canonical_or_self(std::string_view name) const;

  /// Non-overlapping, left-to-right, longest-match mentions.
  std::vector<NationMention> find_mentions(std::string_view text) const;

  const std::map<std::string, std::vector<std::string>>& table() const { return table_; }

 private:
  struct Entry {
    std::string alias;
    std::string canonical;
    bool case_sensitive = false;
  };
  std::map<std::string, std::vector<std::string>> table_;
  std::vector<Entry> entries_;  // sorted longest alias first
};

}  // namespace unscbias
