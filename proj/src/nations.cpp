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

#include "unscbias/nations.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "unscbias/text.hpp"

namespace unscbias {

const std::vector<std::string>& p5_nations() {
  static const std::vector<std::string> kP5 = {
      std::string(kUnitedStates), std::string(kUnitedKingdom), std::string(kFrance),
      std::string(kRussia), std::string(kChina)};
  return kP5;
}

bool is_p5(std::string_view canonical_name) {
  const auto& p5 = p5_nations();
  return std::find(p5.begin(), p5.end(), canonical_name) != p5.end();
}

NationAliases NationAliases::defaults() {
  NationAliases a;
  for (const auto& n : p5_nations()) a.add(n, n);
  for (auto alias : {"US", "U.S.", "U.S.A.", "USA", "United States of America",
                     "the United States of America", "the United States", "America"})
    a.add(kUnitedStates, alias);
  for (auto alias : {"UK", "U.K.", "Britain", "Great Britain", "the United Kingdom",
                     "United Kingdom of Great Britain and Northern Ireland"})
    a.add(kUnitedKingdom, alias);
  for (auto alias : {"French Republic"}) a.add(kFrance, alias);
  for (auto alias : {"Russia", "the Russian Federation"}) a.add(kRussia, alias);
  for (auto alias : {"PRC", "People's Republic of China"}) a.add(kChina, alias);
  return a;
}

void NationAliases::add(std::string_view canonical, std::string_view alias) {
  auto& list = table_[std::string(canonical)];
  if (std::find(list.begin(), list.end(), alias) == list.end()) list.emplace_back(alias);
  bool has_lower = std::any_of(alias.begin(), alias.end(),
                               [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; });
  entries_.push_back(Entry{std::string(alias), std::string(canonical), !has_lower});
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& x, const Entry& y) { return x.alias.size() > y.alias.size(); });
}

NationAliases NationAliases::from_json(const nlohmann::json& doc) {
  if (doc.contains("schema") && doc.at("schema").get<std::string>() != kSchema) {
    throw std::runtime_error("nation alias table: unsupported schema '" +
                             doc.at("schema").get<std::string>() + "'");
  }
  NationAliases a;
  for (const auto& [canonical, aliases] : doc.at("nations").items()) {
    a.add(canonical, canonical);
    for (const auto& alias : aliases) a.add(canonical, alias.get<std::string>());
  }
  return a;
}

NationAliases NationAliases::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read nation alias table: " + path.string());
  return from_json(nlohmann::json::parse(in));
}

nlohmann::json NationAliases::to_json() const {
  nlohmann::json nations = nlohmann::json::object();
  for (const auto& [canonical, aliases] : table_) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& alias : aliases) {
      if (alias != canonical) list.push_back(alias);
    }
    nations[canonical] = list;
  }
  return {{"schema", kSchema}, {"nations", nations}};
}

std::optional<std::string> NationAliases::canonicalize(std::string_view name) const {
  auto lookup = [&](std::string_view t) -> std::optional<std::string> {
    for (const auto& e : entries_) {
      if (e.case_sensitive ? t == e.alias : iequals(t, e.alias)) return e.canonical;
    }
    return std::nullopt;
  };
  std::string t = trim(name);
  if (auto hit = lookup(t)) return hit;
  // "France." / "China," ; "U.S." was already tried verbatim above
  while (!t.empty() && std::string_view(".,:;!?").find(t.back()) != std::string_view::npos) t.pop_back();
  if (auto hit = lookup(t)) return hit;
  if (starts_with_icase(t, "the ")) return canonicalize(std::string_view(t).substr(4));
  return std::nullopt;
}

std::string NationAliases::canonical_or_self(std::string_view name) const {
  if (auto c = canonicalize(name)) return *c;
  return trim(name);
}

std::vector<NationMention> NationAliases::find_mentions(std::string_view text) const {
  auto boundary = [&](std::size_t i) {
    return i >= text.size() || !std::isalnum(static_cast<unsigned char>(text[i]));
  };
  std::vector<NationMention> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (i > 0 && std::isalnum(static_cast<unsigned char>(text[i - 1]))) {
      ++i;
      continue;
    }
    const Entry* hit = nullptr;
    for (const auto& e : entries_) {
      if (e.alias.size() > text.size() - i) continue;
      std::string_view piece = text.substr(i, e.alias.size());
      bool eq = e.case_sensitive ? piece == e.alias : iequals(piece, e.alias);
      // aliases ending in '.' ("U.S.") carry their own boundary
      if (eq && (e.alias.back() == '.' || boundary(i + e.alias.size()))) {
        hit = &e;
        break;
      }
    }
    if (hit != nullptr) {
      out.push_back(NationMention{i, hit->alias.size(), hit->canonical});
      i += hit->alias.size();
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace unscbias
