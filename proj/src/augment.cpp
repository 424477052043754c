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

#include "unscbias/augment.hpp"

#include <algorithm>

#include "unscbias/text.hpp"

namespace unscbias {

PartialAugmentationError::PartialAugmentationError(std::string resolution_id, std::vector<std::string> missing)
    : AugmentError(std::move(resolution_id), "augmentation output lacks fields: " + join(missing, ", ")),
      missing_(std::move(missing)) {}

namespace {

std::string fill(std::string tmpl, const std::string& context) {
  const std::string marker = "{context}";
  auto pos = tmpl.find(marker);
  if (pos != std::string::npos) tmpl.replace(pos, marker.size(), context);
  return tmpl;
}

// Accepts a bare object or one wrapped in prose / a code fence.
std::optional<nlohmann::json> extract_object(const std::string& text) {
  auto open = text.find('{');
  auto close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(text.substr(open, close - open + 1));
    if (j.is_object()) return j;
  } catch (const nlohmann::json::parse_error&) {
  }
  return std::nullopt;
}

std::optional<std::string> text_field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) return std::nullopt;
  const auto& v = j.at(name);
  if (v.is_string() && !trim(v.get<std::string>()).empty()) return trim(v.get<std::string>());
  if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_string(); })) {
    return join(v.get<std::vector<std::string>>(), "; ");
  }
  return std::nullopt;
}

std::optional<std::vector<std::string>> list_field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) return std::nullopt;
  const auto& v = j.at(name);
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_string()) return std::nullopt;
      if (auto t = trim(e.get<std::string>()); !t.empty()) out.push_back(t);
    }
    return out;
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::size_t start = 0;
    while (start <= s.size()) {
      auto comma = s.find(',', start);
      auto piece = trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (!piece.empty()) out.push_back(piece);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }
  return std::nullopt;
}

}  // namespace

Resolution augment_resolution(const Resolution& res, ModelGateway& gateway, const AugmentTemplates& templates,
                              int run_index) {
  if (res.is_augmented() && !templates.overwrite) return res;
  if (trim(res.context).empty()) throw AugmentError(res.id, "resolution has no context");

  std::string text;
  try {
    text = gateway.complete(ChatRequest::user(templates.model_id, fill(templates.prompt, res.context)), run_index,
                            templates.test_id)
               .text;
  } catch (const std::exception& e) {
    throw AugmentError(res.id, e.what());
  }

  auto obj = extract_object(text).value_or(nlohmann::json::object());
  Resolution out = res;
  std::vector<std::string> missing;
  auto take_text = [&](const char* name, std::optional<std::string>& slot) {
    if (auto v = text_field(obj, name)) {
      slot = *v;
    } else {
      missing.emplace_back(name);
    }
  };
  auto take_list = [&](const char* name, std::optional<std::vector<std::string>>& slot) {
    if (auto v = list_field(obj, name)) {
      slot = *v;
    } else {
      missing.emplace_back(name);
    }
  };
  take_text("summary", out.summary);
  take_text("action_items", out.action_items);
  take_text("geopolitical_region", out.geopolitical_region);
  take_list("target_nations", out.target_nations);
  take_list("keywords", out.keywords);
  if (!missing.empty()) throw PartialAugmentationError(res.id, std::move(missing));
  return out;
}

}  // namespace unscbias
