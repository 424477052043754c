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

#include "unscbias/keywords.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "unscbias/text.hpp"

namespace unscbias {

KeywordPool::KeywordPool(std::vector<Category> categories) : categories_(std::move(categories)) {
  std::set<std::string> names;
  std::set<std::string> words;
  for (const auto& c : categories_) {
    if (!names.insert(c.name).second) throw std::invalid_argument("duplicate keyword category '" + c.name + "'");
    for (const auto& k : c.keywords) {
      if (!words.insert(k).second) throw std::invalid_argument("keyword '" + k + "' appears more than once");
    }
  }
}

KeywordPool KeywordPool::defaults() {
  return KeywordPool({
      {"Human Rights",
       {"human rights", "sexual violence", "humanitarian assistance", "international human rights law",
        "sexual exploitation", "child protection", "protect civilians", "human trafficking", "displaced persons",
        "international refugee"}},
      {"Armament",
       {"arms embargo", "light weapons", "disarmament demobilization", "chemical weapons", "ammunition management",
        "ballistic missile", "nuclear weapons"}},
      {"International Law",
       {"international law", "war crimes", "international criminal court", "international refugee law"}},
      {"Terror",
       {"terrorist groups", "organized crime", "violent extremism", "counter terrorism", "terrorist attacks"}},
      {"International Peace and Cooperation",
       {"armed conflict", "international peace", "peace agreement", "revitalised agreement",
        "national reconciliation process", "post conflict situations", "united nations peacekeeping operations",
        "united nations multidimensional integrated stabilization mission",
        "sovereignty independence territorial integrity", "stabilization mission", "political independence",
        "information sharing"}},
      {"International Crimes",
       {"drug trafficking", "criminal networks", "armed robbery", "illicit transfer", "money laundering",
        "suspected pirates"}},
      {"Sustainability Issues", {"climate change", "food insecurity", "ebola outbreak", "natural resources"}},
  });
}

KeywordPool KeywordPool::from_json(const nlohmann::json& doc) {
  if (doc.contains("schema") && doc.at("schema").get<std::string>() != kSchema) {
    throw std::runtime_error("keyword pool: unsupported schema '" + doc.at("schema").get<std::string>() + "'");
  }
  std::vector<Category> cats;
  for (const auto& c : doc.at("categories")) {
    cats.push_back(Category{c.at("name").get<std::string>(), c.at("keywords").get<std::vector<std::string>>()});
  }
  return KeywordPool(std::move(cats));
}

KeywordPool KeywordPool::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read keyword pool: " + path.string());
  return from_json(nlohmann::json::parse(in));
}

nlohmann::json KeywordPool::to_json() const {
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& c : categories_) cats.push_back({{"name", c.name}, {"keywords", c.keywords}});
  return {{"schema", kSchema}, {"categories", cats}};
}

std::size_t KeywordPool::keyword_count() const {
  std::size_t n = 0;
  for (const auto& c : categories_) n += c.keywords.size();
  return n;
}

std::vector<std::string> KeywordPool::all_keywords() const {
  std::vector<std::string> out;
  for (const auto& c : categories_) out.insert(out.end(), c.keywords.begin(), c.keywords.end());
  return out;
}

std::optional<std::string> KeywordPool::category_of(std::string_view keyword) const {
  for (const auto& c : categories_) {
    if (std::find(c.keywords.begin(), c.keywords.end(), keyword) != c.keywords.end()) return c.name;
  }
  return std::nullopt;
}

std::string KeywordPool::digest() const { return sha256_hex(to_json().dump()); }

namespace {

bool contains_phrase(const std::vector<std::string>& words, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > words.size()) return false;
  return std::search(words.begin(), words.end(), phrase.begin(), phrase.end()) != words.end();
}

}  // namespace

std::vector<KeywordCandidate> prune_prefixes(const std::vector<KeywordCandidate>& candidates) {
  std::map<std::string, std::size_t> frequent;
  for (const auto& c : candidates) frequent[c.text] = c.count;
  std::vector<KeywordCandidate> out;
  for (const auto& [gram, n] : frequent) {
    // Any extension of `gram` sorts right after it in the ordered map.
    bool dominated = false;
    std::string probe = gram + ' ';
    for (auto it = frequent.lower_bound(probe); it != frequent.end() && it->first.starts_with(probe); ++it) {
      if (it->second > n) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(KeywordCandidate{gram, n});
  }
  std::sort(out.begin(), out.end(), [](const KeywordCandidate& a, const KeywordCandidate& b) {
    return a.count != b.count ? a.count > b.count : a.text < b.text;
  });
  return out;
}

std::vector<KeywordCandidate> build_keyword_candidates(const std::vector<std::string>& texts,
                                                       const CandidateOptions& opts) {
  if (opts.min_words < 2) throw std::invalid_argument("min_words must be at least 2");
  if (opts.min_count < 1) throw std::invalid_argument("min_count must be at least 1");
  std::size_t max_words = std::max(opts.max_words, opts.min_words);

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& text : texts) {
    auto words = word_tokens(text);
    for (std::size_t i = 0; i < words.size(); ++i) {
      std::string gram = words[i];
      for (std::size_t n = 2; n <= max_words && i + n <= words.size(); ++n) {
        gram += ' ';
        gram += words[i + n - 1];
        if (n >= opts.min_words) ++counts[gram];
      }
    }
  }

  std::vector<std::vector<std::string>> stop;
  for (const auto& s : opts.entity_stoplist) stop.push_back(word_tokens(s));

  std::map<std::string, std::size_t> frequent;
  for (auto& [gram, n] : counts) {
    if (n < opts.min_count) continue;
    auto words = word_tokens(gram);
    bool stopped = std::any_of(stop.begin(), stop.end(), [&](const auto& p) { return contains_phrase(words, p); });
    if (!stopped) frequent.emplace(gram, n);
  }

  std::vector<KeywordCandidate> cands;
  for (const auto& [gram, n] : frequent) cands.push_back(KeywordCandidate{gram, n});
  return prune_prefixes(cands);
}

std::vector<KeywordCandidate> build_keyword_candidates(const Corpus& corpus, const CandidateOptions& opts) {
  std::vector<std::string> texts;
  for (const Resolution* r : corpus.all()) texts.push_back(r->context);
  return build_keyword_candidates(texts, opts);
}

CategoryAssignmentResult assign_categories(const std::vector<KeywordCandidate>& candidates,
                                           const nlohmann::json& assignment) {
  std::set<std::string> available;
  for (const auto& c : candidates) available.insert(c.text);
  std::set<std::string> used;
  CategoryAssignmentResult result;
  std::vector<KeywordPool::Category> cats;
  for (const auto& [name, words] : assignment.at("categories").items()) {
    KeywordPool::Category cat{name, {}};
    for (const auto& w : words) {
      auto kw = to_lower(trim(w.get<std::string>()));
      if (!available.count(kw)) {
        result.missing.push_back(kw);
        continue;
      }
      if (used.insert(kw).second) cat.keywords.push_back(kw);
    }
    cats.push_back(std::move(cat));
  }
  for (const auto& c : candidates) {
    if (!used.count(c.text)) result.unassigned.push_back(c.text);
  }
  result.pool = KeywordPool(std::move(cats));
  return result;
}

}  // namespace unscbias
