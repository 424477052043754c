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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "unscbias/corpus.hpp"

namespace unscbias {

/// Thematic keyword categories used by the association test. Category order
/// is preserved; keywords are unique across the whole pool.
class KeywordPool {
 public:
  static constexpr std::string_view kSchema = "unscbias/keyword-pool@1";

  struct Category {
    std::string name;
    std::vector<std::string> keywords;
    bool operator==(const Category&) const = default;
  };

  KeywordPool() = default;
  /// Throws std::invalid_argument on duplicate category names or keywords.
  explicit KeywordPool(std::vector<Category> categories);

  /// The shipped UNSC domain pool (seven categories).
  static KeywordPool defaults();
  static KeywordPool from_json(const nlohmann::json& doc);
  static KeywordPool load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<Category>& categories() const { return categories_; }
  std::size_t keyword_count() const;
  bool empty() const { return keyword_count() == 0; }

  /// Keywords in category order, then listed order.
  std::vector<std::string> all_keywords() const;
  std::optional<std::string> category_of(std::string_view keyword) const;

  std::string digest() const;

  bool operator==(const KeywordPool& o) const { return categories_ == o.categories_; }

 private:
  std::vector<Category> categories_;
};

struct KeywordCandidate {
  std::string text;
  std::size_t count = 0;
  bool operator==(const KeywordCandidate&) const = default;
};

struct CandidateOptions {
  std::size_t min_count = 200;
  std::size_t min_words = 2;
  /// Longest n-gram counted; the prefix rule only ever compares n-grams up
  /// to this length.
  std::size_t max_words = 6;
  /// Candidates containing any of these phrases (word-sequence match) are
  /// dropped, e.g. uniquely identifiable entities.
  std::vector<std::string> entity_stoplist = {"member states", "united nations"};
};

/// Drops each candidate that is a word-sequence prefix of a strictly more
/// frequent candidate; sorts by descending count, then text.
std::vector<KeywordCandidate> prune_prefixes(const std::vector<KeywordCandidate>& candidates);

/// Frequent word n-grams over every resolution context (both pools).
/// A candidate is dropped when it is a word-sequence prefix of a strictly
/// more frequent candidate. Sorted by descending count, then text.
std::vector<KeywordCandidate> build_keyword_candidates(const Corpus& corpus, const CandidateOptions& opts);
std::vector<KeywordCandidate> build_keyword_candidates(const std::vector<std::string>& texts,
                                                       const CandidateOptions& opts);

/// Groups candidates into categories using a category-assignment document:
/// {"schema": ..., "categories": {"Armament": ["arms embargo", ...]}}.
/// Candidates not named in the assignment are returned in `unassigned`.
struct CategoryAssignmentResult {
  KeywordPool pool;
  std::vector<std::string> unassigned;
  std::vector<std::string> missing;  // assigned but not among the candidates
};
CategoryAssignmentResult assign_categories(const std::vector<KeywordCandidate>& candidates,
                                           const nlohmann::json& assignment);

}  // namespace unscbias
