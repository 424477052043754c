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

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "unscbias/nations.hpp"

namespace unscbias {

enum class VoteChoice { kFavour = 0, kAgainst = 1, kAbstention = 2 };

inline constexpr std::array<VoteChoice, 3> kVoteChoices = {VoteChoice::kFavour, VoteChoice::kAgainst,
                                                           VoteChoice::kAbstention};

std::string_view to_string(VoteChoice v);

/// Strict ingestion parse: exactly "favour", "against" or "abstention".
std::optional<VoteChoice> parse_vote_token(std::string_view token);

enum class AdoptionStatus { kAdopted, kNonAdopted };

std::string_view to_string(AdoptionStatus s);
std::optional<AdoptionStatus> parse_status(std::string_view token);

/// ISO "YYYY-MM-DD" parse; nullopt unless it names a real calendar date.
std::optional<std::chrono::year_month_day> parse_date(std::string_view text);

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A single record could not be decoded; names the offending field.
class RecordError : public CorpusError {
 public:
  RecordError(std::string field, const std::string& what) : CorpusError(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// One UNSC draft resolution record. Dates and vote tokens are kept as the
/// file spells them; `parsed_date()` and `vote_of()` give the validated view.
struct Resolution {
  std::string id;
  std::string date;
  AdoptionStatus status = AdoptionStatus::kNonAdopted;
  std::map<std::string, std::string> votes;  // nation -> vote token
  std::string context;
  std::map<std::string, std::string> speeches;  // nation -> statement

  // Derived by augmentation.
  std::optional<std::string> summary;
  std::optional<std::string> action_items;
  std::optional<std::string> geopolitical_region;
  std::optional<std::vector<std::string>> target_nations;
  std::optional<std::vector<std::string>> keywords;

  std::optional<std::chrono::year_month_day> parsed_date() const { return parse_date(date); }
  std::optional<VoteChoice> vote_of(std::string_view nation) const;
  std::optional<std::string> speech_of(std::string_view nation) const;
  bool is_augmented() const;

  bool operator==(const Resolution&) const = default;
};

nlohmann::json to_json(const Resolution& r);
/// Throws RecordError when a required field is missing or mistyped.
Resolution resolution_from_json(const nlohmann::json& j);

struct Violation {
  std::string resolution_id;  // empty when the record had no usable id
  std::string field;
  std::string rule;
  std::size_t line = 0;  // 1-based line in the source file, 0 when not file-backed

  std::string describe() const;
  bool operator==(const Violation&) const = default;
};

/// Empty iff every Resolution invariant holds.
std::vector<Violation> validate_resolution(const Resolution& res);

enum class Pool { kAdopted, kNonAdopted };

/// Immutable after construction; safe to share read-only.
class Corpus {
 public:
  Corpus() = default;
  /// Throws CorpusError on duplicate ids.
  Corpus(std::vector<Resolution> adopted, std::vector<Resolution> non_adopted);

  const std::vector<Resolution>& adopted() const { return adopted_; }
  const std::vector<Resolution>& non_adopted() const { return non_adopted_; }
  const std::vector<Resolution>& pool(Pool p) const { return p == Pool::kAdopted ? adopted_ : non_adopted_; }
  const std::vector<std::string>& p5() const { return p5_nations(); }

  const Resolution* find(std::string_view id) const;
  std::optional<Pool> pool_of(std::string_view id) const;
  std::size_t size() const { return adopted_.size() + non_adopted_.size(); }
  bool empty() const { return size() == 0; }

  /// Records in file order: adopted first, then non-adopted.
  std::vector<const Resolution*> all() const;

  bool operator==(const Corpus& o) const { return adopted_ == o.adopted_ && non_adopted_ == o.non_adopted_; }

 private:
  void reindex();

  std::vector<Resolution> adopted_;
  std::vector<Resolution> non_adopted_;
  std::map<std::string, std::pair<Pool, std::size_t>, std::less<>> index_;
};

struct CorpusLoadResult {
  Corpus corpus;
  std::vector<Violation> violations;
  std::size_t records_read = 0;

  bool ok() const { return violations.empty(); }
};

inline constexpr std::string_view kCorpusSchema = "unscbias/corpus@1";

/// Reads a line-delimited corpus file. Every record is either loaded or
/// reported as a violation; malformed, invalid and duplicate records are
/// reported and skipped. Nation names in votes and speeches are
/// canonicalized through `aliases`. Throws CorpusError when the file cannot
/// be read or carries an unknown schema header.
CorpusLoadResult load_corpus(const std::filesystem::path& path,
                             const NationAliases& aliases = NationAliases::defaults());
CorpusLoadResult parse_corpus(std::istream& in, const NationAliases& aliases = NationAliases::defaults());

/// Writes the header line followed by adopted then non-adopted records.
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);

/// SHA-256 over the canonical serialization; used in run manifests.
std::string corpus_digest(const Corpus& corpus);

}  // namespace unscbias
