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

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unscbias/corpus.hpp"
#include "unscbias/gateway.hpp"
#include "unscbias/votesim.hpp"

namespace unscbias {

struct RetrieverConfig {
  int k = 1;
  double threshold = 3.0;
  double region_weight = 2.0;
  double nation_weight = 1.0;
  double keyword_weight = 0.1;
  std::vector<std::string> excluded_nations = {"Member States", "United Nations"};
  std::vector<std::string> excluded_general_keywords;

  void validate() const;
  static RetrieverConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// The three keyword fields the retriever compares.
struct KeywordSet {
  std::string region;
  std::vector<std::string> target_nations;
  std::vector<std::string> keywords;

  /// Throws std::invalid_argument naming the id when a field is missing.
  static KeywordSet of(const Resolution& r);
};

/// region_weight * [same region] + nation_weight * |common nations| +
/// keyword_weight * |common keywords|, exclusions applied. Comparison is
/// case-insensitive on trimmed text.
double score_candidate(const KeywordSet& target, const KeywordSet& candidate, const RetrieverConfig& cfg = {});
double score_candidate(const Resolution& target, const Resolution& candidate, const RetrieverConfig& cfg = {});

struct RetrievalHit {
  const Resolution* resolution = nullptr;
  Pool pool = Pool::kAdopted;
  double score = 0.0;
};

/// Top-k of `pool` with score > threshold and date < target date, by score
/// descending, then most recent date, then id. Candidates without keyword
/// fields are skipped.
std::vector<RetrievalHit> retrieve(const Resolution& target, const std::vector<Resolution>& pool, Pool pool_kind,
                                   const RetrieverConfig& cfg = {});

/// Union sorted by ascending date, ties by id.
std::vector<RetrievalHit> merge_rehearsal_list(const std::vector<RetrievalHit>& adopted_hits,
                                               const std::vector<RetrievalHit>& non_adopted_hits);

struct RehearsalOutcome {
  bool adopted_true = false;
  std::optional<VoteChoice> vote;  // set iff !adopted_true

  static RehearsalOutcome adopted() { return {true, std::nullopt}; }
  static RehearsalOutcome of(VoteChoice v) { return {false, v}; }
  std::string render() const;
};

struct RehearsalRecord {
  std::string resolution_id;
  std::string summary;
  std::string action_items;
  std::optional<VoteChoice> predicted;  // nullopt = unparseable rehearsal vote
  RehearsalOutcome outcome;
  std::string reflection;
};

struct RehearsalHistory {
  std::vector<RehearsalRecord> records;
  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
};

/// The "previous vote prediction" section; empty for an empty history.
std::string render_history_block(const RehearsalHistory& history, const std::string& nation);

struct CallOptions {
  std::string model_id = "gpt-4o-mini";
  int run_index = 1;
};

struct ModelStep {
  std::string prompt;
  std::string response;
  std::string trial_id;
};

struct RehearsalVote {
  std::optional<VoteChoice> predicted;
  ModelStep step;
};

RehearsalVote rehearse(const Resolution& res, const std::string& nation, const RehearsalHistory& history,
                       ModelGateway& gateway, const CallOptions& opts = {});

std::string render_reflection_prompt(const RehearsalRecord& record, const std::optional<std::string>& speech,
                                     const std::string& nation);

/// Returns the reflection text verbatim.
ModelStep reflect(const RehearsalRecord& record, const std::optional<std::string>& speech, const std::string& nation,
                  ModelGateway& gateway, const CallOptions& opts = {});

struct AuditEvent {
  std::string step;
  nlohmann::json detail;
};

struct AuditTrail {
  std::vector<AuditEvent> events;
  void add(std::string step, nlohmann::json detail) { events.push_back({std::move(step), std::move(detail)}); }
  nlohmann::json to_json() const;
};

enum class PipelineStatus { kVote, kUnparseable, kAborted };
std::string_view to_string(PipelineStatus s);

struct PipelineResult {
  std::string resolution_id;
  std::string nation;
  PipelineStatus status = PipelineStatus::kAborted;
  std::optional<VoteChoice> final_vote;
  std::string abort_reason;
  RehearsalHistory history;
  AuditTrail audit;
  std::string final_response;
  std::string final_trial_id;
};

struct PipelineOptions : CallOptions {
  bool reflection = true;
};

/// Retrieval on both pools, rehearsal and reflection per precedent in date
/// order, then the history-augmented final vote. Gateway failures end in an
/// audited abort instead of an exception. Throws std::invalid_argument when
/// the target is not a non-adopted, augmented member of `corpus`.
PipelineResult run_pipeline(const Resolution& target, const std::string& nation, const Corpus& corpus,
                            ModelGateway& gateway, const RetrieverConfig& cfg = {}, const PipelineOptions& opts = {});

/// Converts a pipeline result into the vote-simulation record shape.
SimVote to_sim_vote(const PipelineResult& r, int run_index);

}  // namespace unscbias
