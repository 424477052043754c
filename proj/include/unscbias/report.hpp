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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unscbias/association.hpp"
#include "unscbias/corpus.hpp"
#include "unscbias/directqa.hpp"
#include "unscbias/keywords.hpp"
#include "unscbias/votesim.hpp"

namespace unscbias {

nlohmann::json to_json(const DirectQATrial& t);
DirectQATrial directqa_trial_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AssociationTrial& t);
AssociationTrial association_trial_from_json(const nlohmann::json& j);

/// Completed trials keyed by run index, one map per test.
struct ResultsStore {
  std::map<int, std::vector<DirectQATrial>> directqa;
  std::map<int, std::vector<AssociationTrial>> assoc;
  std::map<int, std::vector<SimVote>> votesim;
  std::map<int, std::vector<SimVote>> debias;

  bool empty() const { return directqa.empty() && assoc.empty() && votesim.empty() && debias.empty(); }

  /// One file per (test, run): <dir>/<test>-r<k>.json.
  void save(const std::filesystem::path& dir) const;
  /// Reads whatever result files exist; a missing directory is an empty store.
  static ResultsStore load(const std::filesystem::path& dir);
};

inline constexpr std::string_view kResultsSchema = "unscbias/results@1";

struct ReportInputs {
  const Corpus* corpus = nullptr;     // ground truth for vote tables
  const KeywordPool* pool = nullptr;  // categories for association scores
  std::vector<std::string> nations = p5_nations();
};

/// Files by name plus the combined summary. Contains no timestamps, so the
/// same store always yields the same bytes.
struct ReportBundle {
  std::map<std::string, std::string> files;
  nlohmann::json summary;
  std::vector<std::string> gaps;

  void write(const std::filesystem::path& dir) const;
};

/// Tables for every test with data; absent or incomplete tests are listed
/// in `gaps` rather than failing the whole bundle.
ReportBundle emit_reports(const ResultsStore& store, const ReportInputs& inputs);

/// Per-nation WF1 from pooled votes of all runs; nations without votes are
/// omitted.
std::map<std::string, double> pooled_wf1(const std::map<int, std::vector<SimVote>>& runs, const Corpus& corpus,
                                         const std::vector<std::string>& nations);

}  // namespace unscbias
