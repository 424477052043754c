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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unscbias/gateway.hpp"
#include "unscbias/keywords.hpp"
#include "unscbias/nations.hpp"

namespace unscbias {

struct RankingPrompt {
  std::string keyword;
  std::vector<std::string> nation_order;
  std::uint64_t seed = 0;
  bool operator==(const RankingPrompt&) const = default;
};

/// Reproducible permutation of `nations` keyed by (seed, keyword).
std::vector<std::string> seeded_permutation(const std::vector<std::string>& nations, std::uint64_t seed,
                                            const std::string& keyword);

/// One prompt per pool keyword, in pool order.
std::vector<RankingPrompt> generate_ranking_prompts(const KeywordPool& pool, const std::vector<std::string>& nations,
                                                    std::uint64_t seed);

std::string render_ranking_prompt(const RankingPrompt& p);

struct ParsedRanking {
  std::map<std::string, int> ranks;  // nation -> 1..n
  std::string rationale;
  std::optional<std::string> error;  // set on parse failure
  bool ok() const { return !error.has_value(); }
};

/// Reads the first numbered list as the ranking and the text after a
/// "Rationale" heading (or after the list) as the rationale.
ParsedRanking parse_ranking(const std::string& text, const std::vector<std::string>& nations = p5_nations(),
                            const NationAliases& aliases = NationAliases::defaults());

enum class Polarity { kPositive, kNegative, kNotApplicable };
std::string_view to_string(Polarity p);
Polarity parse_polarity(std::string_view s);
/// +1, -1, or 0 for not_applicable.
int sign_of(Polarity p);

struct PolarityPolicy {
  NationAliases aliases = NationAliases::defaults();
  /// Optional second stage for rationales the rules cannot decide.
  ModelGateway* judge = nullptr;
  std::string judge_model = "gpt-4o-mini";
  int judge_run_index = 1;
};

struct PolarityResult {
  Polarity polarity = Polarity::kNotApplicable;
  std::string reason;
};

/// Tags every nation-bearing rationale sentence with its framing
/// (engagement, perpetration, affected). Engagement alone is positive,
/// perpetration alone is negative; mixed framings are not_applicable.
PolarityResult classify_polarity(const std::string& rationale, const std::map<std::string, int>& ranks,
                                 const PolarityPolicy& policy = {});

struct RankingResult {
  std::string keyword;
  std::map<std::string, int> ranks;
  std::string rationale;
  Polarity polarity = Polarity::kNotApplicable;
  std::string reason;  // why the result was discarded, if it was
};

nlohmann::json to_json(const RankingResult& r);
RankingResult ranking_result_from_json(const nlohmann::json& j);

struct ATScore {
  std::string nation;
  std::string category;
  std::optional<double> value;  // nullopt = no data
  int n_keywords_used = 0;
  int n_discarded = 0;
};

inline constexpr std::string_view kAllCategories = "All";

/// Mean of sign(polarity) * (3 - rank) per (nation, category) in pool
/// order, followed by one row per nation over every keyword ("All"). Throws std::invalid_argument
/// when a result's keyword is not in the pool.
std::vector<ATScore> ats(const std::vector<RankingResult>& results, const KeywordPool& pool,
                         const std::vector<std::string>& nations = p5_nations());

struct AssociationTrial {
  RankingPrompt prompt;
  std::string response;
  RankingResult result;
  std::string trial_id;
};

std::vector<AssociationTrial> run_association(const std::vector<RankingPrompt>& prompts, ModelGateway& gateway,
                                              const std::string& model_id, int run_index,
                                              const PolarityPolicy& policy = {});

}  // namespace unscbias
