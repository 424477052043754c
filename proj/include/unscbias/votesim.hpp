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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unscbias/corpus.hpp"
#include "unscbias/gateway.hpp"

namespace unscbias {

/// Vote prompt without the non-adopted precondition; rehearsals use it on
/// adopted resolutions too. `history_block` is inserted before the context
/// when non-empty.
std::string render_vote_prompt(const std::string& resolution_id, const std::string& context,
                               const std::string& nation, const std::string& history_block = "");

/// Throws std::invalid_argument for an adopted resolution, a persona outside
/// the P5 or an empty context.
std::string render_persona_prompt(const Resolution& res, const std::string& nation,
                                  const std::string& history_block = "");

/// Lowercase phrase -> vote. Multi-word phrases are allowed ("in favour").
using VoteSynonyms = std::map<std::string, VoteChoice>;
const VoteSynonyms& default_vote_synonyms();

/// The last labelled "Vote:" declaration wins; failing that the last
/// "vote (in) <choice>" phrase; failing that a reply naming exactly one
/// distinct choice. nullopt means unparseable.
std::optional<VoteChoice> parse_vote(const std::string& text, const VoteSynonyms& synonyms = default_vote_synonyms());

struct SimVote {
  std::string resolution_id;
  std::string nation;
  std::optional<VoteChoice> predicted;  // nullopt = unparseable
  int run_index = 1;
  std::string response;
  std::string trial_id;
};

nlohmann::json to_json(const SimVote& v);
SimVote sim_vote_from_json(const nlohmann::json& j);

struct SimulationAudit {
  std::string resolution_id;
  std::string nation;
  std::string note;
};

struct SimulationResult {
  std::vector<SimVote> votes;
  std::vector<SimulationAudit> failed;   // gateway errors
  std::vector<SimulationAudit> skipped;  // no recorded vote to compare against
};

/// One trial per (non-adopted resolution, persona).
SimulationResult simulate(const Corpus& corpus, const std::vector<std::string>& personas, ModelGateway& gateway,
                          const std::string& model_id, int run_index);

struct VoteDistribution {
  std::array<int, 3> counts{};  // indexed by VoteChoice
  int total = 0;
  std::array<double, 3> frequencies{};
  int unparseable = 0;

  int count(VoteChoice c) const { return counts[static_cast<int>(c)]; }
  double frequency(VoteChoice c) const { return frequencies[static_cast<int>(c)]; }
};

VoteDistribution distribution(const std::vector<std::optional<VoteChoice>>& votes);
VoteDistribution distribution(const std::vector<SimVote>& votes);

/// `nation`'s recorded votes across the non-adopted pool.
std::vector<std::optional<VoteChoice>> ground_truth_votes(const Corpus& corpus, const std::string& nation);

/// sim.frequency(c) - truth.frequency(c); throws on a zero total.
std::array<double, 3> distribution_delta(const VoteDistribution& sim, const VoteDistribution& truth);

struct ConfusionMatrix {
  std::array<std::array<int, 3>, 3> cells{};  // [truth][predicted]
  int unparseable_count = 0;

  int& at(VoteChoice truth, VoteChoice predicted) {
    return cells[static_cast<int>(truth)][static_cast<int>(predicted)];
  }
  int at(VoteChoice truth, VoteChoice predicted) const {
    return cells[static_cast<int>(truth)][static_cast<int>(predicted)];
  }
  int truth_count(VoteChoice c) const;
  int predicted_count(VoteChoice c) const;
  int total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
};

class MissingGroundTruth : public std::runtime_error {
 public:
  explicit MissingGroundTruth(const std::string& resolution_id, const std::string& nation)
      : std::runtime_error("no recorded vote of " + nation + " on " + resolution_id) {}
};

/// Unparseable predictions are counted outside the grid.
ConfusionMatrix confusion(const std::vector<SimVote>& sim, const Corpus& corpus);

/// Sum over classes of (N_c / N) * F1_c; F1_c is 0 when precision + recall is 0. Throws on an empty matrix.
double weighted_f1(const ConfusionMatrix& m);

}  // namespace unscbias
