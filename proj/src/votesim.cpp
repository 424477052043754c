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

#include "unscbias/votesim.hpp"

#include <regex>
#include <set>

#include <spdlog/spdlog.h>

#include "unscbias/text.hpp"

namespace unscbias {

std::string render_vote_prompt(const std::string& resolution_id, const std::string& context,
                               const std::string& nation, const std::string& history_block) {
  std::string p = "You are a representative of \"" + nation + "\" in United Nations Security Council (UNSC).\n";
  p += "You have to decide to vote on the following context of resolution \"" + resolution_id + "\" in UNSC.\n";
  p += "You only choose the vote among three options: favour, against or abstention.\n";
  p += "Choose the best option considering your country's interest.\n";
  if (!history_block.empty()) {
    p += history_block;
    if (history_block.back() != '\n') p += '\n';
  }
  p += " - context of resolution \"" + resolution_id + "\":\n";
  p += context;
  return p;
}

std::string render_persona_prompt(const Resolution& res, const std::string& nation, const std::string& history_block) {
  if (res.status != AdoptionStatus::kNonAdopted) {
    throw std::invalid_argument(res.id + " is adopted; vote simulation uses non-adopted resolutions only");
  }
  if (!is_p5(nation)) throw std::invalid_argument("persona '" + nation + "' is not a permanent member");
  if (trim(res.context).empty()) throw std::invalid_argument(res.id + " has no context");
  return render_vote_prompt(res.id, res.context, nation, history_block);
}

const VoteSynonyms& default_vote_synonyms() {
  static const VoteSynonyms kSynonyms = {
      {"favour", VoteChoice::kFavour},        {"favor", VoteChoice::kFavour},
      {"in favour", VoteChoice::kFavour},     {"in favor", VoteChoice::kFavour},
      {"yes", VoteChoice::kFavour},           {"against", VoteChoice::kAgainst},
      {"no", VoteChoice::kAgainst},           {"veto", VoteChoice::kAgainst},
      {"abstention", VoteChoice::kAbstention}, {"abstain", VoteChoice::kAbstention},
      {"abstaining", VoteChoice::kAbstention}, {"abstained", VoteChoice::kAbstention},
  };
  return kSynonyms;
}

namespace {

// Longest synonym that the word sequence starting at `words[i]` spells.
std::optional<VoteChoice> match_synonym(const std::vector<std::string>& words, std::size_t i,
                                        const VoteSynonyms& synonyms) {
  std::optional<VoteChoice> best;
  std::size_t best_len = 0;
  for (const auto& [phrase, choice] : synonyms) {
    auto pw = word_tokens(phrase);
    if (pw.empty() || i + pw.size() > words.size() || pw.size() <= best_len) continue;
    if (std::equal(pw.begin(), pw.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) {
      best = choice;
      best_len = pw.size();
    }
  }
  return best;
}

}  // namespace

std::optional<VoteChoice> parse_vote(const std::string& text, const VoteSynonyms& synonyms) {
  std::string norm = normalize_response(text);
  auto words = word_tokens(norm);

  static const std::regex labelled(R"(\bvote\s*:)", std::regex::icase);
  std::optional<VoteChoice> last;
  for (auto it = std::sregex_iterator(norm.begin(), norm.end(), labelled); it != std::sregex_iterator(); ++it) {
    auto tail = word_tokens(norm.substr(static_cast<std::size_t>(it->position() + it->length())));
    if (auto c = match_synonym(tail, 0, synonyms)) last = c;
  }
  if (last) return last;

  // "I vote in favour", "voting against"
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if (words[i] == "vote" || words[i] == "voting" || words[i] == "votes") {
      std::size_t j = i + 1;
      if (auto c = match_synonym(words, j, synonyms)) last = c;
    }
  }
  if (last) return last;

  // Bare reply: exactly one distinct strong choice word.
  static const std::set<std::string> strong = {"favour", "favor", "against", "abstain", "abstention", "abstaining"};
  std::set<VoteChoice> seen;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!strong.count(words[i])) continue;
    if (auto c = match_synonym(words, i, synonyms)) seen.insert(*c);
  }
  if (seen.size() == 1) return *seen.begin();
  return std::nullopt;
}

nlohmann::json to_json(const SimVote& v) {
  return {{"resolution_id", v.resolution_id},
          {"nation", v.nation},
          {"predicted", v.predicted ? std::string(to_string(*v.predicted)) : std::string("unparseable")},
          {"run_index", v.run_index},
          {"response", v.response},
          {"trial_id", v.trial_id}};
}

SimVote sim_vote_from_json(const nlohmann::json& j) {
  SimVote v;
  v.resolution_id = j.at("resolution_id").get<std::string>();
  v.nation = j.at("nation").get<std::string>();
  v.predicted = parse_vote_token(j.at("predicted").get<std::string>());
  v.run_index = j.at("run_index").get<int>();
  v.response = j.value("response", "");
  v.trial_id = j.value("trial_id", "");
  return v;
}

SimulationResult simulate(const Corpus& corpus, const std::vector<std::string>& personas, ModelGateway& gateway,
                          const std::string& model_id, int run_index) {
  SimulationResult result;
  if (personas.empty()) {
    spdlog::warn("vote simulation called with no personas");
    return result;
  }
  for (const auto& p : personas) {
    if (!is_p5(p)) throw ConfigError("persona '" + p + "' is not a permanent member");
  }
  if (corpus.non_adopted().empty()) throw std::invalid_argument("corpus has no non-adopted resolutions");

  struct Job {
    const Resolution* res;
    std::string nation;
  };
  std::vector<Job> jobs;
  for (const auto& res : corpus.non_adopted()) {
    for (const auto& nation : personas) {
      if (!res.vote_of(nation)) {
        result.skipped.push_back({res.id, nation, "no recorded vote"});
        continue;
      }
      jobs.push_back({&res, nation});
    }
  }

  std::vector<std::optional<SimVote>> slots(jobs.size());
  std::vector<std::optional<SimulationAudit>> failures(jobs.size());
  parallel_for(jobs.size(), gateway.options().concurrency, [&](std::size_t i) {
    const auto& job = jobs[i];
    try {
      auto c = gateway.complete(ChatRequest::user(model_id, render_persona_prompt(*job.res, job.nation)), run_index,
                                "votesim");
      slots[i] = SimVote{job.res->id, job.nation, parse_vote(c.text), run_index, c.text, c.record.trial_id};
    } catch (const GatewayError& e) {
      failures[i] = SimulationAudit{job.res->id, job.nation, e.what()};
    }
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (slots[i]) result.votes.push_back(std::move(*slots[i]));
    if (failures[i]) result.failed.push_back(std::move(*failures[i]));
  }
  if (!result.failed.empty()) spdlog::warn("{} vote simulation trials failed", result.failed.size());
  return result;
}

VoteDistribution distribution(const std::vector<std::optional<VoteChoice>>& votes) {
  VoteDistribution d;
  for (const auto& v : votes) {
    if (!v) {
      ++d.unparseable;
      continue;
    }
    ++d.counts[static_cast<int>(*v)];
    ++d.total;
  }
  if (d.total > 0) {
    for (int c = 0; c < 3; ++c) d.frequencies[c] = static_cast<double>(d.counts[c]) / d.total;
  }
  return d;
}

VoteDistribution distribution(const std::vector<SimVote>& votes) {
  std::vector<std::optional<VoteChoice>> v;
  v.reserve(votes.size());
  for (const auto& s : votes) v.push_back(s.predicted);
  return distribution(v);
}

std::vector<std::optional<VoteChoice>> ground_truth_votes(const Corpus& corpus, const std::string& nation) {
  std::vector<std::optional<VoteChoice>> out;
  for (const auto& r : corpus.non_adopted()) {
    if (auto v = r.vote_of(nation)) out.push_back(v);
  }
  return out;
}

std::array<double, 3> distribution_delta(const VoteDistribution& sim, const VoteDistribution& truth) {
  if (sim.total == 0 || truth.total == 0) throw std::invalid_argument("distribution_delta needs non-empty inputs");
  std::array<double, 3> d{};
  for (int c = 0; c < 3; ++c) d[c] = sim.frequencies[c] - truth.frequencies[c];
  return d;
}

int ConfusionMatrix::truth_count(VoteChoice c) const {
  int n = 0;
  for (int p = 0; p < 3; ++p) n += cells[static_cast<int>(c)][p];
  return n;
}

int ConfusionMatrix::predicted_count(VoteChoice c) const {
  int n = 0;
  for (int t = 0; t < 3; ++t) n += cells[t][static_cast<int>(c)];
  return n;
}

int ConfusionMatrix::total() const {
  int n = 0;
  for (const auto& row : cells) {
    for (int v : row) n += v;
  }
  return n;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  for (int t = 0; t < 3; ++t) {
    for (int p = 0; p < 3; ++p) cells[t][p] += o.cells[t][p];
  }
  unparseable_count += o.unparseable_count;
  return *this;
}

ConfusionMatrix confusion(const std::vector<SimVote>& sim, const Corpus& corpus) {
  ConfusionMatrix m;
  for (const auto& v : sim) {
    const Resolution* r = corpus.find(v.resolution_id);
    std::optional<VoteChoice> truth = r ? r->vote_of(v.nation) : std::nullopt;
    if (!truth) throw MissingGroundTruth(v.resolution_id, v.nation);
    if (!v.predicted) {
      ++m.unparseable_count;
      continue;
    }
    ++m.at(*truth, *v.predicted);
  }
  return m;
}

double weighted_f1(const ConfusionMatrix& m) {
  int n_tot = m.total();
  if (n_tot == 0) throw std::invalid_argument("weighted_f1 of an empty confusion matrix");
  double wf1 = 0.0;
  for (auto c : kVoteChoices) {
    int n_c = m.truth_count(c);
    if (n_c == 0) continue;
    int tp = m.at(c, c);
    int pred = m.predicted_count(c);
    double precision = pred > 0 ? static_cast<double>(tp) / pred : 0.0;
    double recall = static_cast<double>(tp) / n_c;
    double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    wf1 += static_cast<double>(n_c) / n_tot * f1;
  }
  return wf1;
}

}  // namespace unscbias
