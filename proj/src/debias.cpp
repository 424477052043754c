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

#include "unscbias/debias.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "unscbias/text.hpp"

namespace unscbias {

void RetrieverConfig::validate() const {
  if (k < 1) throw std::invalid_argument("retriever k must be >= 1");
}

RetrieverConfig RetrieverConfig::from_json(const nlohmann::json& j) {
  RetrieverConfig c;
  c.k = j.value("k", c.k);
  c.threshold = j.value("threshold", c.threshold);
  c.region_weight = j.value("region_weight", c.region_weight);
  c.nation_weight = j.value("nation_weight", c.nation_weight);
  c.keyword_weight = j.value("keyword_weight", c.keyword_weight);
  c.excluded_nations = j.value("excluded_nations", c.excluded_nations);
  c.excluded_general_keywords = j.value("excluded_general_keywords", c.excluded_general_keywords);
  c.validate();
  return c;
}

nlohmann::json RetrieverConfig::to_json() const {
  return {{"k", k},
          {"threshold", threshold},
          {"region_weight", region_weight},
          {"nation_weight", nation_weight},
          {"keyword_weight", keyword_weight},
          {"excluded_nations", excluded_nations},
          {"excluded_general_keywords", excluded_general_keywords}};
}

KeywordSet KeywordSet::of(const Resolution& r) {
  if (!r.geopolitical_region || !r.target_nations || !r.keywords) {
    throw std::invalid_argument(r.id + " lacks keyword fields (geopolitical_region, target_nations, keywords)");
  }
  return KeywordSet{*r.geopolitical_region, *r.target_nations, *r.keywords};
}

namespace {

std::set<std::string> normalized(const std::vector<std::string>& v, const std::vector<std::string>& excluded) {
  std::set<std::string> skip;
  for (const auto& e : excluded) skip.insert(to_lower(trim(e)));
  std::set<std::string> out;
  for (const auto& s : v) {
    auto n = to_lower(trim(s));
    if (!n.empty() && !skip.count(n)) out.insert(n);
  }
  return out;
}

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const auto& s : a) n += b.count(s);
  return n;
}

// Absorbs rounding in sums of 0.1 weights so that a 3.0 score stays excluded.
constexpr double kScoreEpsilon = 1e-9;

}  // namespace

double score_candidate(const KeywordSet& target, const KeywordSet& candidate, const RetrieverConfig& cfg) {
  double score = 0.0;
  auto tr = to_lower(trim(target.region));
  if (!tr.empty() && tr == to_lower(trim(candidate.region))) score += cfg.region_weight;
  score += cfg.nation_weight * static_cast<double>(overlap(normalized(target.target_nations, cfg.excluded_nations),
                                                           normalized(candidate.target_nations, cfg.excluded_nations)));
  score += cfg.keyword_weight *
           static_cast<double>(overlap(normalized(target.keywords, cfg.excluded_general_keywords),
                                       normalized(candidate.keywords, cfg.excluded_general_keywords)));
  return score;
}

double score_candidate(const Resolution& target, const Resolution& candidate, const RetrieverConfig& cfg) {
  return score_candidate(KeywordSet::of(target), KeywordSet::of(candidate), cfg);
}

std::vector<RetrievalHit> retrieve(const Resolution& target, const std::vector<Resolution>& pool, Pool pool_kind,
                                   const RetrieverConfig& cfg) {
  cfg.validate();
  auto target_kw = KeywordSet::of(target);
  auto target_date = target.parsed_date();
  if (!target_date) throw std::invalid_argument(target.id + " has no valid date");

  std::vector<RetrievalHit> hits;
  for (const auto& cand : pool) {
    auto d = cand.parsed_date();
    if (!d || !(*d < *target_date)) continue;
    if (!cand.geopolitical_region || !cand.target_nations || !cand.keywords) continue;
    double s = score_candidate(target_kw, KeywordSet::of(cand), cfg);
    if (s > cfg.threshold + kScoreEpsilon) hits.push_back(RetrievalHit{&cand, pool_kind, s});
  }
  std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.score != b.score) return a.score > b.score;
    auto da = *a.resolution->parsed_date();
    auto db = *b.resolution->parsed_date();
    if (da != db) return da > db;
    return a.resolution->id < b.resolution->id;
  });
  if (hits.size() > static_cast<std::size_t>(cfg.k)) hits.resize(static_cast<std::size_t>(cfg.k));
  return hits;
}

std::vector<RetrievalHit> merge_rehearsal_list(const std::vector<RetrievalHit>& adopted_hits,
                                               const std::vector<RetrievalHit>& non_adopted_hits) {
  std::vector<RetrievalHit> out = adopted_hits;
  out.insert(out.end(), non_adopted_hits.begin(), non_adopted_hits.end());
  std::stable_sort(out.begin(), out.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    auto da = a.resolution->parsed_date();
    auto db = b.resolution->parsed_date();
    if (da != db) return da < db;
    return a.resolution->id < b.resolution->id;
  });
  return out;
}

std::string RehearsalOutcome::render() const {
  if (adopted_true) return "the resolution was adopted";
  return vote ? std::string(to_string(*vote)) : std::string("unknown");
}

namespace {

std::string render_predicted(const std::optional<VoteChoice>& v) {
  return v ? std::string(to_string(*v)) : std::string("unparseable");
}

}  // namespace

std::string render_history_block(const RehearsalHistory& history, const std::string& nation) {
  if (history.empty()) return "";
  std::string out =
      "Review the previous vote prediction data in previous vote prediction, which includes insights derived from "
      "past predictions and real outcomes. This historical information will help refine " +
      nation + "'s stance.\n - previous vote prediction:\n";
  for (const auto& r : history.records) {
    out += "Rehearsal Resolution : " + r.resolution_id + "\n";
    out += "Summary : " + r.summary + "\n";
    out += "Action Items : " + r.action_items + "\n";
    out += "My vote / Ground Truth: " + render_predicted(r.predicted) + " / " + r.outcome.render() + "\n";
    if (!r.reflection.empty()) out += "Reflection: " + r.reflection + "\n";
  }
  return out;
}

RehearsalVote rehearse(const Resolution& res, const std::string& nation, const RehearsalHistory& history,
                       ModelGateway& gateway, const CallOptions& opts) {
  if (trim(res.context).empty()) throw std::invalid_argument(res.id + " has no context");
  RehearsalVote out;
  out.step.prompt = render_vote_prompt(res.id, res.context, nation, render_history_block(history, nation));
  auto c = gateway.complete(ChatRequest::user(opts.model_id, out.step.prompt), opts.run_index, "debias.rehearsal");
  out.step.response = c.text;
  out.step.trial_id = c.record.trial_id;
  out.predicted = parse_vote(c.text);
  return out;
}

std::string render_reflection_prompt(const RehearsalRecord& record, const std::optional<std::string>& speech,
                                     const std::string& nation) {
  std::string p = "You are a representative of \"" + nation + "\" in United Nations Security Council (UNSC).\n";
  p += "Reflect on your earlier vote prediction for resolution \"" + record.resolution_id +
       "\" by comparing it with the real outcome.\n";
  p += " - Summary : " + record.summary + "\n";
  p += " - Action Items : " + record.action_items + "\n";
  p += " - My vote / Ground Truth: " + render_predicted(record.predicted) + " / " + record.outcome.render() + "\n";
  if (speech) p += " - Statement by the representative of " + nation + " after the vote:\n" + *speech + "\n";
  p += "Explain which judgements in your prediction were right or wrong, and what should guide future vote "
       "predictions for " +
       nation + ".";
  return p;
}

ModelStep reflect(const RehearsalRecord& record, const std::optional<std::string>& speech, const std::string& nation,
                  ModelGateway& gateway, const CallOptions& opts) {
  ModelStep step;
  step.prompt = render_reflection_prompt(record, speech, nation);
  auto c = gateway.complete(ChatRequest::user(opts.model_id, step.prompt), opts.run_index, "debias.reflection");
  step.response = c.text;
  step.trial_id = c.record.trial_id;
  return step;
}

nlohmann::json AuditTrail::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : events) arr.push_back({{"step", e.step}, {"detail", e.detail}});
  return arr;
}

std::string_view to_string(PipelineStatus s) {
  switch (s) {
    case PipelineStatus::kVote: return "vote";
    case PipelineStatus::kUnparseable: return "unparseable";
    case PipelineStatus::kAborted: return "aborted";
  }
  return "aborted";
}

namespace {

nlohmann::json step_json(const ModelStep& s) {
  return {{"prompt", s.prompt}, {"response", s.response}, {"trial_id", s.trial_id}};
}

}  // namespace

PipelineResult run_pipeline(const Resolution& target, const std::string& nation, const Corpus& corpus,
                            ModelGateway& gateway, const RetrieverConfig& cfg, const PipelineOptions& opts) {
  if (corpus.pool_of(target.id) != Pool::kNonAdopted) {
    throw std::invalid_argument(target.id + " is not in the non-adopted pool");
  }
  if (!is_p5(nation)) throw std::invalid_argument("persona '" + nation + "' is not a permanent member");
  KeywordSet::of(target);

  PipelineResult out;
  out.resolution_id = target.id;
  out.nation = nation;
  auto& audit = out.audit;
  audit.add("config", {{"retriever", cfg.to_json()}, {"reflection", opts.reflection}, {"run_index", opts.run_index}});

  auto hits_a = retrieve(target, corpus.adopted(), Pool::kAdopted, cfg);
  auto hits_n = retrieve(target, corpus.non_adopted(), Pool::kNonAdopted, cfg);
  auto hits_json = [](const std::vector<RetrievalHit>& hits) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& h : hits) {
      arr.push_back({{"id", h.resolution->id}, {"date", h.resolution->date}, {"score", h.score}});
    }
    return arr;
  };
  audit.add("retrieve", {{"adopted", hits_json(hits_a)}, {"non_adopted", hits_json(hits_n)}});
  auto concat = merge_rehearsal_list(hits_a, hits_n);
  audit.add("rehearsal_order", hits_json(concat));

  try {
    for (const auto& hit : concat) {
      const Resolution& r = *hit.resolution;
      RehearsalRecord rec;
      rec.resolution_id = r.id;
      rec.summary = r.summary.value_or("");
      rec.action_items = r.action_items.value_or("");

      auto vote = rehearse(r, nation, out.history, gateway, opts);
      rec.predicted = vote.predicted;
      audit.add("rehearsal_vote", {{"resolution_id", r.id},
                                   {"call", step_json(vote.step)},
                                   {"predicted", render_predicted(vote.predicted)}});

      if (hit.pool == Pool::kAdopted) {
        rec.outcome = RehearsalOutcome::adopted();
      } else if (auto v = r.vote_of(nation)) {
        rec.outcome = RehearsalOutcome::of(*v);
      } else {
        rec.outcome = RehearsalOutcome{};
      }

      if (opts.reflection) {
        auto step = reflect(rec, r.speech_of(nation), nation, gateway, opts);
        rec.reflection = step.response;
        audit.add("reflection", {{"resolution_id", r.id}, {"call", step_json(step)}});
      }
      out.history.records.push_back(std::move(rec));
      audit.add("history", {{"size", out.history.size()}});
    }

    std::string prompt = render_persona_prompt(target, nation, render_history_block(out.history, nation));
    auto c = gateway.complete(ChatRequest::user(opts.model_id, prompt), opts.run_index,
                              out.history.empty() ? "votesim" : "debias.final");
    out.final_response = c.text;
    out.final_trial_id = c.record.trial_id;
    out.final_vote = parse_vote(c.text);
    out.status = out.final_vote ? PipelineStatus::kVote : PipelineStatus::kUnparseable;
    audit.add("final_vote", {{"call", step_json({prompt, c.text, c.record.trial_id})},
                             {"vote", render_predicted(out.final_vote)}});
  } catch (const GatewayError& e) {
    out.status = PipelineStatus::kAborted;
    out.abort_reason = e.what();
    audit.add("abort", {{"reason", e.what()}});
  }
  return out;
}

SimVote to_sim_vote(const PipelineResult& r, int run_index) {
  return SimVote{r.resolution_id, r.nation, r.final_vote, run_index, r.final_response, r.final_trial_id};
}

}  // namespace unscbias
