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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "unscbias/gateway.hpp"
#include "unscbias/nations.hpp"
#include "unscbias/unsc_functions.hpp"

namespace unscbias {

enum class PresentationOrder { kAB, kBA };

struct PairQuestion {
  int function_ordinal = 0;  // 0 = general irresponsibility
  std::string nation_a;
  std::string nation_b;
  PresentationOrder order = PresentationOrder::kAB;
  std::string role_phrase;  // empty for general questions

  std::string category() const;  // "general" or "function-N"
  std::string id() const;
  const std::string& first() const { return order == PresentationOrder::kAB ? nation_a : nation_b; }
  const std::string& second() const { return order == PresentationOrder::kAB ? nation_b : nation_a; }
  bool operator==(const PairQuestion&) const = default;
};

nlohmann::json to_json(const PairQuestion& q);
PairQuestion pair_question_from_json(const nlohmann::json& j);

/// For each category (general, then functions in list order): every
/// unordered pair in `nations` order, ab before ba.
std::vector<PairQuestion> generate_questions(const std::vector<std::string>& nations,
                                             const std::vector<UnscFunction>& functions, bool include_general = true);

std::string render_prompt(const PairQuestion& q);

struct DirectQALabel {
  enum class Kind { kNation, kNeutral, kUnparseable };
  Kind kind = Kind::kUnparseable;
  std::string nation;  // set iff kind == kNation

  static DirectQALabel of(std::string nation) { return {Kind::kNation, std::move(nation)}; }
  static DirectQALabel neutral() { return {Kind::kNeutral, {}}; }
  static DirectQALabel unparseable() { return {Kind::kUnparseable, {}}; }
  std::string to_string() const;  // nation name, "neutral" or "unparseable"
  static DirectQALabel parse(const std::string& s);
  bool operator==(const DirectQALabel&) const = default;
};

struct LabelPolicy {
  NationAliases aliases = NationAliases::defaults();
  /// Optional second stage for texts the rules leave unparseable.
  ModelGateway* judge = nullptr;
  std::string judge_model = "gpt-4o-mini";
  int judge_run_index = 1;
};

/// Rule pass: selection phrases around an option nation, option letters, or
/// a reply that opens with one option; hedges without a selection are
/// neutral. Never returns a nation outside the question.
DirectQALabel label_response(const std::string& text, const PairQuestion& q, const LabelPolicy& policy = {});

struct IrresponsibilityScore {
  std::string nation;
  std::string category;
  int run_index = 1;
  int count_selected = 0;
  int total_questions = 0;
  int neutral_count = 0;      // category-wide
  int unparseable_count = 0;  // category-wide
  double score = 0.0;
};

class IncompleteLabelSetError : public std::runtime_error {
 public:
  explicit IncompleteLabelSetError(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

using LabeledQuestion = std::pair<PairQuestion, DirectQALabel>;

/// Irresponsibility per (nation, category): selections / N, N = C(|nations|,2)*2.
/// Every category present in `labels` must carry its complete question
/// set; otherwise IncompleteLabelSetError lists the missing question ids.
std::vector<IrresponsibilityScore> irresponsibility_scores(const std::vector<LabeledQuestion>& labels, int run_index,
                                                           const std::vector<std::string>& nations = p5_nations());

struct DirectQATrial {
  PairQuestion question;
  std::string response;
  DirectQALabel label;
  std::string trial_id;
};

/// Dispatches every question once for `run_index` through the gateway.
std::vector<DirectQATrial> run_directqa(const std::vector<PairQuestion>& questions, ModelGateway& gateway,
                                        const std::string& model_id, int run_index, const LabelPolicy& policy = {});

}  // namespace unscbias
