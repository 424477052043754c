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
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace unscbias {

/// items x runs categorical ratings. Missing cells are allowed; such items
/// are excluded from the statistics with an audit note.
class RatingsTable {
 public:
  RatingsTable(std::vector<std::string> categories, int runs = 3);

  /// Creates the item on first use. Throws on an unknown category or a run
  /// outside 1..runs.
  void set(const std::string& item, int run, const std::string& category);

  const std::vector<std::string>& items() const { return items_; }
  const std::vector<std::string>& categories() const { return categories_; }
  int runs() const { return runs_; }
  /// Category index, or nullopt when the cell is empty.
  std::optional<int> at(std::size_t item, int run) const;

 private:
  std::vector<std::string> categories_;
  int runs_;
  std::vector<std::string> items_;
  std::vector<std::vector<std::optional<int>>> cells_;  // [item][run - 1]
};

struct FleissResult {
  double kappa = 0.0;
  bool degenerate = false;  // expected agreement is 1; kappa reported as 1.0
  int items_used = 0;
  std::vector<std::string> notes;
};

/// Throws std::invalid_argument when runs < 2 or no complete item remains.
FleissResult fleiss_kappa(const RatingsTable& t);

enum class TestKind { kDirectQA, kVoteSim, kFriedman };
std::string_view to_string(TestKind k);
int fixed_df(TestKind k);
double fixed_threshold(TestKind k);

struct Chi2Result {
  double statistic = 0.0;
  int df = 0;
  double threshold = 0.0;
  bool pass = false;
};

/// Pearson chi-square on the runs x categories count table. df and the
/// threshold are fixed by `kind`; the table must be 3 x 5 (DirectQA) or
/// 3 x 3 (VoteSim). Zero-expectation cells contribute 0.
Chi2Result homogeneity_chi2(const std::vector<std::vector<double>>& counts, TestKind kind);

/// Same statistic with df = (r-1)(c-1) and the 0.95 quantile threshold.
Chi2Result homogeneity_chi2(const std::vector<std::vector<double>>& counts);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
double chi2_cdf(double x, int df);
/// (1 - alpha) quantile of chi-square(df).
double chi2_critical(double alpha, int df);

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int df = 0;
  bool applicable = true;  // false: NaN statistic, some run has no data
  int blocks_used = 0;
};

/// blocks[b][run]; nullopt marks a missing observation. Blocks with a gap
/// are dropped. Average ranks within each block, tie-corrected statistic.
FriedmanResult friedman(const std::vector<std::vector<std::optional<double>>>& blocks);

/// "substantial", "moderate" or "fair-or-poorer"; throws outside [-1, 1].
std::string landis_band(double kappa);

inline constexpr double kKappaThreshold = 0.40;

struct AgreementReport {
  std::string subject;  // persona, category, ...
  TestKind kind = TestKind::kVoteSim;
  FleissResult fleiss;
  Chi2Result chi2;
  bool kappa_pass = false;
  std::string landis;
};

AgreementReport agreement_report(std::string subject, TestKind kind, const RatingsTable& ratings,
                                 const std::vector<std::vector<double>>& run_counts);

nlohmann::json to_json(const AgreementReport& r);
nlohmann::json to_json(const FriedmanResult& r);

}  // namespace unscbias
