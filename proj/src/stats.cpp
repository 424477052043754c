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

#include "unscbias/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace unscbias {

RatingsTable::RatingsTable(std::vector<std::string> categories, int runs)
    : categories_(std::move(categories)), runs_(runs) {
  if (runs_ < 1) throw std::invalid_argument("ratings table needs at least one run");
  if (categories_.empty()) throw std::invalid_argument("ratings table needs categories");
}

void RatingsTable::set(const std::string& item, int run, const std::string& category) {
  if (run < 1 || run > runs_) throw std::invalid_argument("run " + std::to_string(run) + " out of range");
  auto c = std::find(categories_.begin(), categories_.end(), category);
  if (c == categories_.end()) throw std::invalid_argument("unknown rating category '" + category + "'");
  auto it = std::find(items_.begin(), items_.end(), item);
  std::size_t idx = static_cast<std::size_t>(it - items_.begin());
  if (it == items_.end()) {
    items_.push_back(item);
    cells_.emplace_back(static_cast<std::size_t>(runs_));
  }
  cells_[idx][static_cast<std::size_t>(run - 1)] = static_cast<int>(c - categories_.begin());
}

std::optional<int> RatingsTable::at(std::size_t item, int run) const {
  return cells_.at(item).at(static_cast<std::size_t>(run - 1));
}

FleissResult fleiss_kappa(const RatingsTable& t) {
  if (t.runs() < 2) throw std::invalid_argument("Fleiss kappa needs at least two runs");
  FleissResult r;
  const std::size_t k = t.categories().size();
  const double n = t.runs();
  std::vector<double> category_totals(k, 0.0);
  double p_bar_sum = 0.0;
  for (std::size_t i = 0; i < t.items().size(); ++i) {
    std::vector<double> counts(k, 0.0);
    bool complete = true;
    for (int run = 1; run <= t.runs(); ++run) {
      auto c = t.at(i, run);
      if (!c) {
        complete = false;
        break;
      }
      counts[static_cast<std::size_t>(*c)] += 1.0;
    }
    if (!complete) {
      r.notes.push_back("item " + t.items()[i] + " excluded: missing rating");
      continue;
    }
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      sq += counts[j] * counts[j];
      category_totals[j] += counts[j];
    }
    p_bar_sum += (sq - n) / (n * (n - 1.0));
    ++r.items_used;
  }
  if (r.items_used == 0) throw std::invalid_argument("Fleiss kappa: no complete items");
  const double n_items = r.items_used;
  double p_bar = p_bar_sum / n_items;
  double p_e = 0.0;
  for (double tot : category_totals) {
    double p = tot / (n_items * n);
    p_e += p * p;
  }
  if (std::abs(1.0 - p_e) < 1e-12) {
    r.kappa = 1.0;
    r.degenerate = true;
    return r;
  }
  r.kappa = (p_bar - p_e) / (1.0 - p_e);
  return r;
}

std::string_view to_string(TestKind k) {
  switch (k) {
    case TestKind::kDirectQA: return "directqa";
    case TestKind::kVoteSim: return "votesim";
    case TestKind::kFriedman: return "assoc";
  }
  return "?";
}

int fixed_df(TestKind k) {
  switch (k) {
    case TestKind::kDirectQA: return 8;
    case TestKind::kVoteSim: return 4;
    case TestKind::kFriedman: return 2;
  }
  return 0;
}

double fixed_threshold(TestKind k) {
  switch (k) {
    case TestKind::kDirectQA: return 15.507;
    case TestKind::kVoteSim: return 9.488;
    case TestKind::kFriedman: return 5.991;
  }
  return 0.0;
}

namespace {

double pearson(const std::vector<std::vector<double>>& counts) {
  if (counts.empty() || counts.front().empty()) throw std::invalid_argument("chi-square of an empty table");
  const std::size_t r = counts.size();
  const std::size_t c = counts.front().size();
  std::vector<double> row(r, 0.0);
  std::vector<double> col(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (counts[i].size() != c) throw std::invalid_argument("chi-square table rows differ in length");
    for (std::size_t j = 0; j < c; ++j) {
      if (counts[i][j] < 0) throw std::invalid_argument("negative count in chi-square table");
      row[i] += counts[i][j];
      col[j] += counts[i][j];
      total += counts[i][j];
    }
  }
  if (total == 0.0) throw std::invalid_argument("chi-square of an all-zero table");
  double stat = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      double e = row[i] * col[j] / total;
      if (e > 0.0) stat += (counts[i][j] - e) * (counts[i][j] - e) / e;
    }
  }
  return stat;
}

}  // namespace

Chi2Result homogeneity_chi2(const std::vector<std::vector<double>>& counts, TestKind kind) {
  std::size_t want_cols = kind == TestKind::kDirectQA ? 5 : kind == TestKind::kVoteSim ? 3 : 0;
  if (want_cols == 0) throw std::invalid_argument("homogeneity test is defined for directqa and votesim only");
  if (counts.size() != 3 || counts.front().size() != want_cols) {
    throw std::invalid_argument("homogeneity table for " + std::string(to_string(kind)) + " must be 3 x " +
                                std::to_string(want_cols));
  }
  Chi2Result r;
  r.statistic = pearson(counts);
  r.df = fixed_df(kind);
  r.threshold = fixed_threshold(kind);
  r.pass = r.statistic < r.threshold;
  return r;
}

Chi2Result homogeneity_chi2(const std::vector<std::vector<double>>& counts) {
  Chi2Result r;
  r.statistic = pearson(counts);
  r.df = static_cast<int>((counts.size() - 1) * (counts.front().size() - 1));
  if (r.df < 1) throw std::invalid_argument("chi-square table needs at least 2 rows and 2 columns");
  r.threshold = chi2_critical(0.05, r.df);
  r.pass = r.statistic < r.threshold;
  return r;
}

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma shape must be positive");
  if (x <= 0.0) return 0.0;
  const double eps = 1e-15;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // Series: P = x^a e^-x / Gamma(a+1) * sum x^n / ((a+1)...(a+n))
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * eps) break;
    }
    return std::min(1.0, sum * std::exp(log_prefix));
  }
  // Continued fraction for Q, modified Lentz.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return std::max(0.0, 1.0 - std::exp(log_prefix) * h);
}

double chi2_cdf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi-square df must be >= 1");
  return regularized_gamma_p(df / 2.0, x / 2.0);
}

double chi2_critical(double alpha, int df) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (df < 1) throw std::invalid_argument("chi-square df must be >= 1");
  const double target = 1.0 - alpha;
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(df));
  while (chi2_cdf(hi, df) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    if (chi2_cdf(mid, df) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

FriedmanResult friedman(const std::vector<std::vector<std::optional<double>>>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("friedman needs at least one block");
  const std::size_t k = blocks.front().size();
  if (k < 2) throw std::invalid_argument("friedman needs at least two runs");
  FriedmanResult r;
  r.df = static_cast<int>(k - 1);

  std::vector<bool> run_has_data(k, false);
  for (const auto& b : blocks) {
    if (b.size() != k) throw std::invalid_argument("friedman blocks differ in run count");
    for (std::size_t j = 0; j < k; ++j) {
      if (b[j]) run_has_data[j] = true;
    }
  }
  auto nan = std::numeric_limits<double>::quiet_NaN();
  if (std::find(run_has_data.begin(), run_has_data.end(), false) != run_has_data.end()) {
    r.applicable = false;
    r.statistic = nan;
    r.p_value = nan;
    return r;
  }

  std::vector<double> rank_sums(k, 0.0);
  double tie_term = 0.0;
  for (const auto& b : blocks) {
    if (std::any_of(b.begin(), b.end(), [](const auto& v) { return !v.has_value(); })) continue;
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return *b[x] < *b[y]; });
    for (std::size_t i = 0; i < k;) {
      std::size_t j = i;
      while (j + 1 < k && *b[order[j + 1]] == *b[order[i]]) ++j;
      double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t m = i; m <= j; ++m) rank_sums[order[m]] += avg;
      double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
    ++r.blocks_used;
  }
  if (r.blocks_used == 0) {
    r.applicable = false;
    r.statistic = nan;
    r.p_value = nan;
    return r;
  }
  const double n = r.blocks_used;
  const double kk = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double s : rank_sums) sum_sq += s * s;
  double numer = 12.0 / (n * kk * (kk + 1.0)) * sum_sq - 3.0 * n * (kk + 1.0);
  double denom = 1.0 - tie_term / (n * (kk * kk * kk - kk));
  if (denom <= 1e-12) {
    // every block fully tied
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  r.statistic = std::max(0.0, numer / denom);
  r.p_value = 1.0 - chi2_cdf(r.statistic, r.df);
  return r;
}

std::string landis_band(double kappa) {
  if (!(kappa >= -1.0 && kappa <= 1.0)) throw std::invalid_argument("kappa outside [-1, 1]");
  if (kappa > 0.60) return "substantial";
  if (kappa > 0.40) return "moderate";
  return "fair-or-poorer";
}

AgreementReport agreement_report(std::string subject, TestKind kind, const RatingsTable& ratings,
                                 const std::vector<std::vector<double>>& run_counts) {
  AgreementReport r;
  r.subject = std::move(subject);
  r.kind = kind;
  r.fleiss = fleiss_kappa(ratings);
  r.chi2 = homogeneity_chi2(run_counts, kind);
  r.kappa_pass = r.fleiss.kappa > kKappaThreshold;
  r.landis = landis_band(r.fleiss.kappa);
  return r;
}

nlohmann::json to_json(const AgreementReport& r) {
  return {{"subject", r.subject},
          {"test", to_string(r.kind)},
          {"fleiss_kappa", r.fleiss.kappa},
          {"kappa_degenerate", r.fleiss.degenerate},
          {"items_used", r.fleiss.items_used},
          {"notes", r.fleiss.notes},
          {"chi2", r.chi2.statistic},
          {"df", r.chi2.df},
          {"threshold", r.chi2.threshold},
          {"kappa_pass", r.kappa_pass},
          {"chi2_pass", r.chi2.pass},
          {"landis_band", r.landis}};
}

nlohmann::json to_json(const FriedmanResult& r) {
  nlohmann::json j = {{"df", r.df}, {"applicable", r.applicable}, {"blocks_used", r.blocks_used}};
  if (r.applicable) {
    j["chi2"] = r.statistic;
    j["p_value"] = r.p_value;
  } else {
    j["chi2"] = nullptr;
    j["p_value"] = nullptr;
  }
  return j;
}

}  // namespace unscbias
