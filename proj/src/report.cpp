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

#include "unscbias/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "unscbias/gateway.hpp"
#include "unscbias/stats.hpp"

namespace unscbias {

nlohmann::json to_json(const DirectQATrial& t) {
  return {{"question", to_json(t.question)},
          {"response", t.response},
          {"label", t.label.to_string()},
          {"trial_id", t.trial_id}};
}

DirectQATrial directqa_trial_from_json(const nlohmann::json& j) {
  DirectQATrial t;
  t.question = pair_question_from_json(j.at("question"));
  t.response = j.value("response", "");
  t.label = DirectQALabel::parse(j.at("label").get<std::string>());
  t.trial_id = j.value("trial_id", "");
  return t;
}

nlohmann::json to_json(const AssociationTrial& t) {
  return {{"prompt", {{"keyword", t.prompt.keyword}, {"nation_order", t.prompt.nation_order}, {"seed", t.prompt.seed}}},
          {"response", t.response},
          {"result", to_json(t.result)},
          {"trial_id", t.trial_id}};
}

AssociationTrial association_trial_from_json(const nlohmann::json& j) {
  AssociationTrial t;
  const auto& p = j.at("prompt");
  t.prompt.keyword = p.at("keyword").get<std::string>();
  t.prompt.nation_order = p.at("nation_order").get<std::vector<std::string>>();
  t.prompt.seed = p.at("seed").get<std::uint64_t>();
  t.response = j.value("response", "");
  t.result = ranking_result_from_json(j.at("result"));
  t.trial_id = j.value("trial_id", "");
  return t;
}

namespace {

template <typename T, typename F>
void save_runs(const std::filesystem::path& dir, const std::string& test, const std::map<int, std::vector<T>>& runs,
               F&& encode) {
  for (const auto& [run, trials] : runs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trials) arr.push_back(encode(t));
    nlohmann::json doc = {{"schema", kResultsSchema}, {"test", test}, {"run_index", run}, {"trials", arr}};
    write_file_atomic(dir / (test + "-r" + std::to_string(run) + ".json"), doc.dump(1) + "\n");
  }
}

}  // namespace

void ResultsStore::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  save_runs(dir, "directqa", directqa, [](const DirectQATrial& t) { return to_json(t); });
  save_runs(dir, "assoc", assoc, [](const AssociationTrial& t) { return to_json(t); });
  save_runs(dir, "votesim", votesim, [](const SimVote& v) { return to_json(v); });
  save_runs(dir, "debias", debias, [](const SimVote& v) { return to_json(v); });
}

ResultsStore ResultsStore::load(const std::filesystem::path& dir) {
  ResultsStore s;
  if (!std::filesystem::is_directory(dir)) return s;
  static const std::regex name(R"(^(directqa|assoc|votesim|debias)-r(\d+)\.json$)");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::smatch m;
    std::string fname = path.filename().string();
    if (!std::regex_match(fname, m, name)) continue;
    std::ifstream in(path);
    auto doc = nlohmann::json::parse(in);
    if (doc.value("schema", "") != kResultsSchema) {
      throw std::runtime_error(path.string() + ": unexpected schema " + doc.value("schema", "<none>"));
    }
    int run = std::stoi(m[2].str());
    std::string test = m[1].str();
    for (const auto& t : doc.at("trials")) {
      if (test == "directqa") s.directqa[run].push_back(directqa_trial_from_json(t));
      else if (test == "assoc") s.assoc[run].push_back(association_trial_from_json(t));
      else if (test == "votesim") s.votesim[run].push_back(sim_vote_from_json(t));
      else s.debias[run].push_back(sim_vote_from_json(t));
    }
  }
  return s;
}

void ReportBundle::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files) write_file_atomic(dir / name, content);
}

namespace {

std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

nlohmann::json num_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

class Table {
 public:
  Table(std::string schema, std::vector<std::string> columns) : schema_(std::move(schema)), columns_(std::move(columns)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  bool empty() const { return rows_.empty(); }
  std::string render() const {
    std::string out = "# schema: unscbias/" + schema_ + "@1\n" + join(columns_) + "\n";
    for (const auto& r : rows_) out += join(r) + "\n";
    return out;
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "\t" : "") + cells[i];
    return s;
  }
  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

template <typename T>
std::vector<std::string> run_columns(const std::map<int, T>& runs) {
  std::vector<std::string> cols;
  for (const auto& [run, _] : runs) cols.push_back("r" + std::to_string(run));
  return cols;
}

template <typename T>
bool three_runs(const std::map<int, T>& runs) {
  if (runs.size() != 3) return false;
  int expect = 1;
  for (const auto& [run, _] : runs) {
    if (run != expect++) return false;
  }
  return true;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  int n = 0;
  for (double x : v) {
    if (std::isnan(x)) continue;
    s += x;
    ++n;
  }
  return n ? s / n : std::nan("");
}

struct Context {
  const ResultsStore& store;
  const ReportInputs& in;
  ReportBundle& out;
  nlohmann::json agreement = nlohmann::json::array();
  Table agreement_table{"agreement", {"test", "subject", "fleiss_kappa", "landis_band", "kappa_pass", "chi2", "df",
                                      "threshold", "chi2_pass", "items_used"}};

  void gap(std::string g) { out.gaps.push_back(std::move(g)); }

  void add_agreement(const std::string& test, TestKind kind, const std::string& subject, const RatingsTable& ratings,
                     const std::vector<std::vector<double>>& counts) {
    try {
      auto r = agreement_report(subject, kind, ratings, counts);
      auto j = to_json(r);
      j["test"] = test;
      agreement.push_back(j);
      agreement_table.row({test, subject, fixed(r.fleiss.kappa), r.landis, r.kappa_pass ? "yes" : "no",
                           fixed(r.chi2.statistic), std::to_string(r.chi2.df), fixed(r.chi2.threshold, 3),
                           r.chi2.pass ? "yes" : "no", std::to_string(r.fleiss.items_used)});
    } catch (const std::exception& e) {
      gap(test + " agreement for " + subject + ": " + e.what());
    }
  }
};

void directqa_tables(Context& cx) {
  const auto& runs = cx.store.directqa;
  if (runs.empty()) {
    cx.gap("directqa: no completed runs");
    return;
  }
  // (category, nation) -> run -> score; nation "neutral" carries the neutral share.
  std::map<std::string, std::map<std::string, std::map<int, double>>> grid;
  std::vector<std::string> categories;
  for (const auto& [run, trials] : runs) {
    std::vector<LabeledQuestion> labels;
    for (const auto& t : trials) labels.emplace_back(t.question, t.label);
    try {
      for (const auto& s : irresponsibility_scores(labels, run, cx.in.nations)) {
        if (std::find(categories.begin(), categories.end(), s.category) == categories.end()) {
          categories.push_back(s.category);
        }
        grid[s.category][s.nation][run] = s.score;
        grid[s.category]["neutral"][run] =
            s.total_questions ? static_cast<double>(s.neutral_count) / s.total_questions : std::nan("");
      }
    } catch (const IncompleteLabelSetError& e) {
      cx.gap("directqa run " + std::to_string(run) + ": " + std::to_string(e.missing().size()) +
             " questions without a label");
    }
  }

  auto cols = std::vector<std::string>{"category", "nation"};
  for (const auto& c : run_columns(runs)) cols.push_back(c);
  cols.push_back("mean");
  Table t("irresponsibility", cols);
  nlohmann::json rows = nlohmann::json::array();
  auto subjects = cx.in.nations;
  subjects.push_back("neutral");
  for (const auto& cat : categories) {
    for (const auto& nation : subjects) {
      std::vector<std::string> cells = {cat, nation};
      std::vector<double> vals;
      for (const auto& [run, _] : runs) {
        auto& per_run = grid[cat][nation];
        double v = per_run.count(run) ? per_run[run] : std::nan("");
        vals.push_back(v);
        cells.push_back(fixed(v));
      }
      cells.push_back(fixed(mean_of(vals)));
      t.row(cells);
      nlohmann::json per = nlohmann::json::array();
      for (double v : vals) per.push_back(num_or_null(v));
      rows.push_back({{"category", cat}, {"nation", nation}, {"runs", per}, {"mean", num_or_null(mean_of(vals))}});
    }
  }
  cx.out.files["irresponsibility.tsv"] = t.render();
  cx.out.summary["irresponsibility"] = rows;

  if (!three_runs(runs)) {
    cx.gap("directqa agreement: needs runs 1..3");
    return;
  }
  for (const auto& cat : categories) {
    auto cats = cx.in.nations;
    cats.push_back("neutral");
    RatingsTable ratings(cats, 3);
    std::vector<std::vector<double>> counts(3, std::vector<double>(cx.in.nations.size(), 0.0));
    for (const auto& [run, trials] : runs) {
      for (const auto& tr : trials) {
        if (tr.question.category() != cat || tr.label.kind == DirectQALabel::Kind::kUnparseable) continue;
        ratings.set(tr.question.id(), run, tr.label.kind == DirectQALabel::Kind::kNeutral ? "neutral" : tr.label.nation);
        if (tr.label.kind == DirectQALabel::Kind::kNation) {
          auto it = std::find(cx.in.nations.begin(), cx.in.nations.end(), tr.label.nation);
          counts[static_cast<std::size_t>(run - 1)][static_cast<std::size_t>(it - cx.in.nations.begin())] += 1.0;
        }
      }
    }
    cx.add_agreement("directqa", TestKind::kDirectQA, cat, ratings, counts);
  }
}

void assoc_tables(Context& cx) {
  const auto& runs = cx.store.assoc;
  if (runs.empty()) {
    cx.gap("assoc: no completed runs");
    return;
  }
  if (!cx.in.pool) {
    cx.gap("assoc: no keyword pool supplied");
    return;
  }
  std::map<std::string, std::map<std::string, std::map<int, std::optional<double>>>> grid;
  std::vector<std::string> categories;
  for (const auto& [run, trials] : runs) {
    std::vector<RankingResult> results;
    for (const auto& t : trials) results.push_back(t.result);
    for (const auto& s : ats(results, *cx.in.pool, cx.in.nations)) {
      if (std::find(categories.begin(), categories.end(), s.category) == categories.end()) categories.push_back(s.category);
      grid[s.category][s.nation][run] = s.value;
    }
  }
  auto cols = std::vector<std::string>{"category", "nation"};
  for (const auto& c : run_columns(runs)) cols.push_back(c);
  cols.push_back("mean");
  Table t("ats", cols);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& cat : categories) {
    for (const auto& nation : cx.in.nations) {
      std::vector<std::string> cells = {cat, nation};
      std::vector<double> vals;
      for (const auto& [run, _] : runs) {
        auto v = grid[cat][nation][run];
        vals.push_back(v ? *v : std::nan(""));
        cells.push_back(fixed(vals.back()));
      }
      cells.push_back(fixed(mean_of(vals)));
      t.row(cells);
      nlohmann::json per = nlohmann::json::array();
      for (double v : vals) per.push_back(num_or_null(v));
      rows.push_back({{"category", cat}, {"nation", nation}, {"runs", per}, {"mean", num_or_null(mean_of(vals))}});
    }
  }
  cx.out.files["ats.tsv"] = t.render();
  cx.out.summary["ats"] = rows;

  if (!three_runs(runs)) {
    cx.gap("assoc friedman: needs runs 1..3");
    return;
  }
  Table ft("friedman", {"category", "chi2", "p_value", "df", "applicable", "blocks_used", "pass"});
  nlohmann::json frows = nlohmann::json::array();
  auto all_categories = cx.in.pool->categories();
  std::vector<std::string> names;
  for (const auto& c : all_categories) names.push_back(c.name);
  names.emplace_back(kAllCategories);
  for (const auto& cat : names) {
    std::vector<std::vector<std::optional<double>>> blocks;
    for (const auto& kw : cx.in.pool->all_keywords()) {
      if (cat != kAllCategories && cx.in.pool->category_of(kw) != cat) continue;
      for (const auto& nation : cx.in.nations) {
        std::vector<std::optional<double>> b(3);
        for (const auto& [run, trials] : runs) {
          for (const auto& tr : trials) {
            if (tr.result.keyword != kw) continue;
            auto it = tr.result.ranks.find(nation);
            if (it != tr.result.ranks.end()) b[static_cast<std::size_t>(run - 1)] = it->second;
          }
        }
        blocks.push_back(b);
      }
    }
    if (blocks.empty()) continue;
    auto r = friedman(blocks);
    bool pass = r.applicable && r.statistic < fixed_threshold(TestKind::kFriedman);
    ft.row({cat, fixed(r.statistic), fixed(r.p_value), std::to_string(r.df), r.applicable ? "yes" : "no",
            std::to_string(r.blocks_used), pass ? "yes" : "no"});
    auto j = to_json(r);
    j["category"] = cat;
    j["pass"] = pass;
    frows.push_back(j);
  }
  cx.out.files["friedman.tsv"] = ft.render();
  cx.out.summary["friedman"] = frows;
}

VoteDistribution votes_of(const std::vector<SimVote>& votes, const std::string& nation) {
  std::vector<SimVote> mine;
  for (const auto& v : votes) {
    if (v.nation == nation) mine.push_back(v);
  }
  return distribution(mine);
}

std::vector<SimVote> pooled(const std::map<int, std::vector<SimVote>>& runs) {
  std::vector<SimVote> all;
  for (const auto& [_, v] : runs) all.insert(all.end(), v.begin(), v.end());
  return all;
}

std::vector<SimVote> filter(const std::vector<SimVote>& votes, const std::string& nation) {
  std::vector<SimVote> out;
  for (const auto& v : votes) {
    if (v.nation == nation) out.push_back(v);
  }
  return out;
}

double wf1_or_nan(const std::vector<SimVote>& votes, const Corpus& corpus) {
  try {
    return weighted_f1(confusion(votes, corpus));
  } catch (const std::invalid_argument&) {
    return std::nan("");
  }
}

void vote_tables(Context& cx) {
  Table counts("vote_counts", {"source", "run", "nation", "favour", "against", "abstention", "unparseable",
                               "freq_favour", "freq_against", "freq_abstention"});
  nlohmann::json crows = nlohmann::json::array();
  auto add = [&](const std::string& source, const std::string& run, const std::string& nation,
                 const VoteDistribution& d) {
    counts.row({source, run, nation, std::to_string(d.counts[0]), std::to_string(d.counts[1]),
                std::to_string(d.counts[2]), std::to_string(d.unparseable), fixed(d.frequencies[0]),
                fixed(d.frequencies[1]), fixed(d.frequencies[2])});
    crows.push_back({{"source", source},
                     {"run", run},
                     {"nation", nation},
                     {"counts", d.counts},
                     {"unparseable", d.unparseable},
                     {"frequencies", d.frequencies}});
  };
  if (cx.in.corpus) {
    for (const auto& n : cx.in.nations) add("ground_truth", "-", n, distribution(ground_truth_votes(*cx.in.corpus, n)));
  } else {
    cx.gap("votes: no corpus supplied, ground truth and WF1 omitted");
  }

  Table wf1("wf1", {"source", "nation", "run", "wf1_x100"});
  nlohmann::json wrows = nlohmann::json::array();
  for (const auto& [source, runs] : {std::pair<std::string, const std::map<int, std::vector<SimVote>>*>{
                                         "votesim", &cx.store.votesim},
                                     {"debias", &cx.store.debias}}) {
    if (runs->empty()) {
      cx.gap(source + ": no completed runs");
      continue;
    }
    for (const auto& n : cx.in.nations) {
      for (const auto& [run, votes] : *runs) add(source, "r" + std::to_string(run), n, votes_of(votes, n));
      add(source, "pooled", n, votes_of(pooled(*runs), n));
    }
    if (cx.in.corpus) {
      for (const auto& n : cx.in.nations) {
        for (const auto& [run, votes] : *runs) {
          double v = wf1_or_nan(filter(votes, n), *cx.in.corpus) * 100.0;
          wf1.row({source, n, "r" + std::to_string(run), fixed(v, 2)});
          wrows.push_back({{"source", source}, {"nation", n}, {"run", "r" + std::to_string(run)}, {"wf1_x100", num_or_null(v)}});
        }
        double v = wf1_or_nan(filter(pooled(*runs), n), *cx.in.corpus) * 100.0;
        wf1.row({source, n, "pooled", fixed(v, 2)});
        wrows.push_back({{"source", source}, {"nation", n}, {"run", "pooled"}, {"wf1_x100", num_or_null(v)}});
      }
    }

    if (!three_runs(*runs)) {
      cx.gap(source + " agreement: needs runs 1..3");
      continue;
    }
    for (const auto& n : cx.in.nations) {
      RatingsTable ratings({"favour", "against", "abstention"}, 3);
      std::vector<std::vector<double>> c(3, std::vector<double>(3, 0.0));
      for (const auto& [run, votes] : *runs) {
        for (const auto& v : votes) {
          if (v.nation != n || !v.predicted) continue;
          ratings.set(v.resolution_id, run, std::string(to_string(*v.predicted)));
          c[static_cast<std::size_t>(run - 1)][static_cast<std::size_t>(*v.predicted)] += 1.0;
        }
      }
      cx.add_agreement(source, TestKind::kVoteSim, n, ratings, c);
    }
  }
  if (!counts.empty()) {
    cx.out.files["vote_counts.tsv"] = counts.render();
    cx.out.summary["vote_counts"] = crows;
  }
  if (!wf1.empty()) {
    cx.out.files["wf1.tsv"] = wf1.render();
    cx.out.summary["wf1"] = wrows;
  }

  if (cx.in.corpus && !cx.store.votesim.empty() && !cx.store.debias.empty()) {
    auto base = pooled_wf1(cx.store.votesim, *cx.in.corpus, cx.in.nations);
    auto deb = pooled_wf1(cx.store.debias, *cx.in.corpus, cx.in.nations);
    Table dt("debias_delta", {"nation", "base_x100", "debiased_x100", "delta_x100"});
    nlohmann::json drows = nlohmann::json::array();
    for (const auto& n : cx.in.nations) {
      double b = base.count(n) ? base[n] * 100.0 : std::nan("");
      double d = deb.count(n) ? deb[n] * 100.0 : std::nan("");
      dt.row({n, fixed(b, 2), fixed(d, 2), fixed(d - b, 2)});
      drows.push_back({{"nation", n}, {"base_x100", num_or_null(b)}, {"debiased_x100", num_or_null(d)},
                       {"delta_x100", num_or_null(d - b)}});
    }
    cx.out.files["debias_delta.tsv"] = dt.render();
    cx.out.summary["debias_delta"] = drows;
  }
}

}  // namespace

std::map<std::string, double> pooled_wf1(const std::map<int, std::vector<SimVote>>& runs, const Corpus& corpus,
                                         const std::vector<std::string>& nations) {
  std::map<std::string, double> out;
  auto all = pooled(runs);
  for (const auto& n : nations) {
    double v = wf1_or_nan(filter(all, n), corpus);
    if (!std::isnan(v)) out[n] = v;
  }
  return out;
}

ReportBundle emit_reports(const ResultsStore& store, const ReportInputs& inputs) {
  ReportBundle out;
  out.summary = {{"schema", "unscbias/summary@1"}};
  Context cx{store, inputs, out};
  directqa_tables(cx);
  assoc_tables(cx);
  vote_tables(cx);
  if (!cx.agreement_table.empty()) {
    out.files["agreement.tsv"] = cx.agreement_table.render();
    out.summary["agreement"] = cx.agreement;
  }
  out.summary["gaps"] = out.gaps;
  std::string gaps;
  for (const auto& g : out.gaps) gaps += g + "\n";
  out.files["gaps.txt"] = gaps;
  out.files["summary.json"] = out.summary.dump(2) + "\n";
  return out;
}

}  // namespace unscbias
