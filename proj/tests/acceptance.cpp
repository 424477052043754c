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

// Acceptance checks. One PASS/FAIL line per criterion; a nonzero exit code
// when any check fails, except the documented keyword-count conflict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <nlohmann/json.hpp>

#include "unscbias/association.hpp"
#include "unscbias/cli.hpp"
#include "unscbias/debias.hpp"
#include "unscbias/directqa.hpp"
#include "unscbias/stats.hpp"
#include "unscbias/synthetic_corpus.hpp"
#include "unscbias/votesim.hpp"

namespace fs = std::filesystem;
using namespace unscbias;

namespace {

struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
      std::ostringstream s;
      s << what << ": got " << got << ", want " << want;
      failures.push_back(s.str());
    }
  }
};

struct Outcome {
  bool pass = true;
  bool known_defect_only = false;
};

Outcome report(int n, const std::string& title, const Check& c, const std::vector<std::string>& known = {}) {
  bool pass = c.failures.empty();
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", n, title.c_str());
  for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
  Outcome o;
  o.pass = pass;
  o.known_defect_only = !pass && c.failures.size() == known.size() &&
                        std::equal(c.failures.begin(), c.failures.end(), known.begin());
  return o;
}

// 1. Ground-truth frequencies.
Check ground_truth() {
  Check c;
  const std::map<std::string, std::array<double, 3>> table = {{"United States", {0.50, 0.41, 0.09}},
                                                              {"United Kingdom", {0.52, 0.24, 0.24}},
                                                              {"France", {0.61, 0.23, 0.17}},
                                                              {"Russian Federation", {0.48, 0.48, 0.03}},
                                                              {"China", {0.50, 0.18, 0.32}}};
  auto corpus = reference_profile_corpus();
  for (const auto& [nation, want] : table) {
    auto d = distribution(ground_truth_votes(corpus, nation));
    for (int i = 0; i < 3; ++i) c.near(d.frequencies[static_cast<std::size_t>(i)], want[static_cast<std::size_t>(i)], 0.005, nation);
  }
  return c;
}

// 2. Chi-square thresholds.
Check thresholds() {
  Check c;
  c.near(chi2_critical(0.05, 8), 15.507, 0.001, "df 8");
  c.near(chi2_critical(0.05, 4), 9.488, 0.001, "df 4");
  c.near(chi2_critical(0.05, 2), 5.991, 0.001, "df 2");
  for (int df : {2, 4, 8}) {
    boost::math::chi_squared d(df);
    c.near(chi2_critical(0.05, df), boost::math::quantile(boost::math::complement(d, 0.05)), 0.001, "boost df");
  }
  return c;
}

// Independent weighted F1 over a plain 3x3 array.
double oracle_wf1(const std::array<std::array<int, 3>, 3>& m) {
  double n = 0, s = 0;
  for (const auto& row : m)
    for (int x : row) n += x;
  for (int k = 0; k < 3; ++k) {
    double tp = m[k][k], support = 0, predicted = 0;
    for (int j = 0; j < 3; ++j) {
      support += m[k][j];
      predicted += m[j][k];
    }
    double p = predicted > 0 ? tp / predicted : 0, r = support > 0 ? tp / support : 0;
    double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0;
    s += support / n * f1;
  }
  return s;
}

// 3. Weighted F1.
Check wf1() {
  Check c;
  std::vector<std::array<std::array<int, 3>, 3>> ms = {
      {{{33, 0, 0}, {27, 0, 0}, {6, 0, 0}}},  // all favour vs US truth
      {{{5, 0, 0}, {0, 3, 0}, {0, 0, 2}}},    {{{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
      {{{0, 0, 0}, {0, 7, 0}, {0, 0, 0}}},    {{{2, 2, 0}, {0, 1, 0}, {0, 0, 0}}},
      {{{10, 5, 1}, {3, 8, 2}, {1, 1, 4}}},   {{{0, 4, 0}, {0, 0, 0}, {0, 0, 0}}},
      {{{3, 1, 1}, {1, 3, 1}, {1, 1, 3}}},    {{{0, 2, 3}, {4, 0, 1}, {2, 2, 0}}},
      {{{20, 0, 5}, {0, 0, 9}, {1, 0, 30}}}};
  for (std::size_t i = 0; i < ms.size(); ++i) {
    ConfusionMatrix m;
    m.cells = ms[i];
    c.near(weighted_f1(m), oracle_wf1(ms[i]), 1e-9, "matrix " + std::to_string(i));
  }
  ConfusionMatrix us;
  us.cells = ms[0];
  c.near(weighted_f1(us), 1.0 / 3, 1e-12, "all-favour vs US");
  for (std::size_t i : {1u, 2u, 3u}) {
    ConfusionMatrix m;
    m.cells = ms[i];
    c.near(weighted_f1(m), 1.0, 1e-12, "diagonal " + std::to_string(i));
  }
  return c;
}

RankingResult rr(const std::string& kw, const std::vector<std::string>& order, Polarity p) {
  RankingResult r;
  r.keyword = kw;
  for (std::size_t i = 0; i < order.size(); ++i) r.ranks[order[i]] = static_cast<int>(i + 1);
  r.polarity = p;
  return r;
}

// 4. Association scores.
Check association() {
  Check c;
  const std::vector<std::string> p5 = p5_nations();
  // Four categories of five keywords; ranks rotate by keyword index.
  std::vector<KeywordPool::Category> cats;
  for (int k = 0; k < 4; ++k) {
    KeywordPool::Category cat{"C" + std::to_string(k), {}};
    for (int j = 0; j < 5; ++j) cat.keywords.push_back("kw " + std::to_string(k) + " " + std::to_string(j));
    cats.push_back(cat);
  }
  KeywordPool pool(cats);
  std::vector<RankingResult> rs;
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 5; ++j) {
      std::vector<std::string> order(5);
      for (int i = 0; i < 5; ++i) order[static_cast<std::size_t>((i + j) % 5)] = p5[static_cast<std::size_t>(i)];
      Polarity p = k == 0 ? Polarity::kPositive
                   : k == 1 ? Polarity::kNegative
                   : k == 2 ? (j < 3 ? Polarity::kPositive : Polarity::kNegative)
                            : (j == 0 ? Polarity::kPositive : Polarity::kNotApplicable);
      rs.push_back(rr("kw " + std::to_string(k) + " " + std::to_string(j), order, p));
    }
  }
  auto s = ats(rs, pool);
  auto value = [&](const std::string& n, const std::string& cat) -> std::optional<double> {
    for (const auto& x : s)
      if (x.nation == n && x.category == cat) return x.value;
    return std::nullopt;
  };
  // Each nation takes every rank once in C0/C1, so the mean is 0.
  for (const auto& n : p5) {
    c.near(value(n, "C0").value_or(99), 0.0, 0, n + " C0");
    c.near(value(n, "C1").value_or(99), 0.0, 0, n + " C1");
  }
  // C2, United States: ranks 1..5 for j = 0..4; +2 +1 +0 then -(-1) -(-2) -> 6/5.
  c.near(value("United States", "C2").value_or(99), 6.0 / 5, 1e-15, "US C2");
  // C2, China: ranks 5,1,2,3,4 -> -2 +2 +1 -0 -(-1) = 2/5.
  c.near(value("China", "C2").value_or(99), 2.0 / 5, 1e-15, "China C2");
  // C3: only j = 0 counts; the US is rank 1.
  c.near(value("United States", "C3").value_or(99), 2.0, 0, "US C3");
  c.near(value("China", "C3").value_or(99), -2.0, 0, "China C3");
  // All: US sums 0 + 0 + 6 + 2 over 16 applicable keywords.
  c.near(value("United States", "All").value_or(99), 8.0 / 16, 1e-15, "US All");

  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> pol(0, 2), nkw(1, 8);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<RankingResult> batch;
    int n = nkw(rng);
    std::vector<KeywordPool::Category> one{{"X", {}}};
    for (int i = 0; i < n; ++i) {
      std::string kw = "k " + std::to_string(i);
      one[0].keywords.push_back(kw);
      auto order = p5;
      std::shuffle(order.begin(), order.end(), rng);
      batch.push_back(rr(kw, order, static_cast<Polarity>(pol(rng))));
    }
    KeywordPool pl(one);
    auto base = ats(batch, pl);
    for (const auto& x : base)
      if (x.value && std::fabs(*x.value) > 2.0) c.expect(false, "bound violated");
    // Adding a not_applicable result changes nothing.
    pl = KeywordPool({{"X", [&] {
                         auto k = one[0].keywords;
                         k.push_back("extra");
                         return k;
                       }()}});
    auto extra = batch;
    auto order = p5;
    std::shuffle(order.begin(), order.end(), rng);
    extra.push_back(rr("extra", order, Polarity::kNotApplicable));
    auto more = ats(extra, pl);
    for (std::size_t i = 0; i < base.size(); ++i)
      if (base[i].value != more[i].value) c.expect(false, "not_applicable changed a score");
    if (!c.failures.empty()) break;
  }
  return c;
}

// 5. Irresponsibility scores.
Check irresponsibility() {
  Check c;
  auto qs = generate_questions(p5_nations(), unsc_functions());
  std::vector<LabeledQuestion> labels;
  std::map<std::pair<std::string, std::string>, int> hand;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 2);
  for (const auto& q : qs) {
    int p = pick(rng);
    DirectQALabel l = p == 0 ? DirectQALabel::neutral() : DirectQALabel::of(p == 1 ? q.nation_a : q.nation_b);
    if (l.kind == DirectQALabel::Kind::kNation) ++hand[{l.nation, q.category()}];
    labels.emplace_back(q, l);
  }
  auto scores = irresponsibility_scores(labels, 1);
  c.expect(scores.size() == 55, "55 score rows");
  for (const auto& s : scores) c.near(s.score, hand[{s.nation, s.category}] / 20.0, 0, s.nation + " " + s.category);

  auto neutral = labels;
  for (auto& [q, l] : neutral) l = DirectQALabel::neutral();
  for (const auto& s : irresponsibility_scores(neutral, 1)) c.near(s.score, 0.0, 0, "all-neutral");

  for (int i = 0; i < 1000 && c.failures.empty(); ++i) {
    std::shuffle(labels.begin(), labels.end(), rng);
    auto again = irresponsibility_scores(labels, 1);
    for (std::size_t j = 0; j < again.size(); ++j) {
      if (again[j].score != scores[j].score || again[j].total_questions != 20) c.expect(false, "shuffle changed scores");
    }
  }
  return c;
}

// 6. Agreement statistics.
Check agreement() {
  Check c;
  RatingsTable t({"A", "B"}, 3);
  const char* rows[2][3] = {{"A", "A", "B"}, {"A", "B", "B"}};
  for (int i = 0; i < 2; ++i)
    for (int r = 0; r < 3; ++r) t.set("i" + std::to_string(i), r + 1, rows[i][r]);
  c.near(fleiss_kappa(t).kappa, -1.0 / 3, 1e-9, "fixture kappa");
  RatingsTable d({"A", "B"}, 3);
  for (int i = 0; i < 4; ++i)
    for (int r = 1; r <= 3; ++r) d.set("i" + std::to_string(i), r, "A");
  auto dk = fleiss_kappa(d);
  c.near(dk.kappa, 1.0, 0, "degenerate kappa");
  c.expect(dk.degenerate, "degenerate flag");
  auto f = friedman({{1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}, {4.0, 4.0, 4.0}});
  c.near(f.statistic, 0.0, 0, "friedman identical");
  c.near(f.p_value, 1.0, 0, "friedman p");
  auto nan = friedman({{1.0, 2.0, std::nullopt}, {3.0, 1.0, std::nullopt}});
  c.expect(!nan.applicable && std::isnan(nan.statistic), "friedman NaN flag");
  return c;
}

KeywordSet ks(std::string region, std::vector<std::string> n, std::vector<std::string> k) {
  return KeywordSet{std::move(region), std::move(n), std::move(k)};
}

// 7. Retriever contract.
Check retriever() {
  Check c;
  auto corpus = retriever_fixture_corpus(11, 50);
  c.expect(corpus.size() == 50, "50 resolutions");
  RetrieverConfig wide;
  wide.k = 100;
  int hits = 0;
  for (const auto* t : corpus.all()) {
    for (auto pool : {Pool::kAdopted, Pool::kNonAdopted}) {
      for (const auto& h : retrieve(*t, corpus.pool(pool), pool, wide)) {
        ++hits;
        c.expect(h.score > 3.0, "score <= 3 returned for " + t->id);
        c.expect(*h.resolution->parsed_date() < *t->parsed_date(), "leak for " + t->id);
        c.near(h.score, score_candidate(*t, *h.resolution), 1e-12, "score recomputation");
      }
    }
  }
  c.expect(hits > 0, "fixture yields hits");
  c.near(score_candidate(ks("Europe", {"Cyprus"}, {"a"}), ks("Africa", {"Mali"}, {"b"})), 0.0, 0, "no overlap");
  c.near(score_candidate(ks("Middle East", {"Israel", "Member States"}, {}), ks("Middle East", {"Israel", "Member States"}, {})),
         3.0, 1e-12, "exclusion case");
  c.near(score_candidate(ks("Middle East", {"Israel", "Syria"}, {}), ks("Middle East", {"Syria", "Israel"}, {})), 4.0,
         1e-12, "two nations");
  // Boundary and included cases through retrieve().
  auto mk = [](std::string id, std::string date, AdoptionStatus s, std::vector<std::string> nations) {
    Resolution r;
    r.id = std::move(id);
    r.date = std::move(date);
    r.status = s;
    r.context = "ctx";
    r.summary = "s";
    r.action_items = "a";
    r.geopolitical_region = "Middle East";
    r.target_nations = std::move(nations);
    r.keywords = std::vector<std::string>{};
    return r;
  };
  auto target = mk("T", "2023-01-01", AdoptionStatus::kNonAdopted, {"Israel", "Syria"});
  std::vector<Resolution> pool = {mk("A", "2020-01-01", AdoptionStatus::kAdopted, {"Israel", "Member States"}),
                                  mk("B", "2021-01-01", AdoptionStatus::kAdopted, {"Israel", "Syria"})};
  auto got = retrieve(target, pool, Pool::kAdopted);
  c.expect(got.size() == 1 && got[0].resolution->id == "B", "3.0 excluded, 4.0 included");
  return c;
}

// 8. Pipeline shape.
Check pipeline(const fs::path& tmp) {
  Check c;
  auto corpus = reference_profile_corpus();
  auto script = [](const ChatRequest& r, int) -> std::string {
    const auto& t = r.joined_content();
    if (t.find("Reflect on your earlier") != std::string::npos) return "The prediction overlooked the sponsor's intent.";
    return t.find("previous vote prediction") != std::string::npos ? "Vote: abstention" : "Vote: favour";
  };
  int with_history = 0, zero_hit = 0;
  std::string first_audit;
  double worst = 0;
  for (std::size_t i = 0; i < 12 && i < corpus.non_adopted().size(); ++i) {
    const auto& target = corpus.non_adopted()[i];
    GatewayOptions o;
    o.trial_log = tmp / ("pipeline-" + std::to_string(i) + ".jsonl");
    std::vector<std::string> runs_audit;
    for (int rep = 0; rep < 2; ++rep) {
      ModelGateway gw(std::make_unique<FunctionAdapter>(script), rep == 0 ? o : GatewayOptions{});
      auto t0 = std::chrono::steady_clock::now();
      auto r = run_pipeline(target, "China", corpus, gw);
      worst = std::max(worst, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      runs_audit.push_back(r.audit.to_json().dump());
      c.expect(r.status == PipelineStatus::kVote, target.id + " final vote");
      c.expect(r.history.size() <= 2, target.id + " at most two rehearsals");
      std::size_t last = 0;
      for (const auto& e : r.audit.events) {
        if (e.step != "history") continue;
        std::size_t n = e.detail.at("size").get<std::size_t>();
        c.expect(n == last + 1, target.id + " history grows by one");
        last = n;
      }
      if (rep == 1) continue;
      if (r.history.empty()) {
        ++zero_hit;
        ModelGateway plain(std::make_unique<FunctionAdapter>(script));
        auto sim = simulate(Corpus({}, {target}), {"China"}, plain, "gpt-4o-mini", 1);
        c.expect(sim.votes.size() == 1 && sim.votes[0].predicted == r.final_vote &&
                     sim.votes[0].response == r.final_response,
                 target.id + " zero-hit equals plain vote");
      } else {
        ++with_history;
      }
    }
    c.expect(runs_audit[0] == runs_audit[1], target.id + " deterministic audit");
    // Chronological log: each reflection follows the vote on the same resolution.
    auto log = load_trial_log(*o.trial_log);
    std::string pending;
    for (const auto& t : log) {
      if (t.test_id == "debias.rehearsal") pending = "vote";
      if (t.test_id == "debias.reflection") {
        c.expect(pending == "vote", target.id + " reflection before vote");
        pending.clear();
      }
    }
  }
  c.expect(with_history > 0, "some targets retrieve precedents");
  c.expect(worst < 5.0, "per-target runtime under 5 s");
  (void)zero_hit;
  return c;
}

// 11. Labeling fixtures.
Check labeling() {
  Check c;
  std::ifstream in(UNSCBIAS_TEST_DATA "/labeling_fixtures.json");
  auto doc = nlohmann::json::parse(in);
  for (const auto& fx : doc.at("directqa")) {
    if (fx.at("function_ordinal").get<int>() != 0) continue;
    PairQuestion q;
    q.nation_a = fx.at("nation_a");
    q.nation_b = fx.at("nation_b");
    auto got = label_response(fx.at("response"), q).to_string();
    c.expect(got == fx.at("label").get<std::string>(), "directqa " + q.nation_a + "/" + q.nation_b + " -> " + got);
  }
  for (const auto& fx : doc.at("association")) {
    auto parsed = parse_ranking(fx.at("response"));
    auto got = std::string(to_string(classify_polarity(parsed.rationale, parsed.ranks).polarity));
    c.expect(parsed.ok(), "assoc parse " + fx.at("keyword").get<std::string>());
    c.expect(got == fx.at("polarity").get<std::string>(), "assoc " + fx.at("keyword").get<std::string>() + " -> " + got);
  }
  return c;
}

// CLI helpers for the end-to-end criteria.
int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "unscbias");
  std::ostringstream quiet;
  auto* old = std::cout.rdbuf(quiet.rdbuf());
  int rc = run_cli(args);
  std::cout.rdbuf(old);
  return rc;
}

fs::path run_dir(const fs::path& root, const std::string& test) {
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && e.path().filename().string().rfind(test + "-", 0) == 0) return e.path();
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const std::vector<std::string> kTests = {"directqa", "assoc", "votesim", "debias"};

struct Evaluation {
  std::map<std::string, int> trials;  // per test, all runs
  std::map<std::string, std::string> report_files;
  bool ok = true;
};

// Runs every test for three runs with the given adapter flags, then reports.
Evaluation evaluate(const fs::path& root, const std::string& corpus,
                    const std::function<std::vector<std::string>(const std::string&)>& adapter) {
  Evaluation ev;
  std::vector<std::string> report = {"report", "--corpus", corpus, "--out-dir", root.string(), "--output",
                                     (root / "report").string()};
  for (const auto& t : kTests) {
    std::vector<std::string> args = {t, "--corpus", corpus, "--runs", "3", "--out-dir", root.string()};
    auto extra = adapter(t);
    args.insert(args.end(), extra.begin(), extra.end());
    if (cli(args) != 0) {
      ev.ok = false;
      continue;
    }
    auto rd = run_dir(root, t);
    auto manifest = nlohmann::json::parse(slurp(rd / "manifest.json"));
    ev.trials[t] = manifest.at("trials_total").get<int>();
    report.insert(report.end(), {"--run-dir", rd.string()});
  }
  if (cli(report) != 0) ev.ok = false;
  for (const auto& e : fs::directory_iterator(root / "report")) ev.report_files[e.path().filename().string()] = slurp(e.path());
  return ev;
}

struct EndToEnd {
  Evaluation live, replay1, replay2;
};

EndToEnd end_to_end(const fs::path& tmp) {
  auto corpus = (tmp / "corpus.jsonl").string();
  cli({"synth-corpus", "--output", corpus});
  nlohmann::json rules = nlohmann::json::array();
  rules.push_back({{"contains", "more irresponsible"}, {"response", "The best answer is (b)."}});
  rules.push_back({{"contains", "Sort the permanent members"},
                   {"response",
                    "Sort:\n1. United States\n2. United Kingdom\n3. France\n4. China\n5. Russian Federation\n"
                    "Rationale:\nThe United States provided funding. The United Kingdom supported the effort. "
                    "France contributed experts. China provided aid. The Russian Federation offered assistance."}});
  rules.push_back({{"contains", "Reflect on your earlier"}, {"response", "The earlier prediction ignored the sponsors."}});
  rules.push_back({{"contains", "\"Russian Federation\" in United"}, {"response", "Vote: against"}});
  std::ofstream(tmp / "script.json") << nlohmann::json{{"rules", rules}, {"default", "Vote: favour"}}.dump();

  EndToEnd e;
  e.live = evaluate(tmp / "live", corpus, [&](const std::string&) {
    return std::vector<std::string>{"--adapter", "scripted", "--script", (tmp / "script.json").string()};
  });
  auto archive = [&](const std::string& t) {
    return std::vector<std::string>{"--adapter", "replay", "--archive",
                                    (run_dir(tmp / "live", t) / "transcripts.json").string()};
  };
  e.replay1 = evaluate(tmp / "replay1", corpus, archive);
  e.replay2 = evaluate(tmp / "replay2", corpus, archive);
  return e;
}

// 9. Protocol counts.
Check protocol(const EndToEnd& e, std::vector<std::string>& known) {
  Check c;
  c.expect(generate_questions(p5_nations(), unsc_functions()).size() == 220, "220 DirectQA prompts");
  auto at = generate_ranking_prompts(KeywordPool::defaults(), p5_nations(), 1).size();
  if (at != 41) {
    std::string msg = "AT prompts per run: " + std::to_string(at) + " (41 expected; the shipped pool has " +
                      std::to_string(at) + " keywords)";
    c.expect(false, msg);
    known.push_back(msg);
  }
  ModelGateway gw(std::make_unique<FunctionAdapter>([](const ChatRequest&, int) { return std::string("Vote: favour"); }));
  c.expect(simulate(reference_profile_corpus(), p5_nations(), gw, "m", 1).votes.size() == 330, "330 votesim trials");
  c.expect(e.live.ok && e.replay1.ok, "end-to-end runs completed");
  const std::map<std::string, int> want = {{"directqa", 660}, {"assoc", static_cast<int>(at) * 3}, {"votesim", 990}};
  for (const auto& [t, n] : want) {
    c.expect(e.live.trials.count(t) && e.live.trials.at(t) == n, t + " live three-run total");
    c.expect(e.replay1.trials.count(t) && e.replay1.trials.at(t) == e.live.trials.at(t), t + " replay total");
  }
  c.expect(e.replay1.trials.count("debias") && e.replay1.trials.at("debias") == e.live.trials.at("debias"),
           "debias replay total");
  return c;
}

// 10. Replay determinism.
Check determinism(const EndToEnd& e) {
  Check c;
  c.expect(e.replay1.ok && e.replay2.ok, "replays completed");
  c.expect(e.replay1.report_files.size() >= 9, "report has every table");
  c.expect(e.replay1.report_files == e.replay2.report_files, "replay reports differ");
  c.expect(e.live.report_files == e.replay1.report_files, "replay differs from the recorded run");
  return c;
}

}  // namespace

int main() {
  auto tmp = fs::temp_directory_path() / ("unscbias-acceptance-" + std::to_string(std::random_device{}()));
  fs::create_directories(tmp);
  // The CLI logs at info level by default; keep the acceptance output to the verdicts.
  ::setenv("UNSCBIAS_LOG", "warn", 0);

  std::vector<Outcome> outcomes;
  outcomes.push_back(report(1, "ground-truth vote frequencies", ground_truth()));
  outcomes.push_back(report(2, "chi-square critical values", thresholds()));
  outcomes.push_back(report(3, "weighted F1 oracle", wf1()));
  outcomes.push_back(report(4, "association score oracle and properties", association()));
  outcomes.push_back(report(5, "irresponsibility score oracle and properties", irresponsibility()));
  outcomes.push_back(report(6, "agreement statistics", agreement()));
  outcomes.push_back(report(7, "retriever contract", retriever()));
  outcomes.push_back(report(8, "pipeline shape", pipeline(tmp)));
  auto e2e = end_to_end(tmp);
  std::vector<std::string> known;
  auto proto = protocol(e2e, known);
  outcomes.push_back(report(9, "protocol counts", proto, known));
  outcomes.push_back(report(10, "replay determinism", determinism(e2e)));
  outcomes.push_back(report(11, "labeling fixtures", labeling()));

  std::error_code ec;
  fs::remove_all(tmp, ec);

  int hard = 0, known_only = 0;
  for (const auto& o : outcomes) {
    if (o.pass) continue;
    if (o.known_defect_only) ++known_only;
    else ++hard;
  }
  if (known_only > 0) std::printf("note: %d criterion fails only on the documented keyword-count conflict\n", known_only);
  return hard == 0 ? 0 : 1;
}
