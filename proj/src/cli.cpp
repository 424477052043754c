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

#include "unscbias/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "unscbias/association.hpp"
#include "unscbias/augment.hpp"
#include "unscbias/corpus.hpp"
#include "unscbias/debias.hpp"
#include "unscbias/directqa.hpp"
#include "unscbias/gateway.hpp"
#include "unscbias/keywords.hpp"
#include "unscbias/report.hpp"
#include "unscbias/stats.hpp"
#include "unscbias/synthetic_corpus.hpp"
#include "unscbias/text.hpp"
#include "unscbias/unsc_functions.hpp"
#include "unscbias/votesim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace unscbias {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

// Input problems the user can fix; reported through error.json.
class InvalidInput : public std::runtime_error {
 public:
  InvalidInput(std::string kind, const std::string& what, json details = json::object())
      : std::runtime_error(what), kind_(std::move(kind)), details_(std::move(details)) {}
  const std::string& kind() const { return kind_; }
  const json& details() const { return details_; }

 private:
  std::string kind_;
  json details_;
};

struct Flags {
  std::string config_path;
  std::string adapter;
  std::string archive;
  std::string script;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "runs";
  bool resume = false;
  std::string model;
  std::optional<std::size_t> concurrency;
  std::string corpus;
  std::string pool;

  // per command
  std::string output;
  std::string categories;
  int min_count = 200;
  std::string test;
  std::vector<std::string> run_dirs;
  std::string fixture = "reference";
  bool no_reflection = false;
  std::optional<int> k;
};

// Effective settings after merging the config file and the flags.
struct Settings {
  json adapter = json::object();
  std::string model = "gpt-4o-mini";
  int runs = 3;
  std::uint64_t seed = 0;
  std::size_t concurrency = 4;
  std::string corpus;
  std::string pool;
  std::vector<std::string> personas = p5_nations();
  RetrieverConfig retriever;
  bool reflection = true;
};

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidInput("config", "cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config", p.string() + ": " + e.what());
  }
}

Settings resolve(const Flags& f) {
  Settings s;
  if (!f.config_path.empty()) {
    json c = read_json_file(f.config_path);
    try {
      s.adapter = c.value("adapter", json::object());
      s.model = c.value("model", s.model);
      s.runs = c.value("runs", s.runs);
      s.seed = c.value("seed", s.seed);
      s.concurrency = c.value("concurrency", s.concurrency);
      s.corpus = c.value("corpus", s.corpus);
      s.pool = c.value("keyword_pool", s.pool);
      s.personas = c.value("personas", s.personas);
      if (c.contains("retriever")) s.retriever = RetrieverConfig::from_json(c.at("retriever"));
      s.reflection = c.value("reflection", s.reflection);
    } catch (const json::exception& e) {
      throw InvalidInput("config", f.config_path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw InvalidInput("config", f.config_path + ": " + e.what());
    }
    // Relative paths in the config resolve against the config's directory.
    auto base = fs::path(f.config_path).parent_path();
    auto rebase = [&](std::string& p) {
      if (!p.empty() && fs::path(p).is_relative()) p = (base / p).string();
    };
    rebase(s.corpus);
    rebase(s.pool);
    for (const char* key : {"archive", "script"}) {
      if (s.adapter.contains(key)) {
        auto p = s.adapter[key].get<std::string>();
        rebase(p);
        s.adapter[key] = p;
      }
    }
  }
  if (!f.adapter.empty()) s.adapter["kind"] = f.adapter;
  if (!f.archive.empty()) s.adapter["archive"] = f.archive;
  if (!f.script.empty()) s.adapter["script"] = f.script;
  if (f.runs) s.runs = *f.runs;
  if (f.seed) s.seed = *f.seed;
  if (!f.model.empty()) s.model = f.model;
  if (f.concurrency) s.concurrency = *f.concurrency;
  if (!f.corpus.empty()) s.corpus = f.corpus;
  if (!f.pool.empty()) s.pool = f.pool;
  if (f.k) s.retriever.k = *f.k;
  if (f.no_reflection) s.reflection = false;
  if (s.runs < 1) throw InvalidInput("config", "runs must be >= 1");
  for (const auto& p : s.personas) {
    if (!is_p5(p)) throw InvalidInput("config", "persona '" + p + "' is not a permanent member");
  }
  return s;
}

Corpus load_valid_corpus(const Settings& s) {
  if (s.corpus.empty()) throw InvalidInput("corpus", "no corpus given (--corpus or \"corpus\" in the config)");
  CorpusLoadResult r;
  try {
    r = load_corpus(s.corpus);
  } catch (const CorpusError& e) {
    throw InvalidInput("corpus", e.what());
  }
  if (!r.ok()) {
    json v = json::array();
    for (const auto& x : r.violations) {
      v.push_back({{"resolution_id", x.resolution_id}, {"field", x.field}, {"rule", x.rule}, {"line", x.line}});
    }
    throw InvalidInput("corpus", std::to_string(r.violations.size()) + " invalid records in " + s.corpus,
                       {{"violations", v}});
  }
  return std::move(r.corpus);
}

KeywordPool load_pool(const Settings& s) {
  if (s.pool.empty()) return KeywordPool::defaults();
  try {
    return KeywordPool::load(s.pool);
  } catch (const std::exception& e) {
    throw InvalidInput("keyword_pool", e.what());
  }
}

std::unique_ptr<ChatAdapter> make_adapter(json cfg) {
  if (!cfg.contains("kind")) throw InvalidInput("adapter", "no adapter given (--adapter or \"adapter\" in the config)");
  try {
    // Scripted rules may live in their own file.
    if (cfg.value("kind", "") == "scripted" && cfg.contains("script")) {
      json rules = read_json_file(cfg.at("script").get<std::string>());
      rules["kind"] = "scripted";
      return configure_adapter(rules);
    }
    return configure_adapter(cfg);
  } catch (const ConfigError& e) {
    throw InvalidInput("adapter", e.what());
  } catch (const TranscriptError& e) {
    throw InvalidInput("adapter", e.what(), {{"offset", e.offset()}});
  }
}

// A run directory holds everything one evaluation produced.
struct RunDir {
  fs::path root;
  json manifest;
  std::string started_at;

  fs::path results() const { return root / "results"; }
  fs::path cache() const { return root / "cache"; }
};

json config_snapshot(const std::string& test, const Settings& s, const std::string& corpus_digest,
                     const std::string& pool_digest) {
  json adapter = redacted_adapter_config(s.adapter);
  json snap = {{"test", test},
               {"adapter", adapter},
               {"model", s.model},
               {"temperature", 0.0},
               {"runs", s.runs},
               {"seed", s.seed},
               {"concurrency", s.concurrency},
               {"corpus_digest", corpus_digest},
               {"keyword_pool_digest", pool_digest},
               {"personas", s.personas}};
  if (test == "debias") {
    snap["retriever"] = s.retriever.to_json();
    snap["reflection"] = s.reflection;
  }
  return snap;
}

// Keyed by the settings that change results; the concurrency limit and file
// locations do not.
std::string run_key(const json& snapshot) {
  json k = snapshot;
  k.erase("concurrency");
  k["adapter"].erase("archive");
  k["adapter"].erase("script");
  return sha256_hex(k.dump()).substr(0, 16);
}

RunDir open_run_dir(const Flags& f, const json& snapshot) {
  RunDir rd;
  rd.root = fs::path(f.out_dir) / (snapshot.at("test").get<std::string>() + "-" + run_key(snapshot));
  if (fs::exists(rd.root / "manifest.json") && !f.resume) {
    throw InvalidInput("run_dir", rd.root.string() + " already holds a run; pass --resume to continue it");
  }
  fs::create_directories(rd.root);
  rd.manifest = {{"schema", "unscbias/manifest@1"}, {"config", snapshot}, {"config_digest", run_key(snapshot)}};
  rd.started_at = utc_timestamp();
  return rd;
}

void finish_run_dir(RunDir& rd, const ModelGateway& gw, const ResultsStore& store) {
  store.save(rd.results());
  auto trials = gw.trials();
  record_transcripts(trials, rd.root / "transcripts.json");
  std::map<std::string, std::map<std::string, int>> counts;
  for (const auto& t : trials) ++counts[t.test_id]["r" + std::to_string(t.run_index)];
  rd.manifest["started_at"] = rd.started_at;
  rd.manifest["finished_at"] = utc_timestamp();
  rd.manifest["trial_counts"] = counts;
  rd.manifest["trials_total"] = trials.size();
  rd.manifest["cache_hit_ratio"] =
      trials.empty() ? 0.0 : static_cast<double>(gw.cache_hits()) / static_cast<double>(trials.size());
  write_file_atomic(rd.root / "manifest.json", rd.manifest.dump(2) + "\n");
}

std::unique_ptr<ModelGateway> make_gateway(const Settings& s, const RunDir& rd) {
  GatewayOptions o;
  o.concurrency = s.concurrency;
  o.runs = s.runs;
  o.cache_dir = rd.cache();
  o.trial_log = rd.root / "trials.jsonl";
  return std::make_unique<ModelGateway>(make_adapter(s.adapter), o);
}

std::string safe_name(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  }
  return s;
}

int cmd_ingest(const Flags& f) {
  auto s = resolve(f);
  auto corpus = load_valid_corpus(s);
  std::cout << "corpus " << s.corpus << ": " << corpus.adopted().size() << " adopted, " << corpus.non_adopted().size()
            << " non-adopted, digest " << corpus_digest(corpus) << "\n";
  return kExitOk;
}

int cmd_keywords(const Flags& f) {
  auto s = resolve(f);
  auto corpus = load_valid_corpus(s);
  CandidateOptions opts;
  opts.min_count = f.min_count;
  auto cands = build_keyword_candidates(corpus, opts);
  fs::create_directories(f.out_dir);
  std::string tsv = "# schema: unscbias/keyword-candidates@1\nphrase\tcount\n";
  for (const auto& c : cands) tsv += c.text + "\t" + std::to_string(c.count) + "\n";
  write_file_atomic(fs::path(f.out_dir) / "keyword_candidates.tsv", tsv);
  std::cout << cands.size() << " keyword candidates\n";
  if (!f.categories.empty()) {
    auto res = assign_categories(cands, read_json_file(f.categories));
    write_file_atomic(fs::path(f.out_dir) / "keyword_pool.json", res.pool.to_json().dump(2) + "\n");
    std::cout << res.pool.keyword_count() << " keywords in " << res.pool.categories().size() << " categories, "
              << res.unassigned.size() << " unassigned, " << res.missing.size() << " missing\n";
  }
  return kExitOk;
}

int cmd_augment(const Flags& f) {
  auto s = resolve(f);
  if (f.output.empty()) throw InvalidInput("usage", "augment needs --output");
  auto corpus = load_valid_corpus(s);
  auto snap = config_snapshot("augment", s, corpus_digest(corpus), "");
  auto rd = open_run_dir(f, snap);
  auto gw = make_gateway(s, rd);
  AugmentTemplates t;
  t.model_id = s.model;

  auto augment_pool = [&](const std::vector<Resolution>& in, json& failures) {
    std::vector<Resolution> out(in.size());
    std::vector<std::string> errors(in.size());
    parallel_for(in.size(), s.concurrency, [&](std::size_t i) {
      try {
        out[i] = augment_resolution(in[i], *gw, t, 1);
      } catch (const std::exception& e) {
        out[i] = in[i];
        errors[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (!errors[i].empty()) failures.push_back({{"resolution_id", in[i].id}, {"error", errors[i]}});
    }
    return out;
  };
  json failures = json::array();
  Corpus out(augment_pool(corpus.adopted(), failures), augment_pool(corpus.non_adopted(), failures));
  write_corpus(out, f.output);
  finish_run_dir(rd, *gw, {});
  write_file_atomic(rd.root / "augment_failures.json", failures.dump(2) + "\n");
  std::cout << "augmented corpus written to " << f.output << " (" << failures.size() << " failures)\n";
  return failures.empty() ? kExitOk : kExitRuntime;
}

int cmd_directqa(const Flags& f) {
  auto s = resolve(f);
  auto snap = config_snapshot("directqa", s, "", "");
  auto rd = open_run_dir(f, snap);
  auto gw = make_gateway(s, rd);
  auto questions = generate_questions(p5_nations(), unsc_functions());
  ResultsStore store;
  for (int run = 1; run <= s.runs; ++run) store.directqa[run] = run_directqa(questions, *gw, s.model, run);
  finish_run_dir(rd, *gw, store);
  std::cout << "directqa: " << questions.size() << " questions x " << s.runs << " runs -> " << rd.root.string()
            << "\n";
  return kExitOk;
}

int cmd_assoc(const Flags& f) {
  auto s = resolve(f);
  auto pool = load_pool(s);
  auto snap = config_snapshot("assoc", s, "", pool.digest());
  auto rd = open_run_dir(f, snap);
  auto gw = make_gateway(s, rd);
  auto prompts = generate_ranking_prompts(pool, p5_nations(), s.seed);
  ResultsStore store;
  for (int run = 1; run <= s.runs; ++run) store.assoc[run] = run_association(prompts, *gw, s.model, run);
  finish_run_dir(rd, *gw, store);
  std::cout << "assoc: " << prompts.size() << " prompts x " << s.runs << " runs -> " << rd.root.string() << "\n";
  return kExitOk;
}

int cmd_votesim(const Flags& f) {
  auto s = resolve(f);
  auto corpus = load_valid_corpus(s);
  auto snap = config_snapshot("votesim", s, corpus_digest(corpus), "");
  auto rd = open_run_dir(f, snap);
  auto gw = make_gateway(s, rd);
  ResultsStore store;
  std::size_t trials = 0, failed = 0;
  for (int run = 1; run <= s.runs; ++run) {
    auto r = simulate(corpus, s.personas, *gw, s.model, run);
    trials += r.votes.size();
    failed += r.failed.size();
    store.votesim[run] = std::move(r.votes);
  }
  finish_run_dir(rd, *gw, store);
  std::cout << "votesim: " << trials << " trials, " << failed << " failed -> " << rd.root.string() << "\n";
  return failed ? kExitRuntime : kExitOk;
}

int cmd_debias(const Flags& f) {
  auto s = resolve(f);
  auto corpus = load_valid_corpus(s);
  auto snap = config_snapshot("debias", s, corpus_digest(corpus), "");
  auto rd = open_run_dir(f, snap);
  auto gw = make_gateway(s, rd);
  fs::create_directories(rd.root / "audit");

  struct Job {
    const Resolution* res;
    std::string nation;
  };
  std::vector<Job> jobs;
  for (const auto& r : corpus.non_adopted()) {
    for (const auto& n : s.personas) {
      if (r.vote_of(n)) jobs.push_back({&r, n});
    }
  }
  ResultsStore store;
  std::size_t aborted = 0, rejected = 0;
  for (int run = 1; run <= s.runs; ++run) {
    PipelineOptions po;
    po.model_id = s.model;
    po.run_index = run;
    po.reflection = s.reflection;
    std::vector<std::optional<PipelineResult>> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    parallel_for(jobs.size(), s.concurrency, [&](std::size_t i) {
      try {
        results[i] = run_pipeline(*jobs[i].res, jobs[i].nation, corpus, *gw, s.retriever, po);
      } catch (const std::invalid_argument& e) {
        errors[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (!results[i]) {
        ++rejected;
        spdlog::warn("debias skipped {} / {}: {}", jobs[i].res->id, jobs[i].nation, errors[i]);
        continue;
      }
      const auto& pr = *results[i];
      json audit = {{"resolution_id", pr.resolution_id},
                    {"nation", pr.nation},
                    {"run_index", run},
                    {"status", to_string(pr.status)},
                    {"events", pr.audit.to_json()}};
      write_file_atomic(rd.root / "audit" / (safe_name(pr.resolution_id + "__" + pr.nation) + "__r" +
                                             std::to_string(run) + ".json"),
                        audit.dump(1) + "\n");
      if (pr.status == PipelineStatus::kAborted) {
        ++aborted;
        continue;
      }
      store.debias[run].push_back(to_sim_vote(pr, run));
    }
  }
  finish_run_dir(rd, *gw, store);
  std::cout << "debias: " << jobs.size() << " pipelines x " << s.runs << " runs, " << aborted << " aborted, "
            << rejected << " rejected -> " << rd.root.string() << "\n";
  return aborted || rejected ? kExitRuntime : kExitOk;
}

ResultsStore merge_stores(const std::vector<std::string>& dirs) {
  ResultsStore all;
  for (const auto& d : dirs) {
    if (!fs::is_directory(d)) throw InvalidInput("run_dir", d + " is not a directory");
    auto s = ResultsStore::load(fs::path(d) / "results");
    all.directqa.merge(s.directqa);
    all.assoc.merge(s.assoc);
    all.votesim.merge(s.votesim);
    all.debias.merge(s.debias);
  }
  return all;
}

int cmd_stats(const Flags& f) {
  auto s = resolve(f);
  if (f.run_dirs.empty()) throw InvalidInput("usage", "stats needs --run-dir");
  auto store = merge_stores(f.run_dirs);
  std::optional<Corpus> corpus;
  if (!s.corpus.empty()) corpus = load_valid_corpus(s);
  auto pool = load_pool(s);
  ReportInputs in{corpus ? &*corpus : nullptr, &pool, p5_nations()};
  // Keep only the requested test so the report covers just that suite.
  ResultsStore only;
  if (f.test == "directqa") only.directqa = store.directqa;
  else if (f.test == "assoc") only.assoc = store.assoc;
  else if (f.test == "votesim") only.votesim = store.votesim;
  else if (f.test == "debias") only.debias = store.debias;
  else throw InvalidInput("usage", "unknown --test '" + f.test + "'");
  auto bundle = emit_reports(only, in);
  json out = {{"schema", "unscbias/stats@1"}, {"test", f.test}, {"gaps", bundle.gaps}};
  out["agreement"] = bundle.summary.value("agreement", json::array());
  if (f.test == "assoc") out["friedman"] = bundle.summary.value("friedman", json::array());
  auto text = out.dump(2) + "\n";
  write_file_atomic(fs::path(f.run_dirs.front()) / ("stats-" + f.test + ".json"), text);
  auto it = bundle.files.find(f.test == "assoc" ? "friedman.tsv" : "agreement.tsv");
  std::cout << (it != bundle.files.end() ? it->second : text);
  return kExitOk;
}

int cmd_report(const Flags& f) {
  auto s = resolve(f);
  auto store = merge_stores(f.run_dirs);
  std::optional<Corpus> corpus;
  if (!s.corpus.empty()) corpus = load_valid_corpus(s);
  auto pool = load_pool(s);
  auto bundle = emit_reports(store, ReportInputs{corpus ? &*corpus : nullptr, &pool, p5_nations()});
  fs::path dest = f.output.empty() ? fs::path(f.out_dir) / "report" : fs::path(f.output);
  bundle.write(dest);
  std::cout << bundle.files.size() << " report files in " << dest.string() << ", " << bundle.gaps.size()
            << " gaps\n";
  return kExitOk;
}

int cmd_synth(const Flags& f) {
  if (f.output.empty()) throw InvalidInput("usage", "synth-corpus needs --output");
  std::uint64_t seed = f.seed.value_or(f.fixture == "retriever" ? 11 : 7);
  Corpus c;
  if (f.fixture == "reference") c = reference_profile_corpus(seed);
  else if (f.fixture == "retriever") c = retriever_fixture_corpus(seed);
  else throw InvalidInput("usage", "unknown --fixture '" + f.fixture + "'");
  write_corpus(c, f.output);
  std::cout << "wrote " << c.size() << " resolutions to " << f.output << "\n";
  return kExitOk;
}

void write_error(const Flags& f, const std::string& command, const InvalidInput& e) {
  json err = {{"schema", "unscbias/error@1"},
              {"command", command},
              {"kind", e.kind()},
              {"message", e.what()},
              {"details", e.details()}};
  try {
    fs::create_directories(f.out_dir);
    write_file_atomic(fs::path(f.out_dir) / "error.json", err.dump(2) + "\n");
  } catch (const std::exception& io) {
    spdlog::error("could not write error file: {}", io.what());
  }
}

void init_logging() {
  if (!spdlog::get("unscbias")) {
    auto logger = spdlog::stderr_color_mt("unscbias");
    spdlog::set_default_logger(logger);
  }
  if (const char* lvl = std::getenv("UNSCBIAS_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  init_logging();
  CLI::App app{"Nation-level bias evaluation for language models on Security Council records", "unscbias"};
  app.require_subcommand(1);
  Flags f;

  app.add_option("--config", f.config_path, "JSON configuration file");
  app.add_option("--adapter", f.adapter, "Model adapter: http, replay or scripted")
      ->check(CLI::IsMember({"http", "replay", "scripted"}));
  app.add_option("--archive", f.archive, "Transcript archive for the replay adapter");
  app.add_option("--script", f.script, "Rules file for the scripted adapter");
  app.add_option("--runs", f.runs, "Independent runs per test (default 3)")->check(CLI::PositiveNumber);
  app.add_option("--seed", f.seed, "Seed for nation order shuffles and generated corpora");
  app.add_option("--out-dir", f.out_dir, "Output root (default runs)");
  app.add_flag("--resume", f.resume, "Continue an existing run directory from its cache");
  app.add_option("--model", f.model, "Model id");
  app.add_option("--concurrency", f.concurrency, "Maximum requests in flight")->check(CLI::PositiveNumber);
  app.add_option("--corpus", f.corpus, "Corpus file (JSON lines)");
  app.add_option("--keyword-pool", f.pool, "Keyword pool file");

  auto* ingest = app.add_subcommand("ingest", "Load and validate a corpus");
  auto* keywords = app.add_subcommand("keywords", "Extract keyword candidates from a corpus");
  keywords->add_option("--min-count", f.min_count, "Minimum phrase frequency");
  keywords->add_option("--categories", f.categories, "Category assignment file; writes a keyword pool");
  auto* augment = app.add_subcommand("augment", "Fill summary and keyword fields through the model");
  augment->add_option("--output", f.output, "Augmented corpus path")->required();
  auto* directqa = app.add_subcommand("directqa", "Pairwise irresponsibility questions");
  auto* assoc = app.add_subcommand("assoc", "Keyword association rankings");
  auto* votesim = app.add_subcommand("votesim", "Persona vote simulation on non-adopted drafts");
  auto* debias = app.add_subcommand("debias", "Vote simulation with retrieved rehearsals and reflection");
  debias->add_option("--k", f.k, "Precedents retrieved per pool")->check(CLI::PositiveNumber);
  debias->add_flag("--no-reflection", f.no_reflection, "Rehearse without reflection");
  auto* stats = app.add_subcommand("stats", "Agreement statistics over stored runs");
  stats->add_option("--test", f.test, "directqa, assoc, votesim or debias")->required();
  stats->add_option("--run-dir", f.run_dirs, "Run directory")->required();
  auto* report = app.add_subcommand("report", "Aggregate tables from stored runs");
  report->add_option("--run-dir", f.run_dirs, "Run directories to include");
  report->add_option("--output", f.output, "Report directory (default <out-dir>/report)");
  auto* synth = app.add_subcommand("synth-corpus", "Write a generated corpus");
  synth->add_option("--output", f.output, "Corpus path")->required();
  synth->add_option("--fixture", f.fixture, "reference or retriever");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (*ingest) return cmd_ingest(f);
    if (*keywords) return cmd_keywords(f);
    if (*augment) return cmd_augment(f);
    if (*directqa) return cmd_directqa(f);
    if (*assoc) return cmd_assoc(f);
    if (*votesim) return cmd_votesim(f);
    if (*debias) return cmd_debias(f);
    if (*stats) return cmd_stats(f);
    if (*report) return cmd_report(f);
    if (*synth) return cmd_synth(f);
  } catch (const InvalidInput& e) {
    spdlog::error("{}: {}", command, e.what());
    write_error(f, command, e);
    return kExitInvalid;
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", command, e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args);
}

}  // namespace unscbias
