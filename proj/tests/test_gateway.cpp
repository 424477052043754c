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

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <gtest/gtest.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "test_support.hpp"
#include "unscbias/gateway.hpp"

namespace unscbias {
namespace {

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::unique_ptr<ChatAdapter> counting(std::atomic<int>& calls, std::string reply = "ok") {
  return std::make_unique<FunctionAdapter>([&calls, reply](const ChatRequest&, int) {
    ++calls;
    return reply;
  });
}

TEST(ChatRequest, ValidationAndKey) {
  auto r = ChatRequest::user("m", "hello");
  EXPECT_NO_THROW(r.validate());
  auto bad = r;
  bad.messages.clear();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = r;
  bad.model_id.clear();
  EXPECT_THROW(bad.validate(), std::invalid_argument);

  EXPECT_EQ(cache_key(r, 1), cache_key(r, 1));
  EXPECT_NE(cache_key(r, 1), cache_key(r, 2));
  EXPECT_NE(cache_key(r, 1), cache_key(ChatRequest::user("m", "hello!"), 1));
  EXPECT_EQ(cache_key(r, 1).size(), 64u);
  EXPECT_EQ(chat_request_from_json(to_json(r)), r);
}

TEST(Gateway, SecondIdenticalCallIsACacheHit) {
  std::atomic<int> calls{0};
  ModelGateway gw(counting(calls));
  auto req = ChatRequest::user("m", "same prompt");
  auto a = gw.complete(req, 1, "t");
  auto b = gw.complete(req, 1, "t");
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(calls.load(), 1);
  EXPECT_FALSE(a.record.cache_hit);
  EXPECT_TRUE(b.record.cache_hit);
  EXPECT_EQ(gw.trial_count(), 2u);
  EXPECT_NE(a.record.trial_id, b.record.trial_id);
  // A different run index is a different key.
  gw.complete(req, 2, "t");
  EXPECT_EQ(calls.load(), 2);
}

TEST(Gateway, RunIndexOutOfRange) {
  std::atomic<int> calls{0};
  ModelGateway gw(counting(calls));
  EXPECT_THROW(gw.complete(ChatRequest::user("m", "x"), 0, "t"), std::invalid_argument);
  EXPECT_THROW(gw.complete(ChatRequest::user("m", "x"), 4, "t"), std::invalid_argument);
}

TEST(Gateway, ScriptedRuleMatchesSubstring) {
  ScriptedAdapter::Rule rule;
  rule.contains = {"Vote on the resolution"};
  rule.response = "Vote: against";
  ModelGateway gw(std::make_unique<ScriptedAdapter>(std::vector<ScriptedAdapter::Rule>{rule}));
  EXPECT_EQ(gw.complete(ChatRequest::user("m", "Please Vote on the resolution now"), 1, "t").text, "Vote: against");
  EXPECT_THROW(gw.complete(ChatRequest::user("m", "unrelated"), 1, "t"), GatewayError);
  // The failed call is still logged.
  auto log = gw.trials();
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(std::count_if(log.begin(), log.end(), [](const TrialRecord& t) { return t.error.has_value(); }), 1);
}

TEST(Gateway, ScriptedFromJsonRegexAndDefault) {
  auto a = ScriptedAdapter::from_json(
      {{"rules", {{{"regex", "nation: (France|China)"}, {"response", "Vote: abstention"}}}}, {"default", "Vote: in favour"}});
  ModelGateway gw(std::move(a));
  EXPECT_EQ(gw.complete(ChatRequest::user("m", "nation: China"), 1, "t").text, "Vote: abstention");
  EXPECT_EQ(gw.complete(ChatRequest::user("m", "nation: Chad"), 1, "t").text, "Vote: in favour");
  EXPECT_THROW(ScriptedAdapter::from_json({{"rules", {{{"contains", "x"}}}}}), ConfigError);
}

TEST(Gateway, ReplayMissNamesTheDigest) {
  ModelGateway gw(std::make_unique<ReplayAdapter>(std::map<std::string, std::string>{}));
  auto req = ChatRequest::user("m", "never recorded");
  try {
    gw.complete(req, 1, "t");
    FAIL() << "expected a replay miss";
  } catch (const ReplayMiss& e) {
    EXPECT_EQ(e.digest(), cache_key(req, 1));
    EXPECT_NE(std::string(e.what()).find(cache_key(req, 1)), std::string::npos);
  }
}

TEST(Transcripts, RoundTripReplaysIdenticalResponses) {
  testing::TempDir dir;
  std::atomic<int> calls{0};
  ModelGateway live(std::make_unique<FunctionAdapter>([&](const ChatRequest& r, int run) {
    ++calls;
    return r.messages.back().content + " @" + std::to_string(run);
  }));
  std::vector<ChatRequest> reqs;
  for (int i = 0; i < 10; ++i) reqs.push_back(ChatRequest::user("m", "prompt " + std::to_string(i)));
  std::vector<std::string> first;
  for (int run = 1; run <= 3; ++run)
    for (const auto& r : reqs) first.push_back(live.complete(r, run, "t").text);
  EXPECT_EQ(record_transcripts(live.trials(), dir / "t.jsonl"), 30u);

  auto before = http_connection_attempts();
  ModelGateway replay(ReplayAdapter::from_archive(dir / "t.jsonl"));
  std::vector<std::string> second;
  for (int run = 1; run <= 3; ++run)
    for (const auto& r : reqs) second.push_back(replay.complete(r, run, "t").text);
  EXPECT_EQ(first, second);
  EXPECT_EQ(http_connection_attempts(), before);
  EXPECT_EQ(replay.adapter_kind(), AdapterKind::kReplay);
}

TEST(Transcripts, TruncatedArchiveReportsOffset) {
  testing::TempDir dir;
  std::atomic<int> calls{0};
  ModelGateway gw(counting(calls));
  for (int i = 0; i < 4; ++i) gw.complete(ChatRequest::user("m", std::to_string(i)), 1, "t");
  record_transcripts(gw.trials(), dir / "t.jsonl");
  auto full = read_all(dir / "t.jsonl");

  // Cut inside the last record.
  std::ofstream(dir / "cut.jsonl", std::ios::binary) << full.substr(0, full.size() - 10);
  try {
    load_transcripts(dir / "cut.jsonl");
    FAIL() << "expected TranscriptError";
  } catch (const TranscriptError& e) {
    EXPECT_GT(e.offset(), 0u);
    EXPECT_LT(e.offset(), full.size());
  }

  // Drop the last full record: the header count no longer matches.
  auto last_nl = full.rfind('\n', full.size() - 2);
  std::ofstream(dir / "short.jsonl", std::ios::binary) << full.substr(0, last_nl + 1);
  EXPECT_THROW(load_transcripts(dir / "short.jsonl"), TranscriptError);

  std::ofstream(dir / "junk.jsonl", std::ios::binary) << "not json\n";
  EXPECT_THROW(load_transcripts(dir / "junk.jsonl"), TranscriptError);
}

TEST(Transcripts, EmptyLogGivesHeaderOnlyArchive) {
  testing::TempDir dir;
  EXPECT_EQ(record_transcripts({}, dir / "e.jsonl"), 0u);
  EXPECT_TRUE(load_transcripts(dir / "e.jsonl").empty());
}

TEST(Transcripts, FailedTrialsAreNotArchived) {
  testing::TempDir dir;
  TrialRecord ok;
  ok.test_id = "t";
  ok.request = ChatRequest::user("m", "a");
  ok.cache_key = cache_key(ok.request, 1);
  ok.response_text = "yes";
  TrialRecord bad = ok;
  bad.request = ChatRequest::user("m", "b");
  bad.cache_key = cache_key(bad.request, 1);
  bad.response_text.reset();
  bad.error = "boom";
  EXPECT_EQ(record_transcripts({ok, bad}, dir / "a.jsonl"), 1u);
  auto m = load_transcripts(dir / "a.jsonl");
  EXPECT_EQ(m.at(ok.cache_key), "yes");
}

TEST(Gateway, DiskCacheSurvivesRestartAndRejectsTampering) {
  testing::TempDir dir;
  std::atomic<int> calls{0};
  GatewayOptions o;
  o.cache_dir = dir.path();
  auto req = ChatRequest::user("m", "cached");
  {
    ModelGateway gw(counting(calls, "first"), o);
    gw.complete(req, 1, "t");
  }
  {
    ModelGateway gw(counting(calls, "second"), o);
    auto c = gw.complete(req, 1, "t");
    EXPECT_EQ(c.text, "first");
    EXPECT_TRUE(c.record.cache_hit);
  }
  EXPECT_EQ(calls.load(), 1);
  auto entry = dir / (cache_key(req, 1) + ".json");
  auto j = nlohmann::json::parse(read_all(entry));
  j["text"] = "tampered";
  std::ofstream(entry) << j.dump();
  ModelGateway gw(counting(calls, "third"), o);
  EXPECT_EQ(gw.complete(req, 1, "t").text, "third");
}

TEST(Gateway, TrialLogFileMatchesMemory) {
  testing::TempDir dir;
  std::atomic<int> calls{0};
  GatewayOptions o;
  o.trial_log = dir / "trials.jsonl";
  {
    ModelGateway gw(counting(calls), o);
    gw.complete(ChatRequest::user("m", "a"), 1, "x");
    gw.complete(ChatRequest::user("m", "b"), 2, "x");
  }
  auto log = load_trial_log(dir / "trials.jsonl");
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[1].run_index, 2);
  EXPECT_EQ(log[0].response_text, std::optional<std::string>("ok"));
}

TEST(Gateway, ConcurrencyIsBounded) {
  std::atomic<int> calls{0};
  GatewayOptions o;
  o.concurrency = 3;
  ModelGateway gw(std::make_unique<FunctionAdapter>([&](const ChatRequest&, int) {
                    ++calls;
                    std::this_thread::sleep_for(std::chrono::milliseconds(5));
                    return std::string("ok");
                  }),
                  o);
  parallel_for(40, 8, [&](std::size_t i) { gw.complete(ChatRequest::user("m", std::to_string(i)), 1, "t"); });
  EXPECT_EQ(calls.load(), 40);
  EXPECT_LE(gw.max_in_flight(), 3u);
  EXPECT_GE(gw.max_in_flight(), 1u);
  auto log = gw.trials();
  EXPECT_TRUE(std::is_sorted(log.begin(), log.end(),
                             [](const TrialRecord& a, const TrialRecord& b) { return a.trial_id < b.trial_id; }));
}

TEST(ParallelFor, RethrowsAfterJoin) {
  std::atomic<int> done{0};
  EXPECT_THROW(parallel_for(20, 4,
                            [&](std::size_t i) {
                              ++done;
                              if (i == 3) throw std::runtime_error("x");
                            }),
               std::runtime_error);
  EXPECT_GE(done.load(), 1);
}

TEST(AdapterConfig, RedactionDropsSecrets) {
  nlohmann::json cfg = {{"kind", "http"},
                        {"base_url", "http://localhost:1"},
                        {"api_key_env", "MY_KEY_VAR"},
                        {"api_key", "sk-should-not-appear"},
                        {"headers", {{"Authorization", "Bearer abc"}}},
                        {"access_token", "tok"}};
  auto r = redacted_adapter_config(cfg);
  auto dumped = r.dump();
  EXPECT_EQ(dumped.find("sk-should-not-appear"), std::string::npos);
  EXPECT_EQ(dumped.find("Bearer"), std::string::npos);
  EXPECT_EQ(dumped.find("tok\""), std::string::npos);
  EXPECT_EQ(r.at("api_key_env"), "MY_KEY_VAR");
  EXPECT_EQ(r.at("base_url"), "http://localhost:1");
}

TEST(AdapterConfig, UnknownKindAndMissingFields) {
  EXPECT_THROW(configure_adapter({{"kind", "carrier-pigeon"}}), ConfigError);
  EXPECT_THROW(configure_adapter({{"kind", "replay"}}), ConfigError);
  EXPECT_THROW(configure_adapter(nlohmann::json::object()), ConfigError);
}

// Local chat-completions endpoint scripted by a status sequence.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu_);
      auth_headers_.push_back(req.get_header_value("Authorization"));
      int status = hits_ < statuses_.size() ? statuses_[hits_] : 200;
      ++hits_;
      res.status = status;
      if (status == 200) {
        res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "Vote: in favour"}}}}}}}.dump(),
                        "application/json");
      } else {
        res.set_content("{\"error\":\"nope\"}", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::size_t hits() {
    std::lock_guard lock(mu_);
    return hits_;
  }
  std::vector<std::string> auth_headers() {
    std::lock_guard lock(mu_);
    return auth_headers_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::vector<int> statuses_;
  std::size_t hits_ = 0;
  std::vector<std::string> auth_headers_;
};

constexpr const char* kKeyVar = "UNSCBIAS_TEST_API_KEY";
constexpr const char* kSecret = "sk-test-0123456789abcdef";

class HttpAdapterTest : public ::testing::Test {
 protected:
  void SetUp() override { ::setenv(kKeyVar, kSecret, 1); }
  void TearDown() override { ::unsetenv(kKeyVar); }

  HttpAdapterConfig config(const FakeEndpoint& ep) {
    HttpAdapterConfig c;
    c.base_url = ep.url();
    c.api_key_env = kKeyVar;
    c.max_attempts = 4;
    c.initial_backoff = std::chrono::milliseconds(100);
    c.timeout = std::chrono::seconds(5);
    return c;
  }
  std::vector<std::chrono::milliseconds> sleeps_;
  HttpAdapter::Sleeper sleeper() {
    return [this](std::chrono::milliseconds d) { sleeps_.push_back(d); };
  }
};

TEST_F(HttpAdapterTest, RetriesServerErrorsWithBackoff) {
  FakeEndpoint ep({500, 429, 200});
  HttpAdapter a(config(ep), sleeper());
  EXPECT_EQ(a.complete(ChatRequest::user("m", "x"), 1, "k"), "Vote: in favour");
  EXPECT_EQ(ep.hits(), 3u);
  ASSERT_EQ(sleeps_.size(), 2u);
  EXPECT_EQ(sleeps_[0].count(), 100);
  EXPECT_EQ(sleeps_[1].count(), 200);
  for (const auto& h : ep.auth_headers()) EXPECT_EQ(h, std::string("Bearer ") + kSecret);
}

TEST_F(HttpAdapterTest, UnauthorizedFailsImmediately) {
  FakeEndpoint ep({401});
  HttpAdapter a(config(ep), sleeper());
  EXPECT_THROW(a.complete(ChatRequest::user("m", "x"), 1, "k"), AuthError);
  EXPECT_EQ(ep.hits(), 1u);
  EXPECT_TRUE(sleeps_.empty());
}

TEST_F(HttpAdapterTest, PersistentRateLimitGivesUp) {
  FakeEndpoint ep({429, 429, 429, 429, 429});
  HttpAdapter a(config(ep), sleeper());
  EXPECT_THROW(a.complete(ChatRequest::user("m", "x"), 1, "k"), RateLimitError);
  EXPECT_EQ(ep.hits(), 4u);
}

TEST_F(HttpAdapterTest, MissingCredentialNamesTheVariable) {
  FakeEndpoint ep({});
  auto c = config(ep);
  c.api_key_env = "UNSCBIAS_TEST_UNSET_VAR";
  ::unsetenv(c.api_key_env.c_str());
  try {
    HttpAdapter a(c);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("UNSCBIAS_TEST_UNSET_VAR"), std::string::npos);
  }
}

TEST_F(HttpAdapterTest, CredentialNeverReachesLogsOrTrialFiles) {
  std::ostringstream captured;
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(captured);
  auto logger = std::make_shared<spdlog::logger>("capture", sink);
  logger->set_level(spdlog::level::trace);
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);

  testing::TempDir dir;
  FakeEndpoint ep({500, 200});
  nlohmann::json cfg = {{"kind", "http"},
                        {"base_url", ep.url()},
                        {"api_key_env", kKeyVar},
                        {"initial_backoff_ms", 1},
                        {"timeout_s", 5}};
  GatewayOptions o;
  o.trial_log = dir / "trials.jsonl";
  o.cache_dir = dir / "cache";
  std::filesystem::create_directories(*o.cache_dir);
  {
    ModelGateway gw(configure_adapter(cfg), o);
    gw.complete(ChatRequest::user("m", "x"), 1, "t");
    record_transcripts(gw.trials(), dir / "transcripts.jsonl");
  }
  std::ofstream(dir / "manifest.json") << redacted_adapter_config(cfg).dump();
  spdlog::set_default_logger(previous);

  EXPECT_EQ(captured.str().find(kSecret), std::string::npos);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path())) {
    if (entry.is_regular_file()) EXPECT_EQ(read_all(entry.path()).find(kSecret), std::string::npos) << entry.path();
  }
}

TEST_F(HttpAdapterTest, ReplayNeverOpensAConnection) {
  testing::TempDir dir;
  FakeEndpoint ep({});
  {
    ModelGateway live(std::make_unique<HttpAdapter>(config(ep)));
    live.complete(ChatRequest::user("m", "x"), 1, "t");
    record_transcripts(live.trials(), dir / "a.jsonl");
  }
  auto before = http_connection_attempts();
  ModelGateway gw(configure_adapter({{"kind", "replay"}, {"archive", (dir / "a.jsonl").string()}}));
  EXPECT_EQ(gw.complete(ChatRequest::user("m", "x"), 1, "t").text, "Vote: in favour");
  EXPECT_EQ(http_connection_attempts(), before);
  EXPECT_EQ(ep.hits(), 1u);
}

}  // namespace
}  // namespace unscbias
