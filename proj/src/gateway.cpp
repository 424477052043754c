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

#include "unscbias/gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "unscbias/text.hpp"

namespace unscbias {

ChatRequest ChatRequest::user(std::string model_id, std::string prompt) {
  ChatRequest r;
  r.model_id = std::move(model_id);
  r.messages.push_back(ChatMessage{"user", std::move(prompt)});
  return r;
}

void ChatRequest::validate() const {
  if (model_id.empty()) throw std::invalid_argument("chat request has no model id");
  if (messages.empty()) throw std::invalid_argument("chat request has no messages");
  for (const auto& m : messages) {
    if (m.role != "system" && m.role != "user" && m.role != "assistant") {
      throw std::invalid_argument("chat message has unknown role '" + m.role + "'");
    }
  }
  auto first = std::find_if(messages.begin(), messages.end(), [](const ChatMessage& m) { return m.role != "system"; });
  if (first == messages.end() || first->role != "user") {
    throw std::invalid_argument("first non-system message must have role user");
  }
  if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (max_tokens && *max_tokens <= 0) throw std::invalid_argument("max_tokens must be positive");
}

std::string ChatRequest::joined_content() const {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += '\n';
    out += m.content;
  }
  return out;
}

nlohmann::json to_json(const ChatRequest& r) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : r.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  nlohmann::json j = {{"model", r.model_id}, {"messages", msgs}, {"temperature", r.temperature}};
  if (r.max_tokens) j["max_tokens"] = *r.max_tokens;
  return j;
}

ChatRequest chat_request_from_json(const nlohmann::json& j) {
  ChatRequest r;
  r.model_id = j.at("model").get<std::string>();
  for (const auto& m : j.at("messages")) {
    r.messages.push_back(ChatMessage{m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  }
  r.temperature = j.value("temperature", 0.0);
  if (j.contains("max_tokens")) r.max_tokens = j.at("max_tokens").get<int>();
  return r;
}

std::string cache_key(const ChatRequest& request, int run_index) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : request.messages) msgs.push_back({m.role, m.content});
  // %.17g keeps distinct temperatures distinct
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.17g", request.temperature);
  nlohmann::json j = {{"model", request.model_id}, {"messages", msgs}, {"temperature", temp}, {"run", run_index}};
  return sha256_hex(j.dump());
}

std::string_view to_string(AdapterKind k) {
  switch (k) {
    case AdapterKind::kHttp: return "http";
    case AdapterKind::kReplay: return "replay";
    case AdapterKind::kScripted: return "scripted";
  }
  return "?";
}

namespace {

AdapterKind parse_adapter_kind(const std::string& s) {
  if (s == "http") return AdapterKind::kHttp;
  if (s == "replay") return AdapterKind::kReplay;
  if (s == "scripted") return AdapterKind::kScripted;
  throw ConfigError("unknown adapter kind '" + s + "'");
}

}  // namespace

nlohmann::json to_json(const TrialRecord& t) {
  nlohmann::json j = {
      {"trial_id", t.trial_id},
      {"test_id", t.test_id},
      {"run_index", t.run_index},
      {"request", to_json(t.request)},
      {"cache_hit", t.cache_hit},
      {"timestamp", t.timestamp},
      {"adapter_kind", to_string(t.adapter_kind)},
      {"cache_key", t.cache_key},
  };
  if (t.response_text) j["response_text"] = *t.response_text;
  if (t.error) j["error"] = *t.error;
  return j;
}

TrialRecord trial_record_from_json(const nlohmann::json& j) {
  TrialRecord t;
  t.trial_id = j.at("trial_id").get<std::string>();
  t.test_id = j.at("test_id").get<std::string>();
  t.run_index = j.at("run_index").get<int>();
  t.request = chat_request_from_json(j.at("request"));
  if (j.contains("response_text")) t.response_text = j.at("response_text").get<std::string>();
  if (j.contains("error")) t.error = j.at("error").get<std::string>();
  t.cache_hit = j.value("cache_hit", false);
  t.timestamp = j.value("timestamp", "");
  t.adapter_kind = parse_adapter_kind(j.value("adapter_kind", "scripted"));
  t.cache_key = j.at("cache_key").get<std::string>();
  return t;
}

ScriptedAdapter::ScriptedAdapter(std::vector<Rule> rules, std::optional<std::string> fallback)
    : rules_(std::move(rules)), fallback_(std::move(fallback)) {}

std::unique_ptr<ScriptedAdapter> ScriptedAdapter::from_json(const nlohmann::json& cfg) {
  std::vector<Rule> rules;
  for (const auto& r : cfg.value("rules", nlohmann::json::array())) {
    Rule rule;
    if (r.contains("contains")) {
      const auto& c = r.at("contains");
      if (c.is_string()) {
        rule.contains.push_back(c.get<std::string>());
      } else {
        rule.contains = c.get<std::vector<std::string>>();
      }
    }
    if (r.contains("regex")) {
      try {
        rule.pattern = std::regex(r.at("regex").get<std::string>());
      } catch (const std::regex_error& e) {
        throw ConfigError("scripted rule has an invalid regex: " + std::string(e.what()));
      }
    }
    if (!r.contains("response")) throw ConfigError("scripted rule without a response");
    rule.response = r.at("response").get<std::string>();
    rules.push_back(std::move(rule));
  }
  std::optional<std::string> fallback;
  if (cfg.contains("default")) fallback = cfg.at("default").get<std::string>();
  return std::make_unique<ScriptedAdapter>(std::move(rules), std::move(fallback));
}

std::string ScriptedAdapter::complete(const ChatRequest& request, int, const std::string& key) {
  std::string content = request.joined_content();
  for (const auto& rule : rules_) {
    bool ok = std::all_of(rule.contains.begin(), rule.contains.end(),
                          [&](const std::string& s) { return content.find(s) != std::string::npos; });
    if (ok && rule.pattern) ok = std::regex_search(content, *rule.pattern);
    if (ok) return rule.response;
  }
  if (fallback_) return *fallback_;
  throw GatewayError("scripted adapter: no rule matches request " + key);
}

std::unique_ptr<ReplayAdapter> ReplayAdapter::from_archive(const std::filesystem::path& path) {
  return std::make_unique<ReplayAdapter>(load_transcripts(path));
}

std::string ReplayAdapter::complete(const ChatRequest&, int, const std::string& key) {
  auto it = transcripts_.find(key);
  if (it == transcripts_.end()) throw ReplayMiss(key);
  return it->second;
}

std::unique_ptr<ChatAdapter> configure_adapter(const nlohmann::json& config) {
  if (!config.contains("kind")) throw ConfigError("adapter config has no 'kind'");
  auto kind = parse_adapter_kind(config.at("kind").get<std::string>());
  switch (kind) {
    case AdapterKind::kScripted:
      return ScriptedAdapter::from_json(config);
    case AdapterKind::kReplay:
      if (!config.contains("archive")) throw ConfigError("replay adapter needs 'archive'");
      return ReplayAdapter::from_archive(config.at("archive").get<std::string>());
    case AdapterKind::kHttp: {
      HttpAdapterConfig cfg;
      if (!config.contains("base_url")) throw ConfigError("http adapter needs 'base_url'");
      cfg.base_url = config.at("base_url").get<std::string>();
      cfg.path = config.value("path", cfg.path);
      cfg.api_key_env = config.value("api_key_env", cfg.api_key_env);
      cfg.max_attempts = config.value("max_attempts", cfg.max_attempts);
      cfg.initial_backoff = std::chrono::milliseconds(config.value("initial_backoff_ms", 1000));
      cfg.timeout = std::chrono::seconds(config.value("timeout_s", 120));
      return std::make_unique<HttpAdapter>(cfg);
    }
  }
  throw ConfigError("unknown adapter kind");
}

nlohmann::json redacted_adapter_config(const nlohmann::json& config) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : config.items()) {
    auto lk = to_lower(k);
    bool secret = (lk.find("key") != std::string::npos && lk != "api_key_env") ||
                  lk.find("token") != std::string::npos || lk.find("secret") != std::string::npos ||
                  lk.find("password") != std::string::npos || lk == "headers";
    if (!secret) out[k] = v;
  }
  return out;
}

ModelGateway::ModelGateway(std::unique_ptr<ChatAdapter> adapter, GatewayOptions opts)
    : adapter_(std::move(adapter)), opts_(std::move(opts)) {
  if (!adapter_) throw ConfigError("gateway needs an adapter");
  if (opts_.concurrency == 0) opts_.concurrency = 1;
  if (opts_.runs < 1) throw ConfigError("runs must be >= 1");
  if (opts_.cache_dir) std::filesystem::create_directories(*opts_.cache_dir);
  if (opts_.trial_log) {
    if (opts_.trial_log->has_parent_path()) std::filesystem::create_directories(opts_.trial_log->parent_path());
    log_file_.open(*opts_.trial_log, std::ios::app);
    if (!log_file_) throw ConfigError("cannot open trial log " + opts_.trial_log->string());
  }
}

std::optional<std::string> ModelGateway::cache_get(const std::string& key) {
  {
    std::lock_guard lock(cache_mu_);
    auto it = memory_cache_.find(key);
    if (it != memory_cache_.end()) return it->second;
  }
  if (!opts_.cache_dir) return std::nullopt;
  auto path = *opts_.cache_dir / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(in);
    auto text = j.at("text").get<std::string>();
    if (j.at("key").get<std::string>() != key || j.at("sha256").get<std::string>() != sha256_hex(text)) {
      spdlog::warn("cache entry {} fails its digest check; ignoring it", key);
      return std::nullopt;
    }
    std::lock_guard lock(cache_mu_);
    memory_cache_.emplace(key, text);
    return text;
  } catch (const nlohmann::json::exception&) {
    spdlog::warn("cache entry {} is unreadable; ignoring it", key);
    return std::nullopt;
  }
}

void ModelGateway::cache_put(const std::string& key, const std::string& text) {
  {
    std::lock_guard lock(cache_mu_);
    memory_cache_.emplace(key, text);
  }
  if (!opts_.cache_dir) return;
  nlohmann::json j = {{"key", key}, {"text", text}, {"sha256", sha256_hex(text)}};
  write_file_atomic(*opts_.cache_dir / (key + ".json"), j.dump());
}

std::string ModelGateway::next_trial_id(std::string_view test_id, int run_index, const std::string& key) {
  std::string base = std::string(test_id) + "/r" + std::to_string(run_index) + "/" + key.substr(0, 16);
  int n = ++id_uses_[base];
  return n == 1 ? base : base + "#" + std::to_string(n);
}

TrialRecord ModelGateway::append_trial(TrialRecord rec) {
  std::lock_guard lock(log_mu_);
  rec.trial_id = next_trial_id(rec.test_id, rec.run_index, rec.cache_key);
  if (log_file_.is_open()) {
    log_file_ << to_json(rec).dump() << '\n';
    log_file_.flush();
  }
  log_.push_back(rec);
  return rec;
}

Completion ModelGateway::complete(const ChatRequest& request, int run_index, std::string_view test_id) {
  request.validate();
  if (run_index < 1 || run_index > opts_.runs) {
    throw std::invalid_argument("run_index " + std::to_string(run_index) + " outside 1.." +
                                std::to_string(opts_.runs));
  }
  TrialRecord rec;
  rec.test_id = std::string(test_id);
  rec.run_index = run_index;
  rec.request = request;
  rec.adapter_kind = adapter_->kind();
  rec.cache_key = cache_key(request, run_index);

  if (auto hit = cache_get(rec.cache_key)) {
    ++cache_hits_;
    rec.cache_hit = true;
    rec.response_text = *hit;
    rec.timestamp = utc_timestamp();
    return Completion{*hit, append_trial(std::move(rec))};
  }

  {
    std::unique_lock lock(slot_mu_);
    slot_cv_.wait(lock, [&] { return in_flight_ < opts_.concurrency; });
    ++in_flight_;
    std::size_t seen = max_in_flight_.load();
    while (in_flight_ > seen && !max_in_flight_.compare_exchange_weak(seen, in_flight_)) {
    }
  }
  auto release = [&] {
    {
      std::lock_guard lock(slot_mu_);
      --in_flight_;
    }
    slot_cv_.notify_one();
  };

  std::string text;
  try {
    text = adapter_->complete(request, run_index, rec.cache_key);
  } catch (const std::exception& e) {
    release();
    rec.error = e.what();
    rec.timestamp = utc_timestamp();
    append_trial(rec);
    throw;
  }
  release();
  cache_put(rec.cache_key, text);
  rec.response_text = text;
  rec.timestamp = utc_timestamp();
  return Completion{text, append_trial(std::move(rec))};
}

std::vector<TrialRecord> ModelGateway::trials() const {
  std::vector<TrialRecord> out;
  {
    std::lock_guard lock(log_mu_);
    out = log_;
  }
  std::sort(out.begin(), out.end(), [](const TrialRecord& a, const TrialRecord& b) { return a.trial_id < b.trial_id; });
  return out;
}

std::size_t ModelGateway::trial_count() const {
  std::lock_guard lock(log_mu_);
  return log_.size();
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<std::uint64_t> counter{0};
  auto tmp = path;
  std::ostringstream suffix;
  suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace unscbias
