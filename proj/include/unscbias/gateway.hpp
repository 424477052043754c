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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace unscbias {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<int> max_tokens;

  /// Single user turn, temperature 0.
  static ChatRequest user(std::string model_id, std::string prompt);

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
  /// Concatenated message contents, used for rule matching.
  std::string joined_content() const;

  bool operator==(const ChatRequest&) const = default;
};

nlohmann::json to_json(const ChatRequest& r);
ChatRequest chat_request_from_json(const nlohmann::json& j);

/// Stable SHA-256 over (model_id, messages, temperature, run_index).
std::string cache_key(const ChatRequest& request, int run_index);

enum class AdapterKind { kHttp, kReplay, kScripted };
std::string_view to_string(AdapterKind k);

struct TrialRecord {
  std::string trial_id;
  std::string test_id;
  int run_index = 1;
  ChatRequest request;
  std::optional<std::string> response_text;  // absent iff `error` is set
  std::optional<std::string> error;
  bool cache_hit = false;
  std::string timestamp;  // UTC, ISO 8601
  AdapterKind adapter_kind = AdapterKind::kScripted;
  std::string cache_key;
};

nlohmann::json to_json(const TrialRecord& t);
TrialRecord trial_record_from_json(const nlohmann::json& j);

class GatewayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ConfigError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class TransportError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class AuthError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class RateLimitError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class ReplayMiss : public GatewayError {
 public:
  explicit ReplayMiss(std::string digest)
      : GatewayError("replay miss: no transcript for key " + digest), digest_(std::move(digest)) {}
  const std::string& digest() const { return digest_; }

 private:
  std::string digest_;
};

class ChatAdapter {
 public:
  virtual ~ChatAdapter() = default;
  virtual AdapterKind kind() const = 0;
  /// `key` is cache_key(request, run_index).
  virtual std::string complete(const ChatRequest& request, int run_index, const std::string& key) = 0;
};

/// Rule-driven stub. The first rule whose conditions all hold answers.
class ScriptedAdapter : public ChatAdapter {
 public:
  struct Rule {
    std::vector<std::string> contains;  // every substring must occur
    std::optional<std::regex> pattern;  // searched in the joined content
    std::string response;
  };

  explicit ScriptedAdapter(std::vector<Rule> rules, std::optional<std::string> fallback = std::nullopt);
  static std::unique_ptr<ScriptedAdapter> from_json(const nlohmann::json& cfg);

  AdapterKind kind() const override { return AdapterKind::kScripted; }
  std::string complete(const ChatRequest& request, int run_index, const std::string& key) override;

 private:
  std::vector<Rule> rules_;
  std::optional<std::string> fallback_;
};

/// Scripted adapter backed by a callable; convenient for fixtures.
class FunctionAdapter : public ChatAdapter {
 public:
  using Fn = std::function<std::string(const ChatRequest&, int run_index)>;
  explicit FunctionAdapter(Fn fn) : fn_(std::move(fn)) {}
  AdapterKind kind() const override { return AdapterKind::kScripted; }
  std::string complete(const ChatRequest& request, int run_index, const std::string&) override {
    return fn_(request, run_index);
  }

 private:
  Fn fn_;
};

/// Answers from a transcript archive; never touches the network.
class ReplayAdapter : public ChatAdapter {
 public:
  explicit ReplayAdapter(std::map<std::string, std::string> transcripts) : transcripts_(std::move(transcripts)) {}
  static std::unique_ptr<ReplayAdapter> from_archive(const std::filesystem::path& path);

  AdapterKind kind() const override { return AdapterKind::kReplay; }
  std::string complete(const ChatRequest& request, int run_index, const std::string& key) override;
  std::size_t size() const { return transcripts_.size(); }

 private:
  std::map<std::string, std::string> transcripts_;
};

struct HttpAdapterConfig {
  std::string base_url;  // e.g. https://api.openai.com
  std::string path = "/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::seconds timeout{120};
};

/// OpenAI-compatible chat-completions client. Retries transport failures,
/// 429 and 5xx with exponential backoff; 401/403 fail immediately.
class HttpAdapter : public ChatAdapter {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  /// Reads the credential from `cfg.api_key_env`; throws ConfigError naming
  /// the variable when it is unset or empty.
  explicit HttpAdapter(HttpAdapterConfig cfg, Sleeper sleeper = {});
  ~HttpAdapter() override;

  AdapterKind kind() const override { return AdapterKind::kHttp; }
  std::string complete(const ChatRequest& request, int run_index, const std::string& key) override;

  const HttpAdapterConfig& config() const { return cfg_; }

 private:
  HttpAdapterConfig cfg_;
  std::string api_key_;
  Sleeper sleeper_;
};

/// Process-wide count of outbound HTTP connection attempts.
std::uint64_t http_connection_attempts();

/// Builds an adapter from {"kind": "http"|"replay"|"scripted", ...}.
std::unique_ptr<ChatAdapter> configure_adapter(const nlohmann::json& config);

/// Adapter config with secrets and secret-bearing fields removed; safe for
/// manifests.
nlohmann::json redacted_adapter_config(const nlohmann::json& config);

struct GatewayOptions {
  std::size_t concurrency = 4;
  int runs = 3;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> trial_log;
};

struct Completion {
  std::string text;
  TrialRecord record;
};

/// Shared entry point for every model call: cache lookup, bounded
/// concurrency, adapter dispatch and trial logging.
class ModelGateway {
 public:
  ModelGateway(std::unique_ptr<ChatAdapter> adapter, GatewayOptions opts = {});

  /// Throws GatewayError subclasses on adapter failure; the failed trial is
  /// still logged.
  Completion complete(const ChatRequest& request, int run_index, std::string_view test_id);

  AdapterKind adapter_kind() const { return adapter_->kind(); }
  const GatewayOptions& options() const { return opts_; }

  /// Snapshot of every trial so far, sorted by trial id.
  std::vector<TrialRecord> trials() const;
  std::size_t trial_count() const;
  std::size_t cache_hits() const { return cache_hits_.load(); }
  std::size_t max_in_flight() const { return max_in_flight_.load(); }

 private:
  std::optional<std::string> cache_get(const std::string& key);
  void cache_put(const std::string& key, const std::string& text);
  TrialRecord append_trial(TrialRecord rec);
  std::string next_trial_id(std::string_view test_id, int run_index, const std::string& key);

  std::unique_ptr<ChatAdapter> adapter_;
  GatewayOptions opts_;

  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  std::size_t in_flight_ = 0;
  std::atomic<std::size_t> max_in_flight_{0};

  std::mutex cache_mu_;
  std::map<std::string, std::string> memory_cache_;
  std::atomic<std::size_t> cache_hits_{0};

  mutable std::mutex log_mu_;
  std::vector<TrialRecord> log_;
  std::map<std::string, int> id_uses_;
  std::ofstream log_file_;
};

/// Runs fn(0..n-1) on up to `workers` threads; rethrows the first exception
/// after all workers have joined.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

class TranscriptError : public std::runtime_error {
 public:
  TranscriptError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr std::string_view kTranscriptSchema = "unscbias/transcripts@1";

/// Writes successful trials as a replay archive. An empty log yields a
/// header-only archive and a warning. Returns the number of transcripts.
std::size_t record_transcripts(const std::vector<TrialRecord>& trial_log, const std::filesystem::path& path);

/// cache key -> response text. Throws TranscriptError with the byte offset of
/// the first damaged or missing record.
std::map<std::string, std::string> load_transcripts(const std::filesystem::path& path);

/// Reads a line-delimited trial log.
std::vector<TrialRecord> load_trial_log(const std::filesystem::path& path);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string utc_timestamp();

}  // namespace unscbias
