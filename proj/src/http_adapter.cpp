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

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "unscbias/gateway.hpp"

namespace unscbias {

namespace {

std::atomic<std::uint64_t> g_connection_attempts{0};

}  // namespace

std::uint64_t http_connection_attempts() { return g_connection_attempts.load(); }

HttpAdapter::HttpAdapter(HttpAdapterConfig cfg, Sleeper sleeper) : cfg_(std::move(cfg)), sleeper_(std::move(sleeper)) {
  if (cfg_.api_key_env.empty()) throw ConfigError("http adapter: no credential variable configured");
  const char* key = std::getenv(cfg_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("http adapter: credential variable " + cfg_.api_key_env + " is not set");
  }
  api_key_ = key;
  if (cfg_.max_attempts < 1) cfg_.max_attempts = 1;
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

HttpAdapter::~HttpAdapter() = default;

std::string HttpAdapter::complete(const ChatRequest& request, int, const std::string&) {
  auto body = to_json(request).dump();
  std::string last_error;
  bool rate_limited = false;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = cfg_.initial_backoff * (1LL << (attempt - 2));
      spdlog::debug("retrying chat request in {} ms ({})", delay.count(), last_error);
      sleeper_(delay);
    }
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_bearer_token_auth(api_key_);
    ++g_connection_attempts;
    auto res = client.Post(cfg_.path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      rate_limited = false;
      continue;
    }
    int status = res->status;
    if (status == 401 || status == 403) {
      throw AuthError("authentication failed (HTTP " + std::to_string(status) + ")");
    }
    if (status == 429 || status >= 500) {
      last_error = "HTTP " + std::to_string(status);
      rate_limited = status == 429;
      continue;
    }
    if (status != 200) {
      throw TransportError("chat endpoint returned HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      const auto& content = j.at("choices").at(0).at("message").at("content");
      return content.is_null() ? std::string() : content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed chat response: ") + e.what());
    }
  }
  std::string msg = "giving up after " + std::to_string(cfg_.max_attempts) + " attempts: " + last_error;
  if (rate_limited) throw RateLimitError(msg);
  throw TransportError(msg);
}

}  // namespace unscbias
