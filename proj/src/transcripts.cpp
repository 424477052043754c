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

#include <algorithm>
#include <iterator>
#include <sstream>

#include <spdlog/spdlog.h>

#include "unscbias/gateway.hpp"

namespace unscbias {

std::size_t record_transcripts(const std::vector<TrialRecord>& trial_log, const std::filesystem::path& path) {
  std::map<std::string, const TrialRecord*> by_key;
  for (const auto& t : trial_log) {
    if (t.response_text) by_key.emplace(t.cache_key, &t);
  }
  if (by_key.empty()) spdlog::warn("trial log is empty; writing an empty transcript archive to {}", path.string());
  std::ostringstream out;
  out << nlohmann::json{{"schema", kTranscriptSchema}, {"count", by_key.size()}}.dump() << '\n';
  for (const auto& [key, t] : by_key) {
    nlohmann::json j = {{"key", key},
                        {"test_id", t->test_id},
                        {"run_index", t->run_index},
                        {"request", to_json(t->request)},
                        {"response_text", *t->response_text}};
    out << j.dump() << '\n';
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, out.str());
  return by_key.size();
}

std::map<std::string, std::string> load_transcripts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read transcript archive: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::map<std::string, std::string> out;
  std::size_t offset = 0;
  std::optional<std::size_t> expected;
  std::size_t records = 0;
  while (offset < data.size()) {
    auto nl = data.find('\n', offset);
    if (nl == std::string::npos) throw TranscriptError("archive ends inside a record", offset);
    std::string_view line(data.data() + offset, nl - offset);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw TranscriptError("damaged transcript record", offset);
    }
    if (!expected) {
      if (!j.is_object() || j.value("schema", "") != kTranscriptSchema || !j.contains("count")) {
        throw TranscriptError("missing or unsupported archive header", offset);
      }
      expected = j.at("count").get<std::size_t>();
    } else {
      if (!j.is_object() || !j.contains("key") || !j.contains("response_text")) {
        throw TranscriptError("transcript record lacks key or response_text", offset);
      }
      out[j.at("key").get<std::string>()] = j.at("response_text").get<std::string>();
      ++records;
    }
    offset = nl + 1;
  }
  if (!expected) throw TranscriptError("empty archive file", 0);
  if (records != *expected) {
    throw TranscriptError("archive truncated: header promises " + std::to_string(*expected) + " records, found " +
                              std::to_string(records),
                          data.size());
  }
  return out;
}

std::vector<TrialRecord> load_trial_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trial log: " + path.string());
  std::vector<TrialRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(trial_record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace unscbias
