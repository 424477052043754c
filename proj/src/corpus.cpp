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

#include "unscbias/corpus.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "unscbias/text.hpp"

namespace unscbias {

std::string_view to_string(VoteChoice v) {
  switch (v) {
    case VoteChoice::kFavour: return "favour";
    case VoteChoice::kAgainst: return "against";
    case VoteChoice::kAbstention: return "abstention";
  }
  return "?";
}

std::optional<VoteChoice> parse_vote_token(std::string_view token) {
  if (token == "favour") return VoteChoice::kFavour;
  if (token == "against") return VoteChoice::kAgainst;
  if (token == "abstention") return VoteChoice::kAbstention;
  return std::nullopt;
}

std::string_view to_string(AdoptionStatus s) {
  return s == AdoptionStatus::kAdopted ? "adopted" : "non_adopted";
}

std::optional<AdoptionStatus> parse_status(std::string_view token) {
  if (token == "adopted") return AdoptionStatus::kAdopted;
  if (token == "non_adopted") return AdoptionStatus::kNonAdopted;
  return std::nullopt;
}

std::optional<std::chrono::year_month_day> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto num = [&](std::size_t off, std::size_t len, auto& out) {
    auto piece = text.substr(off, len);
    auto [p, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), out);
    return ec == std::errc{} && p == piece.data() + piece.size();
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::optional<VoteChoice> Resolution::vote_of(std::string_view nation) const {
  auto it = votes.find(std::string(nation));
  if (it == votes.end()) return std::nullopt;
  return parse_vote_token(it->second);
}

std::optional<std::string> Resolution::speech_of(std::string_view nation) const {
  auto it = speeches.find(std::string(nation));
  if (it == speeches.end() || trim(it->second).empty()) return std::nullopt;
  return it->second;
}

bool Resolution::is_augmented() const {
  return summary && action_items && geopolitical_region && target_nations && keywords;
}

nlohmann::json to_json(const Resolution& r) {
  nlohmann::json j = {
      {"id", r.id},
      {"date", r.date},
      {"status", to_string(r.status)},
      {"votes", r.votes},
      {"context", r.context},
      {"speeches", r.speeches},
  };
  if (r.summary) j["summary"] = *r.summary;
  if (r.action_items) j["action_items"] = *r.action_items;
  if (r.geopolitical_region) j["geopolitical_region"] = *r.geopolitical_region;
  if (r.target_nations) j["target_nations"] = *r.target_nations;
  if (r.keywords) j["keywords"] = *r.keywords;
  return j;
}

namespace {

template <typename T>
T required(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw RecordError(field, std::string("missing field '") + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw RecordError(field, std::string("field '") + field + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> optional_field(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  try {
    return j.at(field).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw RecordError(field, std::string("field '") + field + "' has the wrong type");
  }
}

}  // namespace

Resolution resolution_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw RecordError("record", "record is not an object");
  Resolution r;
  r.id = required<std::string>(j, "id");
  r.date = required<std::string>(j, "date");
  auto status = required<std::string>(j, "status");
  auto parsed = parse_status(status);
  if (!parsed) throw RecordError("status", "field 'status' has unknown value '" + status + "'");
  r.status = *parsed;
  r.votes = required<std::map<std::string, std::string>>(j, "votes");
  r.context = required<std::string>(j, "context");
  r.speeches = optional_field<std::map<std::string, std::string>>(j, "speeches").value_or(
      std::map<std::string, std::string>{});
  r.summary = optional_field<std::string>(j, "summary");
  r.action_items = optional_field<std::string>(j, "action_items");
  r.geopolitical_region = optional_field<std::string>(j, "geopolitical_region");
  r.target_nations = optional_field<std::vector<std::string>>(j, "target_nations");
  r.keywords = optional_field<std::vector<std::string>>(j, "keywords");
  return r;
}

std::string Violation::describe() const {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << (resolution_id.empty() ? "<no id>" : resolution_id) << ": " << field << ": " << rule;
  return os.str();
}

std::vector<Violation> validate_resolution(const Resolution& res) {
  std::vector<Violation> out;
  auto add = [&](std::string field, std::string rule) {
    out.push_back(Violation{res.id, std::move(field), std::move(rule), 0});
  };
  if (trim(res.id).empty()) add("id", "id must be non-empty");
  if (!parse_date(res.date)) add("date", "'" + res.date + "' is not a calendar date (YYYY-MM-DD)");
  bool bad_token = false;
  for (const auto& [nation, token] : res.votes) {
    if (!parse_vote_token(token)) {
      add("votes", "vote of " + nation + " is '" + token + "', expected favour|against|abstention");
      bad_token = true;
    }
  }
  if (res.status == AdoptionStatus::kAdopted && !bad_token) {
    for (const auto& nation : p5_nations()) {
      if (res.vote_of(nation) == VoteChoice::kAgainst) {
        add("votes", "adopted resolution records an against vote from permanent member " + nation);
      }
    }
  }
  return out;
}

Corpus::Corpus(std::vector<Resolution> adopted, std::vector<Resolution> non_adopted)
    : adopted_(std::move(adopted)), non_adopted_(std::move(non_adopted)) {
  reindex();
}

void Corpus::reindex() {
  index_.clear();
  auto add = [&](Pool p, const std::vector<Resolution>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!index_.emplace(v[i].id, std::make_pair(p, i)).second) {
        throw CorpusError("duplicate resolution id '" + v[i].id + "'");
      }
    }
  };
  add(Pool::kAdopted, adopted_);
  add(Pool::kNonAdopted, non_adopted_);
}

const Resolution* Corpus::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return nullptr;
  return &pool(it->second.first)[it->second.second];
}

std::optional<Pool> Corpus::pool_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second.first;
}

std::vector<const Resolution*> Corpus::all() const {
  std::vector<const Resolution*> out;
  out.reserve(size());
  for (const auto& r : adopted_) out.push_back(&r);
  for (const auto& r : non_adopted_) out.push_back(&r);
  return out;
}

namespace {

std::map<std::string, std::string> canonical_keys(const std::map<std::string, std::string>& in,
                                                  const NationAliases& aliases) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : in) out[aliases.canonical_or_self(k)] = v;
  return out;
}

}  // namespace

CorpusLoadResult parse_corpus(std::istream& in, const NationAliases& aliases) {
  CorpusLoadResult result;
  std::vector<Resolution> adopted;
  std::vector<Resolution> non_adopted;
  std::map<std::string, std::size_t> seen;  // id -> line
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      result.violations.push_back(Violation{"", "record", std::string("malformed JSON: ") + e.what(), lineno});
      continue;
    }
    if (j.is_object() && j.contains("schema") && !j.contains("id")) {
      auto schema = j.at("schema").is_string() ? j.at("schema").get<std::string>() : std::string();
      if (schema != kCorpusSchema) throw CorpusError("unsupported corpus schema '" + schema + "'");
      continue;
    }
    ++result.records_read;
    std::string id = (j.is_object() && j.contains("id") && j.at("id").is_string()) ? j.at("id").get<std::string>() : "";
    Resolution r;
    try {
      r = resolution_from_json(j);
    } catch (const RecordError& e) {
      result.violations.push_back(Violation{id, e.field(), e.what(), lineno});
      continue;
    }
    r.votes = canonical_keys(r.votes, aliases);
    r.speeches = canonical_keys(r.speeches, aliases);
    auto problems = validate_resolution(r);
    if (!problems.empty()) {
      for (auto& v : problems) {
        v.line = lineno;
        result.violations.push_back(std::move(v));
      }
      continue;
    }
    if (auto [it, fresh] = seen.emplace(r.id, lineno); !fresh) {
      result.violations.push_back(
          Violation{r.id, "id", "duplicate id (first seen on line " + std::to_string(it->second) + ")", lineno});
      continue;
    }
    (r.status == AdoptionStatus::kAdopted ? adopted : non_adopted).push_back(std::move(r));
  }
  result.corpus = Corpus(std::move(adopted), std::move(non_adopted));
  return result;
}

CorpusLoadResult load_corpus(const std::filesystem::path& path, const NationAliases& aliases) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot read corpus file: " + path.string());
  return parse_corpus(in, aliases);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  out << nlohmann::json{{"schema", kCorpusSchema}}.dump() << '\n';
  for (const Resolution* r : corpus.all()) out << to_json(*r).dump() << '\n';
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot write corpus file: " + path.string());
  write_corpus(corpus, out);
  if (!out) throw CorpusError("write failed: " + path.string());
}

std::string corpus_digest(const Corpus& corpus) {
  std::ostringstream os;
  write_corpus(corpus, os);
  return sha256_hex(os.str());
}

}  // namespace unscbias
