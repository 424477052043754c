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

#include "unscbias/synthetic_corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <vector>

#include "unscbias/keywords.hpp"
#include "unscbias/text.hpp"

namespace unscbias {

const std::map<std::string, std::array<int, 3>>& reference_vote_counts() {
  static const std::map<std::string, std::array<int, 3>> kCounts = {
      {std::string(kUnitedStates), {33, 27, 6}}, {std::string(kUnitedKingdom), {34, 16, 16}},
      {std::string(kFrance), {40, 15, 11}},      {std::string(kRussia), {32, 32, 2}},
      {std::string(kChina), {33, 12, 21}},
  };
  return kCounts;
}

namespace {

struct Region {
  const char* name;
  std::vector<std::string> states;
};

const std::vector<Region>& regions() {
  static const std::vector<Region> kRegions = {
      {"Middle East", {"Syria", "Israel", "Yemen", "Iraq", "Lebanon"}},
      {"Africa", {"Sudan", "Libya", "Somalia", "Mali", "South Sudan"}},
      {"Europe", {"Ukraine", "Bosnia and Herzegovina", "Georgia", "Cyprus", "Kosovo"}},
      {"Asia", {"Myanmar", "Afghanistan", "Democratic People's Republic of Korea", "Timor-Leste", "Iran"}},
      {"Americas", {"Haiti", "Venezuela", "Colombia", "Nicaragua", "Guatemala"}},
  };
  return kRegions;
}

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform_below(rng_, n)); }
  bool chance(int percent) { return below(100) < static_cast<std::size_t>(percent); }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }
  template <typename T>
  std::vector<T> sample(std::vector<T> v, std::size_t n) {
    shuffle(v);
    v.resize(std::min(n, v.size()));
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

struct Shape {
  std::size_t region_count = 5;
  std::size_t states_per_region = 5;
  int first_year = 1995;
  int last_year = 2023;
};

void describe(Resolution& r, Draw& d, const Shape& shape, const std::vector<std::string>& keywords) {
  const auto& reg = regions()[d.below(shape.region_count)];
  std::vector<std::string> pool(reg.states.begin(), reg.states.begin() + static_cast<std::ptrdiff_t>(shape.states_per_region));
  auto targets = d.sample(pool, 1 + d.below(3));
  if (d.chance(30)) targets.push_back("Member States");
  if (d.chance(15)) targets.push_back("United Nations");
  auto kws = d.sample(keywords, 3 + d.below(3));

  r.geopolitical_region = reg.name;
  r.target_nations = targets;
  r.keywords = kws;
  r.context = "The Security Council, recalling its previous resolutions on the situation in " + targets[0] +
              ", expressing grave concern about " + kws[0] + " and " + kws[1] + " in the " + reg.name +
              " region, calls upon all parties to comply with their obligations, requests the Secretary-General to "
              "report on " +
              kws[2] + ", and decides to remain seized of the matter.";
  r.summary = "Draft on " + targets[0] + " addressing " + kws[0] + " and " + kws[1] + ".";
  r.action_items = "Calls on parties in " + targets[0] + " to act on " + kws[0] + "; requests reporting on " + kws[2] + ".";
}

void set_votes(Resolution& r, const std::vector<VoteChoice>& row) {
  const auto& p5 = p5_nations();
  for (std::size_t i = 0; i < p5.size(); ++i) r.votes[p5[i]] = std::string(to_string(row[i]));
}

void add_speeches(Resolution& r, Draw& d) {
  for (const auto& [nation, token] : r.votes) {
    auto v = parse_vote_token(token);
    if (!v || *v == VoteChoice::kFavour || !d.chance(70)) continue;
    r.speeches[nation] = "The delegation of " + nation + " " +
                         (*v == VoteChoice::kAgainst ? "voted against the draft" : "abstained on the draft") +
                         " because the text on " + r.target_nations->front() +
                         " did not reflect the position of the parties concerned.";
  }
}

// Dates first, then ids numbered per year in date order so ids and dates
// agree the way real document symbols do.
void date_and_number(std::vector<Resolution*>& all, Draw& d, const Shape& shape) {
  for (auto* r : all) {
    int y = shape.first_year + static_cast<int>(d.below(static_cast<std::size_t>(shape.last_year - shape.first_year + 1)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, 1 + static_cast<int>(d.below(12)),
                  1 + static_cast<int>(d.below(28)));
    r->date = buf;
  }
  std::stable_sort(all.begin(), all.end(), [](const Resolution* a, const Resolution* b) { return a->date < b->date; });
  std::map<std::string, int> per_year;
  for (auto* r : all) {
    std::string year = r->date.substr(0, 4);
    char buf[32];
    std::snprintf(buf, sizeof buf, "S/%s/%03d", year.c_str(), ++per_year[year]);
    r->id = buf;
  }
}

Corpus assemble(std::vector<Resolution> adopted, std::vector<Resolution> non_adopted, Draw& d, const Shape& shape) {
  std::vector<Resolution*> all;
  for (auto& r : adopted) all.push_back(&r);
  for (auto& r : non_adopted) all.push_back(&r);
  date_and_number(all, d, shape);
  auto by_date = [](const Resolution& a, const Resolution& b) { return a.date != b.date ? a.date < b.date : a.id < b.id; };
  std::sort(adopted.begin(), adopted.end(), by_date);
  std::sort(non_adopted.begin(), non_adopted.end(), by_date);
  return Corpus(std::move(adopted), std::move(non_adopted));
}

std::vector<VoteChoice> adopted_row(Draw& d) {
  std::vector<VoteChoice> row;
  for (const auto& n : p5_nations()) {
    int abstain = (n == kRussia || n == kChina) ? 10 : 3;
    row.push_back(d.chance(abstain) ? VoteChoice::kAbstention : VoteChoice::kFavour);
  }
  return row;
}

}  // namespace

Corpus reference_profile_corpus(std::uint64_t seed) {
  Draw d(seed);
  Shape shape;
  auto keywords = KeywordPool::defaults().all_keywords();
  const auto& p5 = p5_nations();
  constexpr int n = kReferenceNonAdopted;

  // Against votes are placed so every draft carries at least one: Russia
  // covers 0..31, the United States 32..58, the United Kingdom 59..65 and
  // wraps to the front. Remaining cells are shuffled per nation.
  std::map<std::string, std::vector<int>> against_at;
  auto range = [](int from, int count) {
    std::vector<int> v;
    for (int i = 0; i < count; ++i) v.push_back((from + i) % n);
    return v;
  };
  against_at[std::string(kRussia)] = range(0, 32);
  against_at[std::string(kUnitedStates)] = range(32, 27);
  against_at[std::string(kUnitedKingdom)] = range(59, 16);
  against_at[std::string(kFrance)] = range(10, 15);
  against_at[std::string(kChina)] = range(40, 12);

  std::vector<std::vector<VoteChoice>> rows(n, std::vector<VoteChoice>(p5.size(), VoteChoice::kFavour));
  for (std::size_t c = 0; c < p5.size(); ++c) {
    const auto& counts = reference_vote_counts().at(p5[c]);
    std::vector<bool> taken(n, false);
    for (int i : against_at[p5[c]]) {
      rows[static_cast<std::size_t>(i)][c] = VoteChoice::kAgainst;
      taken[static_cast<std::size_t>(i)] = true;
    }
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
      if (!taken[static_cast<std::size_t>(i)]) rest.push_back(i);
    }
    d.shuffle(rest);
    for (int k = 0; k < counts[2]; ++k) rows[static_cast<std::size_t>(rest[static_cast<std::size_t>(k)])][c] = VoteChoice::kAbstention;
  }
  d.shuffle(rows);

  std::vector<Resolution> non_adopted(n);
  for (int i = 0; i < n; ++i) {
    auto& r = non_adopted[static_cast<std::size_t>(i)];
    r.status = AdoptionStatus::kNonAdopted;
    describe(r, d, shape, keywords);
    set_votes(r, rows[static_cast<std::size_t>(i)]);
    add_speeches(r, d);
  }
  std::vector<Resolution> adopted(kReferenceAdopted);
  for (auto& r : adopted) {
    r.status = AdoptionStatus::kAdopted;
    describe(r, d, shape, keywords);
    set_votes(r, adopted_row(d));
  }
  return assemble(std::move(adopted), std::move(non_adopted), d, shape);
}

Corpus retriever_fixture_corpus(std::uint64_t seed, int size) {
  if (size < 2) throw std::invalid_argument("retriever fixture needs at least two resolutions");
  Draw d(seed);
  Shape shape{2, 3, 2010, 2020};
  auto keywords = d.sample(KeywordPool::defaults().all_keywords(), 8);
  std::vector<Resolution> adopted(static_cast<std::size_t>(size / 2));
  std::vector<Resolution> non_adopted(static_cast<std::size_t>(size - size / 2));
  for (auto& r : adopted) {
    r.status = AdoptionStatus::kAdopted;
    describe(r, d, shape, keywords);
    set_votes(r, adopted_row(d));
  }
  for (auto& r : non_adopted) {
    r.status = AdoptionStatus::kNonAdopted;
    describe(r, d, shape, keywords);
    std::vector<VoteChoice> row;
    for (std::size_t i = 0; i < p5_nations().size(); ++i) row.push_back(kVoteChoices[d.below(3)]);
    row[d.below(row.size())] = VoteChoice::kAgainst;
    set_votes(r, row);
    add_speeches(r, d);
  }
  return assemble(std::move(adopted), std::move(non_adopted), d, shape);
}

}  // namespace unscbias
