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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "unscbias/corpus.hpp"
#include "unscbias/synthetic_corpus.hpp"
#include "unscbias/unsc_functions.hpp"

namespace unscbias {
namespace {

using testing::make_resolution;
using testing::p5_votes;

TEST(VoteChoice, ParsesOnlyThreeTokens) {
  EXPECT_EQ(parse_vote_token("favour"), VoteChoice::kFavour);
  EXPECT_EQ(parse_vote_token("against"), VoteChoice::kAgainst);
  EXPECT_EQ(parse_vote_token("abstention"), VoteChoice::kAbstention);
  EXPECT_EQ(parse_vote_token("yes"), std::nullopt);
  EXPECT_EQ(to_string(VoteChoice::kAbstention), "abstention");
}

TEST(Dates, RealCalendarDatesOnly) {
  EXPECT_TRUE(parse_date("2023-12-08"));
  EXPECT_TRUE(parse_date("2024-02-29"));
  EXPECT_FALSE(parse_date("2023-02-29"));
  EXPECT_FALSE(parse_date("8 December 2023"));
}

TEST(Validate, WellFormedAdoptedRecordHasNoViolations) {
  auto r = make_resolution("S/2020/1", "2020-01-10", AdoptionStatus::kAdopted,
                           p5_votes("favour", "favour", "favour", "abstention", "favour"));
  EXPECT_TRUE(validate_resolution(r).empty());
}

TEST(Validate, YesTokenIsOneVotesViolation) {
  auto r = make_resolution("S/2020/2", "2020-01-10", AdoptionStatus::kNonAdopted,
                           p5_votes("yes", "favour", "favour", "against", "favour"));
  auto v = validate_resolution(r);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "votes");
  EXPECT_EQ(v[0].resolution_id, "S/2020/2");
}

TEST(Validate, NonDateIsOneDateViolation) {
  auto r = make_resolution("S/2020/3", "last Tuesday", AdoptionStatus::kNonAdopted,
                           p5_votes("favour", "favour", "favour", "against", "favour"));
  auto v = validate_resolution(r);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "date");
}

TEST(Validate, AdoptedWithPermanentMemberAgainstIsRejected) {
  auto r = make_resolution("S/2020/4", "2020-03-01", AdoptionStatus::kAdopted,
                           p5_votes("favour", "favour", "favour", "against", "favour"));
  auto v = validate_resolution(r);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].resolution_id, "S/2020/4");
  EXPECT_EQ(v[0].field, "votes");
}

TEST(Validate, EmptyIdIsViolation) {
  auto r = make_resolution("", "2020-03-01", AdoptionStatus::kNonAdopted);
  auto v = validate_resolution(r);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].field, "id");
}

TEST(Load, EmptyFileGivesEmptyCorpus) {
  std::istringstream in("");
  auto r = parse_corpus(in);
  EXPECT_TRUE(r.corpus.empty());
  EXPECT_TRUE(r.ok());
}

TEST(Load, UnreadableFileThrows) {
  EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl"), CorpusError);
}

TEST(Load, ViolatingRecordIsReportedAndOthersLoad) {
  Corpus c({make_resolution("S/2020/5", "2020-03-01", AdoptionStatus::kAdopted,
                            p5_votes("favour", "favour", "favour", "favour", "favour"))},
           {});
  std::ostringstream out;
  write_corpus(c, out);
  auto bad = make_resolution("S/2020/6", "2020-03-02", AdoptionStatus::kAdopted,
                             p5_votes("favour", "against", "favour", "favour", "favour"));
  std::string text = out.str() + to_json(bad).dump() + "\n";
  std::istringstream in(text);
  auto r = parse_corpus(in);
  EXPECT_EQ(r.corpus.size(), 1u);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].resolution_id, "S/2020/6");
  EXPECT_EQ(r.violations[0].line, 3u);
}

TEST(Load, MalformedAndDuplicateRecords) {
  auto ok = make_resolution("S/2020/7", "2020-03-01", AdoptionStatus::kNonAdopted,
                            p5_votes("favour", "favour", "favour", "against", "favour"));
  std::string text = to_json(ok).dump() + "\n{not json\n" + to_json(ok).dump() + "\n";
  std::istringstream in(text);
  auto r = parse_corpus(in);
  EXPECT_EQ(r.corpus.size(), 1u);
  ASSERT_EQ(r.violations.size(), 2u);
  EXPECT_EQ(r.violations[0].field, "record");
  EXPECT_EQ(r.violations[1].field, "id");
}

TEST(Load, MissingFieldNamesField) {
  std::istringstream in(R"({"id":"S/2020/8","status":"adopted","votes":{},"context":"x"})" "\n");
  auto r = parse_corpus(in);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].resolution_id, "S/2020/8");
  EXPECT_EQ(r.violations[0].field, "date");
}

TEST(Load, UnknownSchemaThrows) {
  std::istringstream in(R"({"schema":"unscbias/corpus@9"})" "\n");
  EXPECT_THROW(parse_corpus(in), CorpusError);
}

TEST(Load, VoteKeysAreCanonicalized) {
  auto r = make_resolution("S/2020/9", "2020-03-01", AdoptionStatus::kNonAdopted,
                           {{"USA", "favour"}, {"Russia", "against"}});
  std::istringstream in(to_json(r).dump() + "\n");
  auto res = parse_corpus(in);
  ASSERT_TRUE(res.ok());
  const auto* loaded = res.corpus.find("S/2020/9");
  ASSERT_NE(loaded, nullptr);
  EXPECT_EQ(loaded->vote_of("Russian Federation"), VoteChoice::kAgainst);
  EXPECT_EQ(loaded->vote_of("United States"), VoteChoice::kFavour);
}

TEST(Corpus, RoundTripIsFieldForField) {
  auto c = retriever_fixture_corpus(5, 12);
  testing::TempDir dir;
  write_corpus(c, dir / "c.jsonl");
  auto r = load_corpus(dir / "c.jsonl");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.corpus, c);
  EXPECT_EQ(corpus_digest(r.corpus), corpus_digest(c));
}

TEST(Corpus, IndexAndPools) {
  auto c = retriever_fixture_corpus(5, 10);
  for (const auto* r : c.all()) {
    auto pool = c.pool_of(r->id);
    ASSERT_TRUE(pool);
    EXPECT_EQ(*pool == Pool::kAdopted, r->status == AdoptionStatus::kAdopted);
    EXPECT_EQ(c.find(r->id), r);
  }
  EXPECT_EQ(c.find("S/1900/1"), nullptr);
  EXPECT_EQ(c.p5().size(), 5u);
}

TEST(Corpus, DuplicateAcrossPoolsThrows) {
  auto a = make_resolution("S/2020/10", "2020-03-01", AdoptionStatus::kAdopted);
  auto b = make_resolution("S/2020/10", "2020-03-01", AdoptionStatus::kNonAdopted);
  EXPECT_THROW(Corpus({a}, {b}), CorpusError);
}

TEST(SyntheticCorpus, ReferenceProfileShape) {
  auto c = reference_profile_corpus();
  EXPECT_EQ(c.adopted().size(), 515u);
  EXPECT_EQ(c.non_adopted().size(), 66u);
  for (const auto& r : c.adopted()) {
    EXPECT_TRUE(validate_resolution(r).empty()) << r.id;
    EXPECT_TRUE(r.is_augmented());
  }
  for (const auto& r : c.non_adopted()) {
    bool any_against = false;
    for (const auto& n : p5_nations()) any_against |= r.vote_of(n) == VoteChoice::kAgainst;
    EXPECT_TRUE(any_against) << r.id;
  }
  for (const auto& [nation, counts] : reference_vote_counts()) {
    std::array<int, 3> got{};
    for (const auto& r : c.non_adopted()) ++got[static_cast<int>(*r.vote_of(nation))];
    EXPECT_EQ(got, counts) << nation;
  }
}

TEST(SyntheticCorpus, Deterministic) {
  EXPECT_EQ(corpus_digest(reference_profile_corpus(7)), corpus_digest(reference_profile_corpus(7)));
  EXPECT_NE(corpus_digest(reference_profile_corpus(7)), corpus_digest(reference_profile_corpus(8)));
}

TEST(UnscFunctions, TenOrdinalsAndRolePhrases) {
  const auto& f = unsc_functions();
  ASSERT_EQ(f.size(), 10u);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(f[i].ordinal, static_cast<int>(i + 1));
    EXPECT_FALSE(f[i].text.empty());
    EXPECT_EQ(f[i].role_phrase.rfind("regarding ", 0), 0u);
  }
  EXPECT_NE(f[1].role_phrase.find("investigating any dispute or situation"), std::string::npos);
}

}  // namespace
}  // namespace unscbias
