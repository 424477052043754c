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

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "unscbias/corpus.hpp"

namespace unscbias {

/// favour / against / abstention counts of each permanent member over the
/// 66 non-adopted drafts of the reference corpus.
const std::map<std::string, std::array<int, 3>>& reference_vote_counts();

inline constexpr int kReferenceAdopted = 515;
inline constexpr int kReferenceNonAdopted = 66;

/// Deterministic stand-in for the reference corpus: same pool sizes, same
/// per-nation vote counts on the non-adopted pool, no permanent-member
/// against vote on the adopted pool, every record augmented. Texts are
/// generated, not real resolution texts.
Corpus reference_profile_corpus(std::uint64_t seed = 7);

/// Small augmented corpus with dense keyword overlap, for retriever tests.
Corpus retriever_fixture_corpus(std::uint64_t seed = 11, int size = 50);

}  // namespace unscbias
