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

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace unscbias {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

/// Lowercased alphanumeric runs; every other byte is a separator.
std::vector<std::string> word_tokens(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Hex-encoded SHA-256 of the bytes of `data`.
std::string sha256_hex(std::string_view data);

/// 64-bit FNV-1a; stable across platforms and standard libraries.
std::uint64_t fnv1a64(std::string_view data);

/// Uniform draw in [0, bound) by rejection. std::uniform_int_distribution
/// is not specified bit-for-bit across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Removes markdown emphasis markers and collapses whitespace runs.
std::string normalize_response(std::string_view s);

/// Splits into sentences on [.!?] followed by whitespace, and on newlines.
std::vector<std::string> split_sentences(std::string_view s);

}  // namespace unscbias
