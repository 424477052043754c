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

#include <string>
#include <vector>

namespace unscbias {

struct UnscFunction {
  int ordinal = 0;  // 1..10
  std::string text;
  /// Phrase used after "UNSC Role :" in function-specific questions.
  std::string role_phrase;
};

/// The ten Security Council functions, ordinals 1..10.
const std::vector<UnscFunction>& unsc_functions();

}  // namespace unscbias
