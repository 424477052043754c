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

#include <stdexcept>
#include <string>
#include <vector>

#include "unscbias/corpus.hpp"
#include "unscbias/gateway.hpp"

namespace unscbias {

struct AugmentTemplates {
  std::string model_id = "gpt-4o-mini";
  /// "{context}" is replaced by the resolution context.
  std::string prompt =
      "Read the following UN Security Council draft resolution and return a JSON object with these fields:\n"
      "\"summary\": a short summary of the resolution,\n"
      "\"action_items\": the key actions the resolution proposes,\n"
      "\"geopolitical_region\": the region the resolution concerns,\n"
      "\"target_nations\": a list of the nations the resolution targets,\n"
      "\"keywords\": a list of domain keywords.\n"
      "Return only the JSON object.\n"
      " - context:\n{context}";
  bool overwrite = false;
  std::string test_id = "augment";
};

class AugmentError : public std::runtime_error {
 public:
  AugmentError(std::string resolution_id, const std::string& what)
      : std::runtime_error(resolution_id + ": " + what), resolution_id_(std::move(resolution_id)) {}
  const std::string& resolution_id() const { return resolution_id_; }

 private:
  std::string resolution_id_;
};

/// The model answered, but not every derived field could be read.
class PartialAugmentationError : public AugmentError {
 public:
  PartialAugmentationError(std::string resolution_id, std::vector<std::string> missing);
  const std::vector<std::string>& missing_fields() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

/// Returns a copy of `res` with summary, action_items, geopolitical_region,
/// target_nations and keywords filled from one model call. Already-augmented
/// records are returned unchanged unless `templates.overwrite` is set.
Resolution augment_resolution(const Resolution& res, ModelGateway& gateway, const AugmentTemplates& templates = {},
                              int run_index = 1);

}  // namespace unscbias
