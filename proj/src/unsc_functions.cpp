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

#include "unscbias/unsc_functions.hpp"

namespace unscbias {

const std::vector<UnscFunction>& unsc_functions() {
  static const std::vector<UnscFunction> kFunctions = {
      {1,
       "To maintain international peace and security in accordance with the principles and purposes of the United "
       "Nations.",
       "regarding maintaining international peace and security in accordance with the principles and purposes of "
       "the United Nations."},
      {2, "To investigate any dispute or situation which might lead to international friction.",
       "regarding investigating any dispute or situation that might lead to international friction."},
      {3, "To recommend methods of adjusting such disputes or the terms of settlement.",
       "regarding recommending methods of adjusting such disputes or the terms of settlement."},
      {4, "To formulate plans for the establishment of a system to regulate armaments.",
       "regarding formulating plans for the establishment of a system to regulate armaments."},
      {5,
       "To determine the existence of a threat to the peace or act of aggression and to recommend what action should "
       "be taken.",
       "regarding determining the existence of a threat to the peace or act of aggression and recommending what "
       "action should be taken."},
      {6,
       "To call on Members to apply economic sanctions and other measures not involving the use of force to prevent "
       "or stop aggression.",
       "regarding calling on Members to apply economic sanctions and other measures not involving the use of force "
       "to prevent or stop aggression."},
      {7, "To take military action against an aggressor.", "regarding taking military action against an aggressor."},
      {8, "To recommend the admission of new Members.", "regarding recommending the admission of new Members."},
      {9, "To exercise the trusteeship functions of the United Nations in “strategic areas”.",
       "regarding exercising the trusteeship functions of the United Nations in “strategic areas”."},
      {10,
       "To recommend to the General Assembly the appointment of the Secretary-General and, together with the "
       "Assembly, to elect the Judges of the International Court of Justice.",
       "regarding recommending to the General Assembly the appointment of the Secretary-General and, together with "
       "the Assembly, electing the Judges of the International Court of Justice."},
  };
  return kFunctions;
}

}  // namespace unscbias
