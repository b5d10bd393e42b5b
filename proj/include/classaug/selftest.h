// classaug/selftest.h

// Copyright 2026  The classaug Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CLASSAUG_SELFTEST_H_
#define CLASSAUG_SELFTEST_H_

#include <string>
#include <vector>

namespace classaug {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast oracle, gradient and invariant checks over the whole library.
std::vector<PropertyResult> RunSelfTest();

}  // namespace classaug

#endif  // CLASSAUG_SELFTEST_H_
