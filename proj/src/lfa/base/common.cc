// lfa/base/common.cc
//
// Copyright 2026 The lfadapt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lfa/base/common.h"

#include <sstream>

namespace lfa {
namespace internal {

void ThrowCheckFailure(const char* expr, const char* file, int line) {
  std::ostringstream os;
  os << "check failed: " << expr << " (" << file << ":" << line << ")";
  throw Error(os.str());
}

}  // namespace internal
}  // namespace lfa
