// lfa/base/common.h
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

#ifndef LFA_BASE_COMMON_H_
#define LFA_BASE_COMMON_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace lfa {

// Base class for every toolkit failure so callers can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad caller-supplied value or configuration.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// The label sequence cannot be realized in the requested number of frames,
// or a graph admits no complete path of the requested length.
class InfeasibleSupervision : public Error {
 public:
  explicit InfeasibleSupervision(const std::string& msg) : Error(msg) {}
};

// A persisted file failed magic, shape, or checksum validation.
class CorruptArchive : public Error {
 public:
  explicit CorruptArchive(const std::string& msg) : Error(msg) {}
};

// A manifest entry points at a record that is not in the archive.
class MissingRecord : public Error {
 public:
  explicit MissingRecord(const std::string& msg) : Error(msg) {}
};

namespace internal {
[[noreturn]] void ThrowCheckFailure(const char* expr, const char* file,
                                    int line);
}  // namespace internal

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; exact for -inf arguments.
inline double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace lfa

// Internal invariant check; failures indicate a bug, not bad input.
#define LFA_CHECK(expr)                                                  \
  do {                                                                   \
    if (!(expr))                                                         \
      ::lfa::internal::ThrowCheckFailure(#expr, __FILE__, __LINE__);     \
  } while (0)

#endif  // LFA_BASE_COMMON_H_
