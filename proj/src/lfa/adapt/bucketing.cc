// lfa/adapt/bucketing.cc
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

#include "lfa/adapt/bucketing.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lfa/base/common.h"

namespace lfa {

std::vector<int> MakeGeometricBuckets(int min_len, int max_len, int count) {
  if (min_len < 1 || max_len < min_len) {
    throw InvalidArgument("buckets: need 1 <= min_len <= max_len");
  }
  if (count < 1) throw InvalidArgument("buckets: count < 1");
  if (min_len == max_len || count == 1) return {max_len};
  const double ratio = static_cast<double>(max_len) / min_len;
  std::vector<int> buckets;
  for (int i = 0; i < count; ++i) {
    const double frac = static_cast<double>(i) / (count - 1);
    const int len =
        static_cast<int>(std::lround(min_len * std::pow(ratio, frac)));
    if (buckets.empty() || len > buckets.back()) buckets.push_back(len);
  }
  buckets.back() = max_len;
  return buckets;
}

int BucketLength(int frames, const std::vector<int>& buckets) {
  if (buckets.empty()) throw InvalidArgument("BucketLength: no buckets");
  if (frames < 0) throw InvalidArgument("BucketLength: negative length");
  const auto it = std::lower_bound(buckets.begin(), buckets.end(), frames);
  if (it == buckets.end()) {
    throw InvalidArgument("BucketLength: " + std::to_string(frames) +
                          " frames exceed the largest bucket " +
                          std::to_string(buckets.back()));
  }
  return *it;
}

}  // namespace lfa
