// lfa/adapt/bucketing.h
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
//
// Length bucketing: utterances are padded up to the nearest bucket
// boundary on a geometric grid so the trainer sees a small set of
// distinct lengths.

#ifndef LFA_ADAPT_BUCKETING_H_
#define LFA_ADAPT_BUCKETING_H_

#include <vector>

namespace lfa {

// Strictly increasing bucket lengths from min_len to max_len on a
// geometric grid with at most `count` entries; the last entry is
// always max_len. Requires 1 <= min_len <= max_len and count >= 1.
std::vector<int> MakeGeometricBuckets(int min_len, int max_len,
                                      int count = 40);

// Smallest bucket >= frames. Frames shorter than the first bucket are
// padded up to it; frames beyond the last bucket are an error.
int BucketLength(int frames, const std::vector<int>& buckets);

}  // namespace lfa

#endif  // LFA_ADAPT_BUCKETING_H_
