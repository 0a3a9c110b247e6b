// lfa/adapt/confidence.h
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
// Confidence of a decoded hypothesis and confidence-based utterance
// selection for unsupervised adaptation.

#ifndef LFA_ADAPT_CONFIDENCE_H_
#define LFA_ADAPT_CONFIDENCE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lfa/infer/lattice.h"

namespace lfa {

// Mean over frames of the lattice posterior mass that agrees with the
// best path's pdf at that frame. In (0, 1]; exactly 1 when the
// lattice holds a single path.
double ConfidenceScore(const Lattice& lattice,
                       const std::vector<int32_t>& best_path_pdfs);

struct ScoredUtterance {
  std::string id;
  double confidence = 0.0;
};

// Indices of the ceil(rate * n) highest-confidence utterances, rate in
// (0, 1]. Ties go to the lexicographically smaller id so selection is
// deterministic. The result is sorted by original position.
std::vector<int> SelectByConfidence(const std::vector<ScoredUtterance>& scored,
                                    double rate);

}  // namespace lfa

#endif  // LFA_ADAPT_CONFIDENCE_H_
