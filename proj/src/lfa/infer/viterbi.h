// lfa/infer/viterbi.h
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

#ifndef LFA_INFER_VITERBI_H_
#define LFA_INFER_VITERBI_H_

#include <cstdint>
#include <vector>

#include "lfa/graphs/weighted-graph.h"
#include "lfa/infer/frame-scores.h"

namespace lfa {

struct BestPath {
  double score = 0.0;               // includes the final weight
  std::vector<int32_t> states;      // length T+1, starts at the start state
  std::vector<int32_t> pdfs;        // length T
  std::vector<int32_t> tokens;      // output labels along the path, in order
};

// Max-plus best path over exactly scores.rows() frames. Ties are
// broken deterministically: the earliest arc in the sorted arc array
// wins at every step and the lowest-numbered final state wins at the
// end. Throws InfeasibleSupervision when no complete path exists.
BestPath ViterbiBestPath(const WeightedGraph& graph, const FrameScores& scores);

}  // namespace lfa

#endif  // LFA_INFER_VITERBI_H_
