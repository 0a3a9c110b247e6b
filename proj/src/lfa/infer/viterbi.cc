// lfa/infer/viterbi.cc
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

#include "lfa/infer/viterbi.h"

#include <algorithm>
#include <string>

namespace lfa {

BestPath ViterbiBestPath(const WeightedGraph& graph,
                         const FrameScores& scores) {
  ValidateFrameScores(graph, scores);
  const int T = static_cast<int>(scores.rows());
  const int S = graph.NumStates();
  const auto& arcs = graph.arcs();

  Eigen::MatrixXd best(T + 1, S);
  best.setConstant(kLogZero);
  best(0, graph.Start()) = 0.0;
  // Arc index taken to reach (t, state); -1 where unreached.
  std::vector<std::vector<int>> backptr(
      T, std::vector<int>(S, -1));
  for (int t = 0; t < T; ++t) {
    for (int ai = 0; ai < static_cast<int>(arcs.size()); ++ai) {
      const Arc& a = arcs[ai];
      const double v = best(t, a.src);
      if (v == kLogZero) continue;
      const double cand = v + a.weight + scores(t, a.pdf);
      // Strict improvement only, so the earliest arc wins ties.
      if (cand > best(t + 1, a.dst)) {
        best(t + 1, a.dst) = cand;
        backptr[t][a.dst] = ai;
      }
    }
  }

  int final_state = -1;
  double final_score = kLogZero;
  for (int s : graph.FinalStates()) {
    if (best(T, s) == kLogZero) continue;
    const double cand = best(T, s) + graph.FinalWeight(s);
    if (cand > final_score) {
      final_score = cand;
      final_state = s;
    }
  }
  if (final_state < 0)
    throw InfeasibleSupervision("no complete path of length " +
                                std::to_string(T));

  BestPath path;
  path.score = final_score;
  path.states.assign(T + 1, 0);
  path.pdfs.assign(T, 0);
  path.states[T] = final_state;
  std::vector<int32_t> reversed_tokens;
  int state = final_state;
  for (int t = T - 1; t >= 0; --t) {
    const int ai = backptr[t][state];
    LFA_CHECK(ai >= 0);
    const Arc& a = arcs[ai];
    path.pdfs[t] = a.pdf;
    if (a.olabel != kNoLabel) reversed_tokens.push_back(a.olabel);
    state = a.src;
    path.states[t] = state;
  }
  LFA_CHECK(state == graph.Start());
  path.tokens.assign(reversed_tokens.rbegin(), reversed_tokens.rend());
  return path;
}

}  // namespace lfa
