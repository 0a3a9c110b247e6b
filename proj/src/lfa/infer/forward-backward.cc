// lfa/infer/forward-backward.cc
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

#include "lfa/infer/forward-backward.h"

#include <cmath>
#include <string>

namespace lfa {

void ValidateFrameScores(const WeightedGraph& graph,
                         const FrameScores& scores) {
  if (scores.rows() < 1)
    throw InvalidArgument("need at least one frame of scores");
  if (scores.cols() != graph.NumPdfs())
    throw InvalidArgument("score columns (" + std::to_string(scores.cols()) +
                          ") do not match graph pdfs (" +
                          std::to_string(graph.NumPdfs()) + ")");
  if (!scores.allFinite())
    throw InvalidArgument("frame scores must be finite");
}

ForwardBackwardResult ForwardBackward(const WeightedGraph& graph,
                                      const FrameScores& scores) {
  ValidateFrameScores(graph, scores);
  const int T = static_cast<int>(scores.rows());
  const int S = graph.NumStates();
  const auto& arcs = graph.arcs();

  Eigen::MatrixXd alpha(T + 1, S);
  alpha.setConstant(kLogZero);
  alpha(0, graph.Start()) = 0.0;
  for (int t = 0; t < T; ++t) {
    for (const Arc& a : arcs) {
      const double v = alpha(t, a.src);
      if (v == kLogZero) continue;
      const double cand = v + a.weight + scores(t, a.pdf);
      alpha(t + 1, a.dst) = LogAdd(alpha(t + 1, a.dst), cand);
    }
  }

  double log_total = kLogZero;
  for (int s : graph.FinalStates())
    log_total = LogAdd(log_total, alpha(T, s) + graph.FinalWeight(s));
  if (log_total == kLogZero)
    throw InfeasibleSupervision("no complete path of length " +
                                std::to_string(T));

  Eigen::MatrixXd beta(T + 1, S);
  beta.setConstant(kLogZero);
  for (int s : graph.FinalStates()) beta(T, s) = graph.FinalWeight(s);
  for (int t = T - 1; t >= 0; --t) {
    for (const Arc& a : arcs) {
      const double v = beta(t + 1, a.dst);
      if (v == kLogZero) continue;
      const double cand = a.weight + scores(t, a.pdf) + v;
      beta(t, a.src) = LogAdd(beta(t, a.src), cand);
    }
  }

  ForwardBackwardResult res;
  res.log_total = log_total;
  res.occupancies = Eigen::MatrixXd::Zero(T, graph.NumPdfs());
  for (int t = 0; t < T; ++t) {
    for (const Arc& a : arcs) {
      const double av = alpha(t, a.src);
      const double bv = beta(t + 1, a.dst);
      if (av == kLogZero || bv == kLogZero) continue;
      const double post =
          std::exp(av + a.weight + scores(t, a.pdf) + bv - log_total);
      res.occupancies(t, a.pdf) += post;
    }
  }
  return res;
}

}  // namespace lfa
