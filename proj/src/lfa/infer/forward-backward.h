// lfa/infer/forward-backward.h
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
// Exact forward-backward over a weighted acceptor and T frames of log
// scores, in the log semiring with double precision. Runs in
// O(T * arcs).

#ifndef LFA_INFER_FORWARD_BACKWARD_H_
#define LFA_INFER_FORWARD_BACKWARD_H_

#include <Eigen/Core>

#include "lfa/graphs/weighted-graph.h"
#include "lfa/infer/frame-scores.h"

namespace lfa {

struct ForwardBackwardResult {
  // log of the total score of all complete length-T paths.
  double log_total = 0.0;
  // frames x pdfs posterior state-occupancy matrix; every row sums to
  // one up to rounding.
  Eigen::MatrixXd occupancies;
};

// Throws InfeasibleSupervision when the graph admits no complete path
// of exactly scores.rows() frames.
ForwardBackwardResult ForwardBackward(const WeightedGraph& graph,
                                      const FrameScores& scores);

}  // namespace lfa

#endif  // LFA_INFER_FORWARD_BACKWARD_H_
