// lfa/infer/frame-scores.h
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

#ifndef LFA_INFER_FRAME_SCORES_H_
#define LFA_INFER_FRAME_SCORES_H_

#include <Eigen/Core>

#include "lfa/graphs/weighted-graph.h"

namespace lfa {

// Per-frame log acoustic scores: rows are frames, columns are pdfs.
using FrameScores = Eigen::MatrixXd;

// Throws InvalidArgument unless scores has at least one frame, one
// column per graph pdf, and only finite entries.
void ValidateFrameScores(const WeightedGraph& graph, const FrameScores& scores);

}  // namespace lfa

#endif  // LFA_INFER_FRAME_SCORES_H_
