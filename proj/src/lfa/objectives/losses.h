// lfa/objectives/losses.h
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
// Sequence and frame objectives with their gradients at the score
// matrices (the "head gradients"). Both are plain unweighted sums
// over frames; interpolation weights and any per-frame normalization
// are applied by the callers that combine them.

#ifndef LFA_OBJECTIVES_LOSSES_H_
#define LFA_OBJECTIVES_LOSSES_H_

#include <optional>

#include <Eigen/Core>

#include "lfa/graphs/weighted-graph.h"
#include "lfa/infer/frame-scores.h"

namespace lfa {

// Interpolation weights of the training criterion. gamma1 scales the
// sequence term, gamma2 the frame cross-entropy term, gamma3 the
// Bayesian KL term and defaults to gamma1 + gamma2 when unset.
struct ObjectiveConfig {
  double gamma1 = 1.0;
  double gamma2 = 0.1;
  std::optional<double> gamma3;

  double Gamma3() const { return gamma3.value_or(gamma1 + gamma2); }
  void Validate() const;
};

struct SequenceLoss {
  double loss = 0.0;  // -(log_num - log_den), never negative
  double log_num = 0.0;
  double log_den = 0.0;
  // d loss / d scores = denominator posteriors - numerator
  // occupancies; rows sum to zero.
  Eigen::MatrixXd head_grad;
  // Numerator occupancies, reusable as frame targets.
  Eigen::MatrixXd num_occupancies;
};

// Maximum-mutual-information sequence loss of one utterance given its
// supervision and competitor graphs. Both graphs see the same scores.
SequenceLoss LfmmiLossAndHeadGrad(const WeightedGraph& num_graph,
                                  const WeightedGraph& den_graph,
                                  const FrameScores& scores);

struct FrameCeLoss {
  double loss = 0.0;  // -sum_t sum_y targets(t,y) log softmax(logits)(t,y)
  Eigen::MatrixXd head_grad;  // softmax(logits) - targets
};

// Cross entropy against soft frame targets. Targets are treated as
// constants; rows must be distributions.
FrameCeLoss CeLossAndHeadGrad(const Eigen::MatrixXd& targets,
                              const Eigen::MatrixXd& logits);

// Convenience: derives the targets as the numerator occupancies under
// the given logits, then scores against them.
FrameCeLoss CeLossAndHeadGrad(const WeightedGraph& num_graph,
                              const Eigen::MatrixXd& logits);

// Numerically stable per-row softmax.
Eigen::MatrixXd RowSoftmax(const Eigen::MatrixXd& logits);

struct LossBreakdown {
  double sequence = 0.0;   // already negated: gamma1 * mmi loss
  double frame_ce = 0.0;   // gamma2 * ce loss
  double kl = 0.0;         // gamma3 * divergence penalty
  double regularizer = 0.0;
  double total = 0.0;
};

// Linear combination of the component values under cfg; kl and reg
// come in unscaled and pick up gamma3 / their own weights upstream.
LossBreakdown InterpolatedLoss(const ObjectiveConfig& cfg, double mmi_loss,
                               double ce_loss, double kl = 0.0,
                               double regularizer = 0.0);

}  // namespace lfa

#endif  // LFA_OBJECTIVES_LOSSES_H_
