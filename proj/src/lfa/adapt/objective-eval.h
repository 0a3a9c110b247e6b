// lfa/adapt/objective-eval.h
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
// One forward pass plus the interpolated training objective of a
// single utterance, with the gradients at both heads. Shared by the
// network trainer and the adapter estimators.

#ifndef LFA_ADAPT_OBJECTIVE_EVAL_H_
#define LFA_ADAPT_OBJECTIVE_EVAL_H_

#include <Eigen/Core>

#include "lfa/graphs/weighted-graph.h"
#include "lfa/net/acoustic-net.h"
#include "lfa/net/lhuc.h"
#include "lfa/objectives/losses.h"

namespace lfa {

struct EvalOptions {
  // Frozen soft targets for the frame term, frames x pdfs. When null
  // and gamma2 > 0, targets are derived on the fly: from the sequence
  // term's numerator occupancies when gamma1 > 0, else from a
  // numerator pass over the frame head's own logits. Either way the
  // targets are constants of the gradient.
  const Eigen::MatrixXd* frame_targets = nullptr;

  // Unadapted frame-head logits for the output-divergence penalty;
  // null disables the penalty.
  const Eigen::MatrixXd* si_ce_logits = nullptr;
  double output_kl_weight = 0.0;
};

struct UtteranceEval {
  // Per-frame normalized, weight-scaled components and total.
  LossBreakdown loss;
  // Weight-scaled head gradients, d total / d head scores.
  Eigen::MatrixXd g_lfmmi;
  Eigen::MatrixXd g_ce;
  // Activation cache of the forward pass, ready for Backward.
  GradientTape tape;
  // The frame-head logits, kept for target refreshes downstream.
  Eigen::MatrixXd ce_logits;
};

// Evaluates gamma1 * sequence + gamma2 * frame terms (each divided by
// the frame count) plus the optional output-divergence penalty, at the
// given adapter stack. den_graph may be null when gamma1 == 0; the
// sequence machinery is skipped entirely then.
UtteranceEval EvalAdaptationObjective(const AcousticNet& net,
                                      const LhucStack* stack,
                                      const Eigen::MatrixXd& features,
                                      const WeightedGraph& num_graph,
                                      const WeightedGraph* den_graph,
                                      const ObjectiveConfig& objective,
                                      const EvalOptions& options = {});

}  // namespace lfa

#endif  // LFA_ADAPT_OBJECTIVE_EVAL_H_
