// lfa/adapt/objective-eval.cc
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

#include "lfa/adapt/objective-eval.h"

#include <cmath>
#include <optional>
#include <utility>

#include "lfa/base/common.h"

namespace lfa {
namespace {

double RowEntropySum(const Eigen::MatrixXd& p) {
  double h = 0.0;
  for (Eigen::Index t = 0; t < p.rows(); ++t) {
    for (Eigen::Index y = 0; y < p.cols(); ++y) {
      const double v = p(t, y);
      if (v > 0.0) h -= v * std::log(v);
    }
  }
  return h;
}

}  // namespace

UtteranceEval EvalAdaptationObjective(const AcousticNet& net,
                                      const LhucStack* stack,
                                      const Eigen::MatrixXd& features,
                                      const WeightedGraph& num_graph,
                                      const WeightedGraph* den_graph,
                                      const ObjectiveConfig& objective,
                                      const EvalOptions& options) {
  objective.Validate();
  const Eigen::Index frames = features.rows();
  if (frames < 1) throw InvalidArgument("objective: empty utterance");

  UtteranceEval out;
  HeadScores heads = net.Forward(features, stack, &out.tape);
  out.ce_logits = std::move(heads.ce);
  const double inv_t = 1.0 / static_cast<double>(frames);

  out.g_lfmmi = Eigen::MatrixXd::Zero(frames, net.NumPdfs());
  out.g_ce = Eigen::MatrixXd::Zero(frames, net.NumPdfs());
  double mmi_raw = 0.0;
  double ce_raw = 0.0;
  double penalty = 0.0;

  std::optional<SequenceLoss> seq;
  if (objective.gamma1 > 0.0) {
    if (den_graph == nullptr) {
      throw InvalidArgument(
          "objective: sequence term needs a denominator graph");
    }
    seq = LfmmiLossAndHeadGrad(num_graph, *den_graph, heads.lfmmi);
    mmi_raw = seq->loss * inv_t;
    out.g_lfmmi = (objective.gamma1 * inv_t) * seq->head_grad;
  }

  if (objective.gamma2 > 0.0) {
    FrameCeLoss ce;
    if (options.frame_targets != nullptr) {
      if (options.frame_targets->rows() != frames ||
          options.frame_targets->cols() != net.NumPdfs()) {
        throw InvalidArgument("objective: frame target shape mismatch");
      }
      ce = CeLossAndHeadGrad(*options.frame_targets, out.ce_logits);
    } else if (seq.has_value()) {
      ce = CeLossAndHeadGrad(seq->num_occupancies, out.ce_logits);
    } else {
      ce = CeLossAndHeadGrad(num_graph, out.ce_logits);
    }
    ce_raw = ce.loss * inv_t;
    out.g_ce = (objective.gamma2 * inv_t) * ce.head_grad;
  }

  if (options.si_ce_logits != nullptr && options.output_kl_weight > 0.0) {
    if (options.si_ce_logits->rows() != frames ||
        options.si_ce_logits->cols() != net.NumPdfs()) {
      throw InvalidArgument("objective: reference logits shape mismatch");
    }
    const Eigen::MatrixXd p_ref = RowSoftmax(*options.si_ce_logits);
    const FrameCeLoss div = CeLossAndHeadGrad(p_ref, out.ce_logits);
    // KL(ref || adapted) = cross entropy minus the reference entropy.
    const double kl_value = div.loss - RowEntropySum(p_ref);
    penalty = options.output_kl_weight * kl_value * inv_t;
    out.g_ce += (options.output_kl_weight * inv_t) * div.head_grad;
  }

  out.loss = InterpolatedLoss(objective, mmi_raw, ce_raw, 0.0, penalty);
  return out;
}

}  // namespace lfa
