// lfa/objectives/losses.cc
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

#include "lfa/objectives/losses.h"

#include <cmath>
#include <string>

#include "lfa/infer/forward-backward.h"

namespace lfa {

void ObjectiveConfig::Validate() const {
  if (gamma1 < 0.0 || gamma2 < 0.0)
    throw InvalidArgument("objective weights must be non-negative");
  if (gamma1 == 0.0 && gamma2 == 0.0)
    throw InvalidArgument("at least one of gamma1/gamma2 must be positive");
  if (gamma3.has_value() && *gamma3 < 0.0)
    throw InvalidArgument("gamma3 must be non-negative");
}

SequenceLoss LfmmiLossAndHeadGrad(const WeightedGraph& num_graph,
                                  const WeightedGraph& den_graph,
                                  const FrameScores& scores) {
  if (num_graph.NumPdfs() != den_graph.NumPdfs())
    throw InvalidArgument("numerator and denominator pdf counts differ");
  const auto num = ForwardBackward(num_graph, scores);
  const auto den = ForwardBackward(den_graph, scores);
  SequenceLoss out;
  out.log_num = num.log_total;
  out.log_den = den.log_total;
  out.loss = -(num.log_total - den.log_total);
  out.head_grad = den.occupancies - num.occupancies;
  out.num_occupancies = num.occupancies;
  return out;
}

Eigen::MatrixXd RowSoftmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    Eigen::ArrayXd e = (logits.row(t).array() - m).exp();
    out.row(t) = (e / e.sum()).matrix();
  }
  return out;
}

FrameCeLoss CeLossAndHeadGrad(const Eigen::MatrixXd& targets,
                              const Eigen::MatrixXd& logits) {
  if (targets.rows() != logits.rows() || targets.cols() != logits.cols())
    throw InvalidArgument("target and logit shapes differ");
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    if (std::abs(targets.row(t).sum() - 1.0) > 1e-6)
      throw InvalidArgument("target row " + std::to_string(t) +
                            " is not a distribution");
    if (targets.row(t).minCoeff() < -1e-12)
      throw InvalidArgument("negative target mass at row " +
                            std::to_string(t));
  }
  FrameCeLoss out;
  out.head_grad = RowSoftmax(logits) - targets;
  out.loss = 0.0;
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse =
        m + std::log((logits.row(t).array() - m).exp().sum());
    for (Eigen::Index y = 0; y < logits.cols(); ++y) {
      const double p = targets(t, y);
      if (p > 0.0) out.loss -= p * (logits(t, y) - lse);
    }
  }
  return out;
}

FrameCeLoss CeLossAndHeadGrad(const WeightedGraph& num_graph,
                              const Eigen::MatrixXd& logits) {
  const auto num = ForwardBackward(num_graph, logits);
  return CeLossAndHeadGrad(num.occupancies, logits);
}

LossBreakdown InterpolatedLoss(const ObjectiveConfig& cfg, double mmi_loss,
                               double ce_loss, double kl,
                               double regularizer) {
  cfg.Validate();
  LossBreakdown out;
  out.sequence = cfg.gamma1 * mmi_loss;
  out.frame_ce = cfg.gamma2 * ce_loss;
  out.kl = cfg.Gamma3() * kl;
  out.regularizer = regularizer;
  out.total = out.sequence + out.frame_ce + out.kl + out.regularizer;
  return out;
}

}  // namespace lfa
