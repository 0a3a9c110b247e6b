// lfa/adapt/estimators.h
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
// Speaker adapter estimation. The deterministic estimator runs
// per-utterance SGD on the scaling parameters, optionally with a
// quadratic prior penalty or a divergence penalty against the
// unadapted output distribution. The Bayesian estimator learns a
// diagonal Gaussian posterior by stochastic backpropagation through
// reparameterized samples, regularized by the exact KL to the prior.
// With a collapsed posterior (zero_sigma) and one sample per step the
// Bayesian path reproduces the deterministic trajectory exactly.

#ifndef LFA_ADAPT_ESTIMATORS_H_
#define LFA_ADAPT_ESTIMATORS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfa/adapt/prior.h"
#include "lfa/adapt/speaker-adapter.h"
#include "lfa/graphs/weighted-graph.h"
#include "lfa/net/acoustic-net.h"
#include "lfa/objectives/losses.h"

namespace lfa {

enum class AdaptMethod { kDeterministic, kBayesian };

// Extra regularizer for the deterministic estimator.
enum class AdaptPenalty { kNone, kParamPrior, kOutputKl };

const char* AdaptMethodName(AdaptMethod method);
AdaptMethod AdaptMethodFromName(const std::string& name);
const char* AdaptPenaltyName(AdaptPenalty penalty);
AdaptPenalty AdaptPenaltyFromName(const std::string& name);

struct AdaptOptions {
  AdaptMethod method = AdaptMethod::kDeterministic;
  AdaptPenalty penalty = AdaptPenalty::kNone;
  // Adaptation default: frame term only.
  ObjectiveConfig objective{0.0, 0.1, std::nullopt};
  int epochs = 7;
  double learning_rate = 0.1;
  // Monte Carlo samples per update in the Bayesian estimator.
  int num_samples = 1;
  // Hidden layers that receive scaling vectors; empty means all.
  std::vector<int> hooked_layers;
  // Prior for the Bayesian KL term and the quadratic penalty.
  GaussianPrior prior;
  // Weight of the chosen penalty (the Bayesian KL term is weighted by
  // the objective's gamma3 instead).
  double penalty_weight = 1.0;
  // Collapse the Bayesian posterior onto its mean: samples become mu,
  // log_sigma is frozen and the KL term is dropped.
  bool zero_sigma = false;
  uint64_t seed = 0;

  void Validate() const;
};

struct AdaptUtterance {
  std::string id;
  Eigen::MatrixXd features;      // frames x input_dim
  WeightedGraph supervision;     // numerator graph for the labels
};

struct AdaptReport {
  // Mean per-utterance scaled loss per epoch, prior terms included at
  // their per-update share.
  std::vector<double> epoch_losses;
  int updates = 0;
  bool diverged = false;
  std::string note;
};

// Runs options.epochs passes of per-utterance SGD starting from the
// identity adapter and returns the result. Frame targets are frozen
// at the epoch-start parameters and refreshed every epoch. On a
// non-finite loss or gradient the last adapter with a finite loss is
// returned and the report marks the divergence. epochs == 0 or an
// empty utterance list yields the identity adapter.
SpeakerAdapter EstimateAdapter(const AcousticNet& net,
                               const std::vector<AdaptUtterance>& utts,
                               const WeightedGraph* den_graph,
                               const AdaptOptions& options,
                               const std::string& speaker,
                               AdaptReport* report = nullptr);

}  // namespace lfa

#endif  // LFA_ADAPT_ESTIMATORS_H_
