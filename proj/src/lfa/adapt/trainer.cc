// lfa/adapt/trainer.cc
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

#include "lfa/adapt/trainer.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "lfa/adapt/objective-eval.h"
#include "lfa/base/common.h"

namespace lfa {
namespace {

std::vector<int> ShuffledOrder(int n, Rng& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.UniformInt(0, i));
    std::swap(order[i], order[j]);
  }
  return order;
}

}  // namespace

void TrainOptions::Validate() const {
  objective.Validate();
  if (epochs < 0) throw InvalidArgument("train: negative epochs");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("train: learning_rate must be positive");
  }
  if (speaker_adaptive) {
    if (sat_layers.empty()) {
      throw InvalidArgument("train: speaker_adaptive needs sat_layers");
    }
    if (!(sat_learning_rate > 0.0) || !std::isfinite(sat_learning_rate)) {
      throw InvalidArgument("train: sat_learning_rate must be positive");
    }
  }
}

TrainResult TrainNet(const NetDims& dims,
                     const std::vector<TrainUtterance>& utts,
                     const WeightedGraph& den_graph,
                     const TrainOptions& options) {
  options.Validate();
  if (utts.empty()) throw InvalidArgument("train: no utterances");

  Rng init_rng = Rng::ForStream(options.seed, "train/init");
  TrainResult result;
  result.net = AcousticNet::RandomInit(dims, init_rng);
  const AcousticNet& net = result.net;

  for (const TrainUtterance& utt : utts) {
    if (utt.features.rows() < 1 || utt.features.cols() != net.InputDim()) {
      throw InvalidArgument("train: utterance " + utt.id +
                            " feature shape mismatch");
    }
    if (utt.supervision.NumPdfs() != net.NumPdfs() ||
        den_graph.NumPdfs() != net.NumPdfs()) {
      throw InvalidArgument("train: graph pdf count does not match the net");
    }
    if (options.speaker_adaptive && utt.speaker.empty()) {
      throw InvalidArgument("train: utterance " + utt.id + " has no speaker");
    }
  }

  if (options.speaker_adaptive) {
    for (const TrainUtterance& utt : utts) {
      if (result.adapters.count(utt.speaker) == 0) {
        result.adapters.emplace(
            utt.speaker,
            SpeakerAdapter::Identity(net, AdapterMode::kDeterministic,
                                     options.sat_layers, utt.speaker));
      }
    }
  }

  const BackwardRequest request{.net = true,
                                .adapter = options.speaker_adaptive};
  const int n = static_cast<int>(utts.size());
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    Rng shuffle_rng =
        Rng::ForStream(options.seed, "train/shuffle/" + std::to_string(epoch));
    const std::vector<int> order = ShuffledOrder(n, shuffle_rng);
    double epoch_loss = 0.0;
    for (int idx : order) {
      const TrainUtterance& utt = utts[static_cast<std::size_t>(idx)];
      SpeakerAdapter* adapter =
          options.speaker_adaptive ? &result.adapters.at(utt.speaker) : nullptr;
      LhucStack stack;
      if (adapter != nullptr) {
        stack = adapter->PredictionStack(net.NumHiddenLayers());
      }
      UtteranceEval eval = EvalAdaptationObjective(
          net, adapter != nullptr ? &stack : nullptr, utt.features,
          utt.supervision, &den_graph, options.objective);
      if (!std::isfinite(eval.loss.total)) {
        throw Error("train: non-finite loss on " + utt.id + " in epoch " +
                    std::to_string(epoch));
      }
      const NetGradients grads =
          net.Backward(eval.tape, eval.g_lfmmi, eval.g_ce, request);
      ApplySgd(result.net, grads, options.learning_rate);
      if (adapter != nullptr) {
        for (LayerAdapter& la : adapter->layers) {
          LFA_CHECK(grads.lhuc_r[la.layer].has_value());
          ApplySgdVec(la.mu, *grads.lhuc_r[la.layer],
                      options.sat_learning_rate,
                      "sat adapter, layer " + std::to_string(la.layer));
        }
      }
      epoch_loss += eval.loss.total;
    }
    result.epoch_losses.push_back(epoch_loss / n);
  }
  return result;
}

}  // namespace lfa
