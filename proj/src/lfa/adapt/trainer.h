// lfa/adapt/trainer.h
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
// Acoustic model training by per-utterance SGD on the interpolated
// sequence + frame objective. Optionally trains with per-speaker
// scaling vectors in the loop (speaker adaptive training): each
// utterance is forwarded through its speaker's adapter, the adapter is
// updated jointly with the network, and the canonical network is what
// comes out.

#ifndef LFA_ADAPT_TRAINER_H_
#define LFA_ADAPT_TRAINER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfa/adapt/speaker-adapter.h"
#include "lfa/graphs/weighted-graph.h"
#include "lfa/net/acoustic-net.h"
#include "lfa/objectives/losses.h"

namespace lfa {

struct TrainUtterance {
  std::string id;
  std::string speaker;
  Eigen::MatrixXd features;   // frames x input_dim
  WeightedGraph supervision;  // numerator graph
};

struct TrainOptions {
  ObjectiveConfig objective;  // defaults: sequence 1.0, frame 0.1
  int epochs = 10;
  double learning_rate = 0.02;
  uint64_t seed = 0;
  // Speaker adaptive training: learn per-speaker scaling vectors on
  // these hidden layers alongside the network.
  bool speaker_adaptive = false;
  std::vector<int> sat_layers = {0};
  double sat_learning_rate = 0.1;

  void Validate() const;
};

struct TrainResult {
  AcousticNet net;
  // Training-time adapters, one per speaker; empty unless
  // speaker_adaptive was set. Test time starts from identity again.
  std::map<std::string, SpeakerAdapter> adapters;
  // Mean per-utterance scaled loss per epoch.
  std::vector<double> epoch_losses;
};

// Initializes the network from `seed` and trains it on the utterances
// with a fresh shuffle every epoch. Throws Error if an update
// produces a non-finite parameter or gradient.
TrainResult TrainNet(const NetDims& dims,
                     const std::vector<TrainUtterance>& utts,
                     const WeightedGraph& den_graph,
                     const TrainOptions& options);

}  // namespace lfa

#endif  // LFA_ADAPT_TRAINER_H_
