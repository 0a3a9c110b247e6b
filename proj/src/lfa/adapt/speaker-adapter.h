// lfa/adapt/speaker-adapter.h
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
// Per-speaker adapter parameters. A deterministic adapter stores one
// point vector r per hooked hidden layer; a Bayesian adapter stores a
// diagonal Gaussian posterior (mu, log_sigma) instead and predicts at
// its mean. Identity adapters (r = 0, or mu = 0 with unit sigma)
// reproduce the unadapted network exactly.

#ifndef LFA_ADAPT_SPEAKER_ADAPTER_H_
#define LFA_ADAPT_SPEAKER_ADAPTER_H_

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfa/base/rng.h"
#include "lfa/net/acoustic-net.h"
#include "lfa/net/lhuc.h"

namespace lfa {

enum class AdapterMode { kDeterministic, kBayesian };

const char* AdapterModeName(AdapterMode mode);
AdapterMode AdapterModeFromName(const std::string& name);

struct LayerAdapter {
  int layer = 0;
  // Deterministic mode uses mu as the point estimate r itself.
  Eigen::VectorXd mu;
  // Posterior log standard deviations; empty in deterministic mode.
  Eigen::VectorXd log_sigma;
};

struct SpeakerAdapter {
  std::string speaker;
  AdapterMode mode = AdapterMode::kDeterministic;
  std::vector<LayerAdapter> layers;  // strictly ascending layer index

  // Zero-parameter adapter over the given hidden layers of `net`.
  // An empty hooked_layers list means every hidden layer.
  static SpeakerAdapter Identity(const AcousticNet& net, AdapterMode mode,
                                 const std::vector<int>& hooked_layers,
                                 std::string speaker);

  // Checks layer ids and vector sizes against the network.
  void Validate(const AcousticNet& net) const;

  std::vector<int> HookedLayers() const;

  // Evaluation-time stack: r for deterministic adapters, mu for
  // Bayesian ones. num_layers is the network's hidden layer count.
  LhucStack PredictionStack(int num_layers) const;

  // One reparameterized sample r = mu + sigma .* eps with
  // eps ~ N(0, I) drawn from `rng`, Bayesian mode only. The raw eps
  // vectors are returned for the gradient transform. When zero_sigma
  // is set the sample collapses onto mu (eps is still drawn, so the
  // rng stream advances identically either way).
  LhucStack SampleStack(int num_layers, Rng& rng, bool zero_sigma,
                        std::vector<Eigen::VectorXd>* eps_out) const;

  void Save(const std::string& path) const;
  static SpeakerAdapter Load(const std::string& path);
  void TextDump(std::ostream& os) const;
};

}  // namespace lfa

#endif  // LFA_ADAPT_SPEAKER_ADAPTER_H_
