// lfa/harness/config.h
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
// Experiment configuration: a flat key=value text file plus
// command-line overrides. Every knob has a default; validation
// collects every violation instead of stopping at the first.

#ifndef LFA_HARNESS_CONFIG_H_
#define LFA_HARNESS_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfa/adapt/estimators.h"
#include "lfa/adapt/pipeline.h"
#include "lfa/adapt/trainer.h"
#include "lfa/corpus/corpus.h"
#include "lfa/graphs/token-inventory.h"
#include "lfa/net/acoustic-net.h"

namespace lfa {

struct ExperimentConfig {
  // Everything random in an experiment derives from this one seed
  // through named streams.
  uint64_t seed = 42;

  // corpus.*
  std::vector<std::string> tokens = {"sil", "a", "b", "c", "d", "e"};
  std::string silence = "sil";
  int train_speakers = 20;
  int test_speakers = 8;
  int utts_per_speaker = 50;
  int feature_dim = 12;
  int min_tokens = 3;
  int max_tokens = 8;
  int min_duration = 2;
  int max_duration = 5;
  double separation = 2.0;
  double noise_sigma = 0.5;
  double warp_log_scale = 0.35;
  double warp_offset = 0.6;
  double lead_silence_prob = 0.7;
  double trail_silence_prob = 0.7;

  // model.*
  ContextMode context = ContextMode::kMono;
  int states_per_unit = 2;
  std::vector<int> hidden_dims = {32, 32};
  int lm_order = 2;
  double lm_discount = 0.5;
  int num_buckets = 40;

  // train.*
  int train_epochs = 8;
  double train_learning_rate = 0.02;
  double train_gamma1 = 1.0;
  double train_gamma2 = 0.1;
  std::vector<int> sat_layers = {0};
  double sat_learning_rate = 0.1;

  // adapt.*
  std::string adapt_method = "blhuc";     // lhuc | blhuc | map | kl
  std::string adapt_criterion = "ce";     // ce | mmi+ce
  double adapt_gamma1 = 1.0;              // sequence weight under mmi+ce
  double adapt_gamma2 = 0.1;
  std::optional<double> adapt_gamma3;     // unset: gamma1 + gamma2
  int adapt_epochs = 7;
  double adapt_learning_rate = 0.1;
  int adapt_num_samples = 1;
  std::vector<int> hooked_layers;         // empty: all hidden layers
  double prior_mean = 0.0;
  double prior_stddev = 1.0;
  double penalty_weight = 1.0;
  double selection_rate = 0.8;
  bool adapt_oracle = false;
  int adapt_max_utts = 0;                 // 0: no cap per speaker
  double lattice_beam = 4.0;

  // score.*
  bool strip_silence = true;

  // Applies one key=value pair; throws InvalidArgument on an unknown
  // key or unparseable value.
  void Set(const std::string& key, const std::string& value);

  // Reads a flat key=value file ('#' comments, blank lines ignored).
  // All bad lines are reported together in one error.
  static ExperimentConfig Load(const std::string& path);

  // Every semantic problem, one message per violated field.
  std::vector<std::string> Violations() const;
  // Throws InvalidArgument listing all violations, if any.
  void Validate() const;

  // Derived library inputs.
  TokenInventory MakeInventory() const;
  CorpusSpec MakeCorpusSpec(bool test_split) const;
  NetDims MakeNetDims() const;
  ObjectiveConfig TrainObjective() const;
  TrainOptions MakeTrainOptions(bool speaker_adaptive) const;
  // Pipeline options for the configured method/criterion; command
  // line convenience flags are applied by Set before this.
  PipelineOptions MakePipelineOptions() const;
};

// Documented key table, one "key<TAB>default<TAB>meaning" line per
// knob; backs `lfadapt config --keys`.
std::string ConfigKeyTable();

}  // namespace lfa

#endif  // LFA_HARNESS_CONFIG_H_
