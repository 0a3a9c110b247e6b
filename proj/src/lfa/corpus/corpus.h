// lfa/corpus/corpus.h
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
// Synthetic multi-speaker corpus. Every token owns a class-conditional
// Gaussian over feature vectors; speakers distort the canonical
// features with a fixed per-dimension affine warp (scale and offset),
// which is what adaptation later has to undo. Utterance text comes
// from a fixed random Markov chain over the non-silence tokens with
// optional boundary silence. All randomness is drawn from named
// streams of one seed, so a corpus is a pure function of its spec.

#ifndef LFA_CORPUS_CORPUS_H_
#define LFA_CORPUS_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfa/base/rng.h"
#include "lfa/graphs/token-inventory.h"

namespace lfa {

struct Utterance {
  std::string id;
  std::string speaker;
  Eigen::MatrixXd features;     // frames x dim
  std::vector<int32_t> labels;  // reference tokens, boundary silence included
};

struct SpeakerProfile {
  std::string id;
  Eigen::VectorXd scale;
  Eigen::VectorXd offset;
};

// The generating distribution, kept alongside the waveforms so
// padding can draw matched silence.
struct CorpusModel {
  Eigen::MatrixXd token_means;  // tokens x dim
  double noise_sigma = 0.5;
  std::vector<SpeakerProfile> profiles;
};

struct Corpus {
  explicit Corpus(TokenInventory inv) : inventory(std::move(inv)) {}
  TokenInventory inventory;
  CorpusModel model;
  std::vector<Utterance> utts;
};

struct CorpusSpec {
  int num_speakers = 4;
  int utts_per_speaker = 10;
  std::string speaker_prefix = "spk";
  int feature_dim = 12;
  int min_tokens = 3;   // non-silence tokens per utterance
  int max_tokens = 8;
  int min_duration = 2;  // frames per token
  int max_duration = 5;
  double separation = 2.0;     // scale of the token mean cloud
  double noise_sigma = 0.5;
  double warp_log_scale = 0.35;  // per-dim scale = exp(U(-w, w))
  double warp_offset = 0.6;      // per-dim offset = U(-o, o)
  double lead_silence_prob = 0.7;
  double trail_silence_prob = 0.7;
  bool identity_speakers = false;  // disable the warps (control arm)
  uint64_t seed = 0;

  void Validate() const;
};

Corpus GenerateCorpus(const TokenInventory& inventory, const CorpusSpec& spec);

// Extends the utterance to exactly target_frames by appending frames
// drawn from the unwarped silence distribution, and appends one
// silence label when any padding was added.
Utterance SilencePad(const Utterance& utt, int target_frames,
                     const CorpusModel& model, int32_t silence_token,
                     Rng& rng);

// Directory layout: inventory.txt, model.txt, manifest.txt and
// features.bin (magic "LFX1", per-utterance double blocks, each with
// its own checksum).
void SaveCorpus(const Corpus& corpus, const std::string& dir);
Corpus LoadCorpus(const std::string& dir);

}  // namespace lfa

#endif  // LFA_CORPUS_CORPUS_H_
