// lfa/adapt/pipeline.h
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
// Unsupervised test-time adaptation of one speaker: decode the
// speaker's utterances with the unadapted model, keep the most
// confident fraction, pad them to bucket lengths and estimate an
// adapter on the hypothesis supervision. Oracle mode substitutes the
// reference labels and skips selection.

#ifndef LFA_ADAPT_PIPELINE_H_
#define LFA_ADAPT_PIPELINE_H_

#include <string>
#include <vector>

#include "lfa/adapt/confidence.h"
#include "lfa/adapt/estimators.h"
#include "lfa/corpus/corpus.h"
#include "lfa/graphs/graph-build.h"
#include "lfa/infer/lattice.h"

namespace lfa {

struct PipelineOptions {
  AdaptOptions adapt;
  // Fraction of utterances kept by confidence; 1.0 keeps everything
  // and skips lattice generation.
  double selection_rate = 0.8;
  double lattice_beam = 6.0;
  LatticeLimits lattice_limits;
  // How often the beam is halved when a lattice overflows the limits
  // before the utterance is given up on (treated as lowest confidence).
  int beam_halvings = 6;
  // Adapt on the reference labels instead of decoded hypotheses.
  bool oracle_supervision = false;

  void Validate() const;
};

// Everything the pipeline needs besides the speaker's data. Graphs
// and the n-gram model must all come from the same inventory that the
// network was trained against.
struct AdaptationResources {
  const TokenInventory& inventory;
  const HmmTopology& topology;
  const TokenNgramLm& lm;
  const WeightedGraph& den_graph;
  const WeightedGraph& decode_graph;
  const CorpusModel& corpus_model;  // silence statistics for padding
  const std::vector<int>& buckets;
};

struct SpeakerAdaptationResult {
  SpeakerAdapter adapter;
  AdaptReport report;
  std::vector<ScoredUtterance> confidences;  // decode order, empty in oracle
  std::vector<std::string> selected_ids;
  int dropped = 0;  // selected but unusable (infeasible or oversized)
  std::vector<std::string> notes;
};

// Runs the full loop for one speaker's utterances. When nothing
// usable survives selection the identity adapter is returned and a
// note says so.
SpeakerAdaptationResult AdaptSpeaker(const AcousticNet& net,
                                     const std::vector<Utterance>& utts,
                                     const AdaptationResources& resources,
                                     const PipelineOptions& options,
                                     const std::string& speaker);

// Same loop with the supervision hypotheses and confidence lattices
// produced by a separate first pass system, the way every adapted
// system shares one baseline decode. The nets must agree on input and
// pdf dimensions; the single net overload decodes with `net` itself.
SpeakerAdaptationResult AdaptSpeaker(const AcousticNet& net,
                                     const AcousticNet& first_pass_net,
                                     const std::vector<Utterance>& utts,
                                     const AdaptationResources& resources,
                                     const PipelineOptions& options,
                                     const std::string& speaker);

}  // namespace lfa

#endif  // LFA_ADAPT_PIPELINE_H_
