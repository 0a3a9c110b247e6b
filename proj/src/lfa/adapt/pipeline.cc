// lfa/adapt/pipeline.cc
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

#include "lfa/adapt/pipeline.h"

#include <cmath>
#include <utility>

#include "lfa/adapt/bucketing.h"
#include "lfa/base/common.h"
#include "lfa/infer/viterbi.h"

namespace lfa {

void PipelineOptions::Validate() const {
  adapt.Validate();
  if (!(selection_rate > 0.0) || selection_rate > 1.0) {
    throw InvalidArgument("pipeline: selection_rate must be in (0, 1]");
  }
  if (!(lattice_beam > 0.0)) {
    throw InvalidArgument("pipeline: lattice_beam must be positive");
  }
  if (beam_halvings < 0) {
    throw InvalidArgument("pipeline: negative beam_halvings");
  }
}

SpeakerAdaptationResult AdaptSpeaker(const AcousticNet& net,
                                     const std::vector<Utterance>& utts,
                                     const AdaptationResources& resources,
                                     const PipelineOptions& options,
                                     const std::string& speaker) {
  return AdaptSpeaker(net, net, utts, resources, options, speaker);
}

SpeakerAdaptationResult AdaptSpeaker(const AcousticNet& net,
                                     const AcousticNet& first_pass_net,
                                     const std::vector<Utterance>& utts,
                                     const AdaptationResources& resources,
                                     const PipelineOptions& options,
                                     const std::string& speaker) {
  options.Validate();
  if (first_pass_net.NumPdfs() != net.NumPdfs() ||
      first_pass_net.InputDim() != net.InputDim()) {
    throw InvalidArgument(
        "pipeline: the first pass net and the adapted net disagree on "
        "dimensions");
  }
  SpeakerAdaptationResult result;
  const AdapterMode mode = options.adapt.method == AdaptMethod::kBayesian
                               ? AdapterMode::kBayesian
                               : AdapterMode::kDeterministic;
  result.adapter = SpeakerAdapter::Identity(net, mode,
                                            options.adapt.hooked_layers,
                                            speaker);
  for (const Utterance& utt : utts) {
    if (utt.speaker != speaker) {
      throw InvalidArgument("pipeline: utterance " + utt.id +
                            " belongs to speaker " + utt.speaker + ", not " +
                            speaker);
    }
  }
  if (utts.empty()) {
    result.notes.push_back("no utterances for " + speaker +
                           "; keeping the identity adapter");
    return result;
  }

  const std::size_t n = utts.size();
  const bool score_confidence =
      !options.oracle_supervision && options.selection_rate < 1.0;
  std::vector<std::vector<int32_t>> hyp_labels(n);

  if (!options.oracle_supervision) {
    for (std::size_t i = 0; i < n; ++i) {
      const Utterance& utt = utts[i];
      const HeadScores heads =
          first_pass_net.Forward(utt.features, nullptr, nullptr);
      const BestPath best =
          ViterbiBestPath(resources.decode_graph, heads.lfmmi);
      hyp_labels[i] = best.tokens;
      if (!score_confidence) continue;

      // A lattice that overflows the limits is retried with half the
      // beam; an utterance that never fits scores as least confident.
      double beam = options.lattice_beam;
      double confidence = 0.0;
      bool scored = false;
      for (int h = 0; h <= options.beam_halvings && !scored; ++h) {
        try {
          const Lattice lattice =
              GenerateLattice(resources.decode_graph, heads.lfmmi, beam,
                              options.lattice_limits);
          confidence = ConfidenceScore(lattice, best.pdfs);
          scored = true;
        } catch (const LatticeTooLarge&) {
          beam *= 0.5;
        }
      }
      if (!scored) {
        result.notes.push_back("lattice for " + utt.id +
                               " stayed over the limits; confidence 0");
      }
      result.confidences.push_back({utt.id, confidence});
    }
  }

  std::vector<int> chosen;
  if (score_confidence) {
    chosen = SelectByConfidence(result.confidences, options.selection_rate);
  } else {
    for (std::size_t i = 0; i < n; ++i) chosen.push_back(static_cast<int>(i));
  }

  std::vector<AdaptUtterance> adapt_utts;
  for (int idx : chosen) {
    const Utterance& utt = utts[static_cast<std::size_t>(idx)];
    const std::vector<int32_t>& labels =
        options.oracle_supervision ? utt.labels
                                   : hyp_labels[static_cast<std::size_t>(idx)];
    if (labels.empty()) {
      ++result.dropped;
      result.notes.push_back(utt.id + ": empty supervision, dropped");
      continue;
    }
    const int frames = static_cast<int>(utt.features.rows());
    int bucket = 0;
    try {
      bucket = BucketLength(frames, resources.buckets);
    } catch (const InvalidArgument& e) {
      ++result.dropped;
      result.notes.push_back(utt.id + ": " + e.what());
      continue;
    }

    Utterance work = utt;
    work.labels = labels;
    if (bucket > frames) {
      Rng pad_rng = Rng::ForStream(options.adapt.seed, "pad/" + utt.id);
      work = SilencePad(work, bucket, resources.corpus_model,
                        resources.inventory.SilenceId(), pad_rng);
    }

    try {
      AdaptUtterance au;
      au.id = utt.id;
      au.features = std::move(work.features);
      au.supervision =
          BuildNumeratorGraph(work.labels, resources.topology,
                              resources.inventory, bucket, &resources.lm,
                              /*allow_boundary_silence=*/true);
      adapt_utts.push_back(std::move(au));
      result.selected_ids.push_back(utt.id);
    } catch (const InfeasibleSupervision& e) {
      ++result.dropped;
      result.notes.push_back(utt.id + ": supervision does not fit, dropped (" +
                             e.what() + ")");
    }
  }

  if (adapt_utts.empty()) {
    result.notes.push_back("no usable utterances for " + speaker +
                           "; keeping the identity adapter");
    return result;
  }

  result.adapter =
      EstimateAdapter(net, adapt_utts, &resources.den_graph, options.adapt,
                      speaker, &result.report);
  return result;
}

}  // namespace lfa
