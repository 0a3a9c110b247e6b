// lfa/harness/commands.h
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
// The experiment commands behind the lfadapt tool. Each one is a
// plain function over paths so tests and the acceptance suite can run
// whole experiments in process.

#ifndef LFA_HARNESS_COMMANDS_H_
#define LFA_HARNESS_COMMANDS_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfa/adapt/speaker-adapter.h"
#include "lfa/graphs/graph-build.h"
#include "lfa/graphs/hmm-topology.h"
#include "lfa/graphs/token-inventory.h"
#include "lfa/graphs/token-ngram.h"
#include "lfa/graphs/weighted-graph.h"
#include "lfa/harness/config.h"
#include "lfa/net/acoustic-net.h"

namespace lfa {

// What `train` leaves in a model directory: net.lfn, den.lfg,
// decode.lfg, inventory.txt, lm.txt, buckets.txt, meta.json.
struct ModelArtifacts {
  AcousticNet net;
  TokenInventory inventory;
  HmmTopology topology;
  TokenNgramLm lm;
  WeightedGraph den_graph;
  WeightedGraph decode_graph;
  std::vector<int> buckets;
  nlohmann::json meta;
};

void SaveModelArtifacts(const std::string& dir, const ModelArtifacts& model);
ModelArtifacts LoadModelArtifacts(const std::string& dir);

// Writes corpus-train/ and corpus-test/ under out_dir. The two splits
// share token means through the seed; speakers are disjoint.
void CmdGenCorpus(const ExperimentConfig& config, const std::string& out_dir,
                  std::ostream& log);

// Flat-start training on corpus_dir, artifacts into model_dir. With
// speaker_adaptive, per-speaker scales are trained alongside the net
// on the chosen layers and discarded; test time starts from identity.
void CmdTrain(const ExperimentConfig& config, const std::string& corpus_dir,
              const std::string& model_dir, bool speaker_adaptive,
              std::ostream& log);

// Estimates one adapter per speaker in corpus_dir, writing
// <speaker>.lfa files plus an adapt.json summary (selection,
// confidences, update counts) into adapter_dir. Returns the summary.
// first_pass_model_dir names the system whose decode supplies the
// supervision hypotheses and confidence lattices; empty means the
// adapted model decodes for itself.
nlohmann::json CmdAdapt(const ExperimentConfig& config,
                        const std::string& corpus_dir,
                        const std::string& model_dir,
                        const std::string& adapter_dir,
                        const std::string& first_pass_model_dir,
                        std::ostream& log);

// Decodes every utterance, one "<utt_id> token token ..." line per
// utterance in corpus order. adapter_dir empty means the unadapted
// model; otherwise each speaker's .lfa file must be present.
void CmdDecode(const ExperimentConfig& config, const std::string& corpus_dir,
               const std::string& model_dir, const std::string& adapter_dir,
               const std::string& hyp_path, std::ostream& log);

struct ScoreArgs {
  std::string corpus_dir;
  std::string hyp_path;
  std::string condition;
  std::string test_set;       // defaults to the corpus dir name
  std::string baseline_path;  // optional stored metrics to compare with
  std::string metrics_path;   // output
  int adapt_utts = -1;        // per-speaker adaptation count, -1 = absent
};

// Scores a hypothesis file against the corpus references and writes a
// metrics JSON file. Returns the metrics object.
nlohmann::json CmdScore(const ExperimentConfig& config, const ScoreArgs& args,
                        std::ostream& log);

// Reads stored metrics files and renders them as json, csv, or
// plotdata.
std::string CmdReport(const std::vector<std::string>& metrics_paths,
                      const std::string& format);

// Hypothesis file helpers shared by score and the tests.
void WriteHypFile(const std::string& path,
                  const std::vector<std::pair<std::string,
                                              std::vector<std::string>>>& hyps);
std::map<std::string, std::vector<std::string>> ReadHypFile(
    const std::string& path);

}  // namespace lfa

#endif  // LFA_HARNESS_COMMANDS_H_
