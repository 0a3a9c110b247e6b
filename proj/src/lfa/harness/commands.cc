// lfa/harness/commands.cc
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

#include "lfa/harness/commands.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "lfa/adapt/bucketing.h"
#include "lfa/adapt/pipeline.h"
#include "lfa/adapt/trainer.h"
#include "lfa/base/common.h"
#include "lfa/corpus/corpus.h"
#include "lfa/harness/metrics.h"
#include "lfa/infer/viterbi.h"

namespace lfa {

namespace {

namespace fs = std::filesystem;

std::string InventoryFingerprint(const TokenInventory& inventory) {
  std::ostringstream os;
  inventory.Save(os);
  return os.str();
}

// The corpus on disk is authoritative for its own inventory; refuse
// to mix it with a config or model that disagrees.
void CheckSameInventory(const TokenInventory& a, const TokenInventory& b,
                        const std::string& what) {
  if (InventoryFingerprint(a) != InventoryFingerprint(b))
    throw InvalidArgument("token inventory mismatch: " + what);
}

void CheckFeatureDim(const Corpus& corpus, int expected,
                     const std::string& what) {
  const int dim = static_cast<int>(corpus.model.token_means.cols());
  if (dim != expected)
    throw InvalidArgument("feature dimension mismatch: " + what + " has " +
                          std::to_string(dim) + ", expected " +
                          std::to_string(expected));
}

std::vector<int> AnalyticBucketRange(const ExperimentConfig& config) {
  // Shortest utterance: min_tokens tokens, no boundary silence, each
  // at min_duration. Longest: max_tokens plus silence at both ends,
  // each at max_duration. Covers both splits by construction.
  const int min_len = config.min_tokens * config.min_duration;
  const int max_len = (config.max_tokens + 2) * config.max_duration;
  return MakeGeometricBuckets(min_len, max_len, config.num_buckets);
}

std::string TokensToText(const TokenInventory& inventory,
                         const std::vector<int32_t>& tokens) {
  std::string out;
  for (int32_t t : tokens) {
    if (!out.empty()) out += " ";
    out += inventory.TokenText(t);
  }
  return out;
}

std::vector<std::string> TokenTexts(const TokenInventory& inventory,
                                    const std::vector<int32_t>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (int32_t t : tokens) out.push_back(inventory.TokenText(t));
  return out;
}

std::map<std::string, std::vector<const Utterance*>> GroupBySpeaker(
    const Corpus& corpus) {
  std::map<std::string, std::vector<const Utterance*>> by_speaker;
  for (const Utterance& utt : corpus.utts)
    by_speaker[utt.speaker].push_back(&utt);
  return by_speaker;
}

}  // namespace

void SaveModelArtifacts(const std::string& dir, const ModelArtifacts& model) {
  fs::create_directories(dir);
  model.net.Save(dir + "/net.lfn");
  model.den_graph.Save(dir + "/den.lfg");
  model.decode_graph.Save(dir + "/decode.lfg");
  {
    std::ofstream os(dir + "/inventory.txt");
    if (!os) throw Error("cannot write " + dir + "/inventory.txt");
    model.inventory.Save(os);
  }
  {
    std::ofstream os(dir + "/lm.txt");
    if (!os) throw Error("cannot write " + dir + "/lm.txt");
    model.lm.Save(os);
  }
  {
    std::ofstream os(dir + "/buckets.txt");
    if (!os) throw Error("cannot write " + dir + "/buckets.txt");
    for (int b : model.buckets) os << b << "\n";
  }
  WriteJsonFile(dir + "/meta.json", model.meta);
}

ModelArtifacts LoadModelArtifacts(const std::string& dir) {
  std::ifstream inv_is(dir + "/inventory.txt");
  if (!inv_is) throw MissingRecord("cannot open " + dir + "/inventory.txt");
  TokenInventory inventory = TokenInventory::Load(inv_is);

  const nlohmann::json meta = ReadJsonFile(dir + "/meta.json");
  if (!meta.contains("states_per_unit"))
    throw CorruptArchive(dir + "/meta.json lacks states_per_unit");
  const HmmTopology topology =
      BuildHmmTopology(meta["states_per_unit"].get<int>());

  std::ifstream lm_is(dir + "/lm.txt");
  if (!lm_is) throw MissingRecord("cannot open " + dir + "/lm.txt");
  TokenNgramLm lm = TokenNgramLm::Load(lm_is);

  std::ifstream bk_is(dir + "/buckets.txt");
  if (!bk_is) throw MissingRecord("cannot open " + dir + "/buckets.txt");
  std::vector<int> buckets;
  int b = 0;
  while (bk_is >> b) buckets.push_back(b);
  if (buckets.empty())
    throw CorruptArchive(dir + "/buckets.txt holds no buckets");

  return ModelArtifacts{AcousticNet::Load(dir + "/net.lfn"),
                        std::move(inventory),
                        topology,
                        std::move(lm),
                        WeightedGraph::Load(dir + "/den.lfg"),
                        WeightedGraph::Load(dir + "/decode.lfg"),
                        std::move(buckets),
                        meta};
}

void CmdGenCorpus(const ExperimentConfig& config, const std::string& out_dir,
                  std::ostream& log) {
  config.Validate();
  const TokenInventory inventory = config.MakeInventory();
  for (const bool test_split : {false, true}) {
    const Corpus corpus =
        GenerateCorpus(inventory, config.MakeCorpusSpec(test_split));
    const std::string dir =
        out_dir + (test_split ? "/corpus-test" : "/corpus-train");
    SaveCorpus(corpus, dir);
    log << "wrote " << corpus.utts.size() << " utterances for "
        << corpus.model.profiles.size() << " speakers to " << dir << "\n";
  }
}

void CmdTrain(const ExperimentConfig& config, const std::string& corpus_dir,
              const std::string& model_dir, bool speaker_adaptive,
              std::ostream& log) {
  config.Validate();
  const Corpus corpus = LoadCorpus(corpus_dir);
  CheckSameInventory(corpus.inventory, config.MakeInventory(),
                     corpus_dir + " vs the config");
  CheckFeatureDim(corpus, config.feature_dim, corpus_dir);

  std::vector<std::vector<int32_t>> label_seqs;
  label_seqs.reserve(corpus.utts.size());
  for (const Utterance& utt : corpus.utts) label_seqs.push_back(utt.labels);
  const TokenNgramLm lm =
      EstimateTokenNgram(label_seqs, config.lm_order,
                         corpus.inventory.NumTokens(), config.lm_discount);
  const HmmTopology topology = BuildHmmTopology(config.states_per_unit);
  const WeightedGraph den_graph =
      BuildDenominatorGraph(lm, topology, corpus.inventory);
  const WeightedGraph decode_graph =
      BuildDecodingGraph(lm, topology, corpus.inventory);

  std::vector<TrainUtterance> utts;
  utts.reserve(corpus.utts.size());
  for (const Utterance& utt : corpus.utts) {
    utts.push_back(TrainUtterance{
        utt.id, utt.speaker, utt.features,
        BuildNumeratorGraph(utt.labels, topology, corpus.inventory,
                            static_cast<int>(utt.features.rows()), &lm)});
  }

  const TrainResult result = TrainNet(
      config.MakeNetDims(), utts, den_graph,
      config.MakeTrainOptions(speaker_adaptive));

  nlohmann::json meta{{"states_per_unit", config.states_per_unit},
                      {"context", ContextModeName(config.context)},
                      {"seed", config.seed},
                      {"speaker_adaptive", speaker_adaptive},
                      {"feature_dim", config.feature_dim},
                      {"hidden_dims", config.hidden_dims},
                      {"epoch_losses", result.epoch_losses}};
  SaveModelArtifacts(model_dir,
                     ModelArtifacts{result.net, corpus.inventory, topology, lm,
                                    den_graph, decode_graph,
                                    AnalyticBucketRange(config), meta});
  log << "trained " << config.train_epochs << " epochs on "
      << corpus.utts.size() << " utterances";
  if (!result.epoch_losses.empty())
    log << ", final loss " << result.epoch_losses.back();
  log << "; model in " << model_dir << "\n";
}

nlohmann::json CmdAdapt(const ExperimentConfig& config,
                        const std::string& corpus_dir,
                        const std::string& model_dir,
                        const std::string& adapter_dir,
                        const std::string& first_pass_model_dir,
                        std::ostream& log) {
  config.Validate();
  const ModelArtifacts model = LoadModelArtifacts(model_dir);
  const Corpus corpus = LoadCorpus(corpus_dir);
  CheckSameInventory(corpus.inventory, model.inventory,
                     corpus_dir + " vs " + model_dir);
  CheckFeatureDim(corpus, model.net.InputDim(), corpus_dir);
  AcousticNet first_pass_net = model.net;
  if (!first_pass_model_dir.empty()) {
    const ModelArtifacts first_pass = LoadModelArtifacts(first_pass_model_dir);
    CheckSameInventory(first_pass.inventory, model.inventory,
                       first_pass_model_dir + " vs " + model_dir);
    first_pass_net = first_pass.net;
  }

  const PipelineOptions options = config.MakePipelineOptions();
  options.Validate();
  const AdaptationResources resources{model.inventory, model.topology,
                                      model.lm,        model.den_graph,
                                      model.decode_graph, corpus.model,
                                      model.buckets};

  fs::create_directories(adapter_dir);
  nlohmann::json speakers = nlohmann::json::object();
  for (const auto& [speaker, utt_ptrs] : GroupBySpeaker(corpus)) {
    std::vector<Utterance> utts;
    for (const Utterance* utt : utt_ptrs) {
      if (config.adapt_max_utts > 0 &&
          static_cast<int>(utts.size()) >= config.adapt_max_utts)
        break;
      utts.push_back(*utt);
    }
    const SpeakerAdaptationResult result = AdaptSpeaker(
        model.net, first_pass_net, utts, resources, options, speaker);
    result.adapter.Save(adapter_dir + "/" + speaker + ".lfa");

    nlohmann::json candidates = nlohmann::json::array();
    for (const Utterance& utt : utts) candidates.push_back(utt.id);
    nlohmann::json confidences = nlohmann::json::array();
    for (const ScoredUtterance& scored : result.confidences)
      confidences.push_back(nlohmann::json{{"id", scored.id},
                                           {"confidence", scored.confidence}});
    speakers[speaker] =
        nlohmann::json{{"candidates", candidates},
                       {"selected", result.selected_ids},
                       {"confidences", confidences},
                       {"dropped", result.dropped},
                       {"updates", result.report.updates},
                       {"diverged", result.report.diverged},
                       {"epoch_losses", result.report.epoch_losses},
                       {"notes", result.notes}};
    log << "speaker " << speaker << ": " << result.selected_ids.size()
        << " of " << utts.size() << " utterances selected, "
        << result.report.updates << " updates"
        << (result.report.diverged ? " (diverged)" : "") << "\n";
  }

  nlohmann::json summary{{"method", config.adapt_method},
                         {"criterion", config.adapt_criterion},
                         {"oracle", config.adapt_oracle},
                         {"selection_rate", config.selection_rate},
                         {"max_utts", config.adapt_max_utts},
                         {"seed", config.seed},
                         {"speakers", speakers}};
  WriteJsonFile(adapter_dir + "/adapt.json", summary);
  return summary;
}

void CmdDecode(const ExperimentConfig& config, const std::string& corpus_dir,
               const std::string& model_dir, const std::string& adapter_dir,
               const std::string& hyp_path, std::ostream& log) {
  config.Validate();
  const ModelArtifacts model = LoadModelArtifacts(model_dir);
  const Corpus corpus = LoadCorpus(corpus_dir);
  CheckSameInventory(corpus.inventory, model.inventory,
                     corpus_dir + " vs " + model_dir);
  CheckFeatureDim(corpus, model.net.InputDim(), corpus_dir);

  std::map<std::string, LhucStack> stacks;
  if (!adapter_dir.empty()) {
    for (const auto& [speaker, utt_ptrs] : GroupBySpeaker(corpus)) {
      (void)utt_ptrs;
      const SpeakerAdapter adapter =
          SpeakerAdapter::Load(adapter_dir + "/" + speaker + ".lfa");
      adapter.Validate(model.net);
      stacks[speaker] = adapter.PredictionStack(model.net.NumHiddenLayers());
    }
  }

  std::ofstream os(hyp_path);
  if (!os) throw Error("cannot write " + hyp_path);
  for (const Utterance& utt : corpus.utts) {
    const LhucStack* stack = nullptr;
    if (!adapter_dir.empty()) stack = &stacks.at(utt.speaker);
    const HeadScores heads = model.net.Forward(utt.features, stack, nullptr);
    const BestPath path = ViterbiBestPath(model.decode_graph, heads.lfmmi);
    os << utt.id;
    const std::string text = TokensToText(corpus.inventory, path.tokens);
    if (!text.empty()) os << " " << text;
    os << "\n";
  }
  if (!os) throw Error("failed writing " + hyp_path);
  log << "decoded " << corpus.utts.size() << " utterances"
      << (adapter_dir.empty() ? " without adapters" : " with adapters") << " to "
      << hyp_path << "\n";
}

nlohmann::json CmdScore(const ExperimentConfig& config, const ScoreArgs& args,
                        std::ostream& log) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  const Corpus corpus = LoadCorpus(args.corpus_dir);
  const std::string silence =
      corpus.inventory.TokenText(corpus.inventory.SilenceId());

  std::map<std::string, std::vector<std::string>> refs;
  std::map<std::string, std::string> speaker_by_id;
  for (const Utterance& utt : corpus.utts) {
    std::vector<std::string> tokens = TokenTexts(corpus.inventory, utt.labels);
    if (config.strip_silence) tokens = StripToken(tokens, silence);
    refs[utt.id] = std::move(tokens);
    speaker_by_id[utt.id] = utt.speaker;
  }

  std::map<std::string, std::vector<std::string>> hyps =
      ReadHypFile(args.hyp_path);
  if (config.strip_silence)
    for (auto& [id, tokens] : hyps) tokens = StripToken(tokens, silence);

  const TerReport report = ScoreTokenErrorRate(refs, hyps, speaker_by_id);
  const std::string test_set =
      args.test_set.empty() ? fs::path(args.corpus_dir).filename().string()
                            : args.test_set;
  nlohmann::json metrics =
      MetricsFromTer(args.condition, test_set, config.seed, report);
  if (!args.baseline_path.empty()) {
    const nlohmann::json baseline = ReadJsonFile(args.baseline_path);
    const std::vector<std::string> problems = ValidateMetrics(baseline);
    if (!problems.empty())
      throw InvalidArgument("baseline " + args.baseline_path +
                            " is not a valid metrics file: " + problems[0]);
    AttachBaseline(&metrics, baseline);
  }
  if (args.adapt_utts >= 0) metrics["adapt_utts_per_speaker"] = args.adapt_utts;
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  metrics["wall_clock_sec"] = elapsed.count();
  LFA_CHECK(ValidateMetrics(metrics).empty());

  if (!args.metrics_path.empty()) WriteJsonFile(args.metrics_path, metrics);
  log << args.condition << ": ter " << metrics["ter"].dump() << " over "
      << metrics["ref_tokens"].dump() << " tokens\n";
  return metrics;
}

std::string CmdReport(const std::vector<std::string>& metrics_paths,
                      const std::string& format) {
  std::vector<nlohmann::json> records;
  std::string problems;
  for (const std::string& path : metrics_paths) {
    const nlohmann::json m = ReadJsonFile(path);
    for (const std::string& p : ValidateMetrics(m))
      problems += "\n  " + path + ": " + p;
    records.push_back(m);
  }
  if (!problems.empty())
    throw InvalidArgument("invalid metrics files:" + problems);
  return RenderReport(records, format);
}

void WriteHypFile(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        hyps) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  for (const auto& [id, tokens] : hyps) {
    os << id;
    for (const std::string& t : tokens) os << " " << t;
    os << "\n";
  }
  if (!os) throw Error("failed writing " + path);
}

std::map<std::string, std::vector<std::string>> ReadHypFile(
    const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MissingRecord("cannot open " + path);
  std::map<std::string, std::vector<std::string>> hyps;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string id;
    if (!(ls >> id)) continue;  // blank line
    if (hyps.count(id))
      throw CorruptArchive(path + " line " + std::to_string(lineno) +
                           ": duplicate utterance id " + id);
    std::vector<std::string> tokens;
    std::string t;
    while (ls >> t) tokens.push_back(t);
    hyps[id] = std::move(tokens);
  }
  return hyps;
}

}  // namespace lfa
