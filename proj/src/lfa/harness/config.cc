// lfa/harness/config.cc
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

#include "lfa/harness/config.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "lfa/base/common.h"

namespace lfa {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitCommas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int64_t ParseI64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  int64_t v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty())
    throw InvalidArgument(key + ": expected an integer, got \"" + value +
                          "\"");
  return v;
}

double ParseF64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty())
    throw InvalidArgument(key + ": expected a number, got \"" + value + "\"");
  return v;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InvalidArgument(key + ": expected true or false, got \"" + value +
                        "\"");
}

std::vector<int> ParseIntList(const std::string& key,
                              const std::string& value) {
  std::vector<int> out;
  for (const std::string& item : SplitCommas(value))
    out.push_back(static_cast<int>(ParseI64(key, item)));
  return out;
}

}  // namespace

void ExperimentConfig::Set(const std::string& key, const std::string& value) {
  if (key == "seed") {
    seed = static_cast<uint64_t>(ParseI64(key, value));
  } else if (key == "corpus.tokens") {
    tokens = SplitCommas(value);
  } else if (key == "corpus.silence") {
    silence = value;
  } else if (key == "corpus.train_speakers") {
    train_speakers = static_cast<int>(ParseI64(key, value));
  } else if (key == "corpus.test_speakers") {
    test_speakers = static_cast<int>(ParseI64(key, value));
  } else if (key == "corpus.utts_per_speaker") {
    utts_per_speaker = static_cast<int>(ParseI64(key, value));
  } else if (key == "corpus.feature_dim") {
    feature_dim = static_cast<int>(ParseI64(key, value));
  } else if (key == "corpus.min_tokens") {
    min_tokens = static_cast<int>(ParseI64(key, value));
  } else if (key == "corpus.max_tokens") {
    max_tokens = static_cast<int>(ParseI64(key, value));
  } else if (key == "corpus.min_duration") {
    min_duration = static_cast<int>(ParseI64(key, value));
  } else if (key == "corpus.max_duration") {
    max_duration = static_cast<int>(ParseI64(key, value));
  } else if (key == "corpus.separation") {
    separation = ParseF64(key, value);
  } else if (key == "corpus.noise_sigma") {
    noise_sigma = ParseF64(key, value);
  } else if (key == "corpus.warp_log_scale") {
    warp_log_scale = ParseF64(key, value);
  } else if (key == "corpus.warp_offset") {
    warp_offset = ParseF64(key, value);
  } else if (key == "corpus.lead_silence_prob") {
    lead_silence_prob = ParseF64(key, value);
  } else if (key == "corpus.trail_silence_prob") {
    trail_silence_prob = ParseF64(key, value);
  } else if (key == "model.context") {
    context = ContextModeFromName(value);
  } else if (key == "model.states_per_unit") {
    states_per_unit = static_cast<int>(ParseI64(key, value));
  } else if (key == "model.hidden_dims") {
    hidden_dims = ParseIntList(key, value);
  } else if (key == "model.lm_order") {
    lm_order = static_cast<int>(ParseI64(key, value));
  } else if (key == "model.lm_discount") {
    lm_discount = ParseF64(key, value);
  } else if (key == "model.num_buckets") {
    num_buckets = static_cast<int>(ParseI64(key, value));
  } else if (key == "train.epochs") {
    train_epochs = static_cast<int>(ParseI64(key, value));
  } else if (key == "train.learning_rate") {
    train_learning_rate = ParseF64(key, value);
  } else if (key == "train.gamma1") {
    train_gamma1 = ParseF64(key, value);
  } else if (key == "train.gamma2") {
    train_gamma2 = ParseF64(key, value);
  } else if (key == "train.sat_layers") {
    sat_layers = ParseIntList(key, value);
  } else if (key == "train.sat_learning_rate") {
    sat_learning_rate = ParseF64(key, value);
  } else if (key == "adapt.method") {
    adapt_method = value;
  } else if (key == "adapt.criterion") {
    adapt_criterion = value;
  } else if (key == "adapt.gamma1") {
    adapt_gamma1 = ParseF64(key, value);
  } else if (key == "adapt.gamma2") {
    adapt_gamma2 = ParseF64(key, value);
  } else if (key == "adapt.gamma3") {
    if (value == "default")
      adapt_gamma3.reset();
    else
      adapt_gamma3 = ParseF64(key, value);
  } else if (key == "adapt.epochs") {
    adapt_epochs = static_cast<int>(ParseI64(key, value));
  } else if (key == "adapt.learning_rate") {
    adapt_learning_rate = ParseF64(key, value);
  } else if (key == "adapt.num_samples") {
    adapt_num_samples = static_cast<int>(ParseI64(key, value));
  } else if (key == "adapt.hooked_layers") {
    if (value == "all")
      hooked_layers.clear();
    else
      hooked_layers = ParseIntList(key, value);
  } else if (key == "adapt.prior_mean") {
    prior_mean = ParseF64(key, value);
  } else if (key == "adapt.prior_stddev") {
    prior_stddev = ParseF64(key, value);
  } else if (key == "adapt.penalty_weight") {
    penalty_weight = ParseF64(key, value);
  } else if (key == "adapt.selection_rate") {
    selection_rate = ParseF64(key, value);
  } else if (key == "adapt.oracle") {
    adapt_oracle = ParseBool(key, value);
  } else if (key == "adapt.max_utts") {
    adapt_max_utts = static_cast<int>(ParseI64(key, value));
  } else if (key == "adapt.lattice_beam") {
    lattice_beam = ParseF64(key, value);
  } else if (key == "score.strip_silence") {
    strip_silence = ParseBool(key, value);
  } else {
    throw InvalidArgument("unknown config key \"" + key + "\"");
  }
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MissingRecord("cannot open config file " + path);
  ExperimentConfig config;
  std::vector<std::string> problems;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(lineno) +
                         ": expected key=value, got \"" + line + "\"");
      continue;
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    try {
      config.Set(key, value);
    } catch (const Error& e) {
      problems.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "bad config file " + path + ":";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw InvalidArgument(msg);
  }
  return config;
}

std::vector<std::string> ExperimentConfig::Violations() const {
  std::vector<std::string> v;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };

  require(!tokens.empty(), "corpus.tokens: must list at least one token");
  require(std::set<std::string>(tokens.begin(), tokens.end()).size() ==
              tokens.size(),
          "corpus.tokens: duplicate token");
  require(!silence.empty(), "corpus.silence: must not be empty");
  require(tokens.empty() ||
              std::find(tokens.begin(), tokens.end(), silence) != tokens.end(),
          "corpus.silence: \"" + silence + "\" is not in corpus.tokens");
  require(train_speakers >= 1, "corpus.train_speakers: must be >= 1");
  require(test_speakers >= 1, "corpus.test_speakers: must be >= 1");
  require(utts_per_speaker >= 1, "corpus.utts_per_speaker: must be >= 1");
  require(feature_dim >= 1, "corpus.feature_dim: must be >= 1");
  require(min_tokens >= 1, "corpus.min_tokens: must be >= 1");
  require(max_tokens >= min_tokens,
          "corpus.max_tokens: must be >= corpus.min_tokens");
  require(min_duration >= 1, "corpus.min_duration: must be >= 1");
  require(min_duration >= states_per_unit,
          "corpus.min_duration: must be >= model.states_per_unit or no "
          "token fits its HMM");
  require(max_duration >= min_duration,
          "corpus.max_duration: must be >= corpus.min_duration");
  require(separation > 0.0, "corpus.separation: must be > 0");
  require(noise_sigma > 0.0, "corpus.noise_sigma: must be > 0");
  require(warp_log_scale >= 0.0, "corpus.warp_log_scale: must be >= 0");
  require(warp_offset >= 0.0, "corpus.warp_offset: must be >= 0");
  require(lead_silence_prob >= 0.0 && lead_silence_prob <= 1.0,
          "corpus.lead_silence_prob: must be in [0, 1]");
  require(trail_silence_prob >= 0.0 && trail_silence_prob <= 1.0,
          "corpus.trail_silence_prob: must be in [0, 1]");

  require(states_per_unit >= 1, "model.states_per_unit: must be >= 1");
  require(!hidden_dims.empty(), "model.hidden_dims: must list at least one");
  for (int d : hidden_dims)
    require(d >= 1, "model.hidden_dims: every width must be >= 1");
  require(lm_order >= 1, "model.lm_order: must be >= 1");
  require(lm_discount >= 0.0 && lm_discount < 1.0,
          "model.lm_discount: must be in [0, 1)");
  require(num_buckets >= 1, "model.num_buckets: must be >= 1");

  require(train_epochs >= 0, "train.epochs: must be >= 0");
  require(train_learning_rate > 0.0, "train.learning_rate: must be > 0");
  require(train_gamma1 >= 0.0, "train.gamma1: must be >= 0");
  require(train_gamma2 >= 0.0, "train.gamma2: must be >= 0");
  require(train_gamma1 + train_gamma2 > 0.0,
          "train.gamma1: gamma1 and gamma2 must not both be zero");
  const int num_layers = static_cast<int>(hidden_dims.size());
  for (int layer : sat_layers)
    require(layer >= 0 && layer < num_layers,
            "train.sat_layers: layer " + std::to_string(layer) +
                " is out of range for model.hidden_dims");
  require(!sat_layers.empty(), "train.sat_layers: must list at least one");
  require(sat_learning_rate > 0.0, "train.sat_learning_rate: must be > 0");

  require(adapt_method == "lhuc" || adapt_method == "blhuc" ||
              adapt_method == "map" || adapt_method == "kl",
          "adapt.method: expected lhuc, blhuc, map, or kl, got \"" +
              adapt_method + "\"");
  require(adapt_criterion == "ce" || adapt_criterion == "mmi+ce",
          "adapt.criterion: expected ce or mmi+ce, got \"" + adapt_criterion +
              "\"");
  require(adapt_gamma1 >= 0.0, "adapt.gamma1: must be >= 0");
  require(adapt_gamma2 >= 0.0, "adapt.gamma2: must be >= 0");
  require(!adapt_gamma3 || *adapt_gamma3 >= 0.0, "adapt.gamma3: must be >= 0");
  require(adapt_epochs >= 0, "adapt.epochs: must be >= 0");
  require(adapt_learning_rate > 0.0, "adapt.learning_rate: must be > 0");
  require(adapt_num_samples >= 1, "adapt.num_samples: must be >= 1");
  for (int layer : hooked_layers)
    require(layer >= 0 && layer < num_layers,
            "adapt.hooked_layers: layer " + std::to_string(layer) +
                " is out of range for model.hidden_dims");
  require(prior_stddev > 0.0, "adapt.prior_stddev: must be > 0");
  require(penalty_weight >= 0.0, "adapt.penalty_weight: must be >= 0");
  require(selection_rate > 0.0 && selection_rate <= 1.0,
          "adapt.selection_rate: must be in (0, 1]");
  require(adapt_max_utts >= 0, "adapt.max_utts: must be >= 0");
  require(lattice_beam > 0.0, "adapt.lattice_beam: must be > 0");
  return v;
}

void ExperimentConfig::Validate() const {
  const std::vector<std::string> v = Violations();
  if (v.empty()) return;
  std::string msg = "invalid config:";
  for (const std::string& p : v) msg += "\n  " + p;
  throw InvalidArgument(msg);
}

TokenInventory ExperimentConfig::MakeInventory() const {
  return TokenInventory(tokens, silence, context);
}

CorpusSpec ExperimentConfig::MakeCorpusSpec(bool test_split) const {
  CorpusSpec spec;
  spec.num_speakers = test_split ? test_speakers : train_speakers;
  spec.utts_per_speaker = utts_per_speaker;
  // Distinct prefixes give the two splits disjoint speakers while the
  // shared seed keeps the token means identical.
  spec.speaker_prefix = test_split ? "tst" : "trn";
  spec.feature_dim = feature_dim;
  spec.min_tokens = min_tokens;
  spec.max_tokens = max_tokens;
  spec.min_duration = min_duration;
  spec.max_duration = max_duration;
  spec.separation = separation;
  spec.noise_sigma = noise_sigma;
  spec.warp_log_scale = warp_log_scale;
  spec.warp_offset = warp_offset;
  spec.lead_silence_prob = lead_silence_prob;
  spec.trail_silence_prob = trail_silence_prob;
  spec.seed = seed;
  return spec;
}

NetDims ExperimentConfig::MakeNetDims() const {
  NetDims dims;
  dims.input_dim = feature_dim;
  dims.hidden_dims = hidden_dims;
  dims.num_pdfs = MakeInventory().NumPdfs(states_per_unit);
  return dims;
}

ObjectiveConfig ExperimentConfig::TrainObjective() const {
  return ObjectiveConfig{train_gamma1, train_gamma2, std::nullopt};
}

TrainOptions ExperimentConfig::MakeTrainOptions(bool speaker_adaptive) const {
  TrainOptions options;
  options.objective = TrainObjective();
  options.epochs = train_epochs;
  options.learning_rate = train_learning_rate;
  options.seed = seed;
  options.speaker_adaptive = speaker_adaptive;
  options.sat_layers = sat_layers;
  options.sat_learning_rate = sat_learning_rate;
  return options;
}

PipelineOptions ExperimentConfig::MakePipelineOptions() const {
  AdaptOptions adapt;
  adapt.method = adapt_method == "blhuc" ? AdaptMethod::kBayesian
                                         : AdaptMethod::kDeterministic;
  if (adapt_method == "map")
    adapt.penalty = AdaptPenalty::kParamPrior;
  else if (adapt_method == "kl")
    adapt.penalty = AdaptPenalty::kOutputKl;
  else
    adapt.penalty = AdaptPenalty::kNone;
  const double gamma1 = adapt_criterion == "mmi+ce" ? adapt_gamma1 : 0.0;
  adapt.objective = ObjectiveConfig{gamma1, adapt_gamma2, adapt_gamma3};
  adapt.epochs = adapt_epochs;
  adapt.learning_rate = adapt_learning_rate;
  adapt.num_samples = adapt_num_samples;
  adapt.hooked_layers = hooked_layers;
  adapt.prior.mean = prior_mean;
  adapt.prior.stddev = prior_stddev;
  adapt.penalty_weight = penalty_weight;
  adapt.seed = seed;

  PipelineOptions options;
  options.adapt = adapt;
  options.selection_rate = selection_rate;
  options.lattice_beam = lattice_beam;
  options.oracle_supervision = adapt_oracle;
  return options;
}

std::string ConfigKeyTable() {
  return
      "seed\t42\tmaster seed for every random stream\n"
      "corpus.tokens\tsil,a,b,c,d,e\tcomma list of modeling units\n"
      "corpus.silence\tsil\twhich token is silence\n"
      "corpus.train_speakers\t20\tspeakers in the training split\n"
      "corpus.test_speakers\t8\tspeakers in the test split\n"
      "corpus.utts_per_speaker\t50\tutterances per speaker\n"
      "corpus.feature_dim\t12\tfeature vector dimension\n"
      "corpus.min_tokens\t3\tfewest non-silence tokens per utterance\n"
      "corpus.max_tokens\t8\tmost non-silence tokens per utterance\n"
      "corpus.min_duration\t2\tfewest frames per token\n"
      "corpus.max_duration\t5\tmost frames per token\n"
      "corpus.separation\t2.0\tscale of the token mean cloud\n"
      "corpus.noise_sigma\t0.5\tper-frame noise standard deviation\n"
      "corpus.warp_log_scale\t0.35\tspeaker scale warp, log range\n"
      "corpus.warp_offset\t0.6\tspeaker offset warp range\n"
      "corpus.lead_silence_prob\t0.7\tchance of leading silence\n"
      "corpus.trail_silence_prob\t0.7\tchance of trailing silence\n"
      "model.context\tmono\tmono or left-bicontext pdf layout\n"
      "model.states_per_unit\t2\tHMM states per modeling unit\n"
      "model.hidden_dims\t32,32\tcomma list of hidden layer widths\n"
      "model.lm_order\t2\ttoken n-gram order for the denominator\n"
      "model.lm_discount\t0.5\tabsolute discount for the n-gram\n"
      "model.num_buckets\t40\tgeometric length bucket count\n"
      "train.epochs\t8\tbase training epochs\n"
      "train.learning_rate\t0.02\tbase training step size\n"
      "train.gamma1\t1.0\tsequence term weight in training\n"
      "train.gamma2\t0.1\tframe term weight in training\n"
      "train.sat_layers\t0\tlayers that get per-speaker scales\n"
      "train.sat_learning_rate\t0.1\tstep size for those scales\n"
      "adapt.method\tblhuc\tlhuc, blhuc, map, or kl\n"
      "adapt.criterion\tce\tce or mmi+ce\n"
      "adapt.gamma1\t1.0\tsequence weight under mmi+ce\n"
      "adapt.gamma2\t0.1\tframe weight\n"
      "adapt.gamma3\tdefault\tprior weight; default means gamma1+gamma2\n"
      "adapt.epochs\t7\tadaptation epochs\n"
      "adapt.learning_rate\t0.1\tadaptation step size\n"
      "adapt.num_samples\t1\tposterior samples per update\n"
      "adapt.hooked_layers\tall\tall or a comma list of layer indices\n"
      "adapt.prior_mean\t0.0\tprior mean over scaling parameters\n"
      "adapt.prior_stddev\t1.0\tprior standard deviation\n"
      "adapt.penalty_weight\t1.0\tweight of the map or kl penalty\n"
      "adapt.selection_rate\t0.8\tfraction kept by confidence\n"
      "adapt.oracle\tfalse\tadapt on reference labels\n"
      "adapt.max_utts\t0\tcap on adaptation utterances, 0 = all\n"
      "adapt.lattice_beam\t4.0\tbeam for confidence lattices\n"
      "score.strip_silence\ttrue\tdrop silence tokens before scoring\n";
}

}  // namespace lfa
