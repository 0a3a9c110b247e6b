// tools/lfadapt.cc
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
// Command line entry point. Failures print one JSON object to stderr
// ({"error": kind, "message": text}) and exit nonzero: 2 for bad
// arguments or config, 3 for missing or corrupt files, 4 for other
// toolkit errors, 1 for anything unexpected.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lfa/base/common.h"
#include "lfa/harness/commands.h"
#include "lfa/harness/config.h"

namespace {

struct ConfigSources {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
};

lfa::ExperimentConfig ResolveConfig(const ConfigSources& sources) {
  lfa::ExperimentConfig config;
  if (!sources.config_path.empty())
    config = lfa::ExperimentConfig::Load(sources.config_path);
  for (const std::string& kv : sources.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw lfa::InvalidArgument("--set expects key=value, got \"" + kv +
                                 "\"");
    config.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

void AddConfigFlags(CLI::App* cmd, ConfigSources* sources) {
  cmd->add_option("--config", sources->config_path,
                  "key=value config file; defaults apply when omitted");
  cmd->add_option("--set", sources->overrides,
                  "override one config key, e.g. --set adapt.epochs=3");
}

int Run(int argc, char** argv) {
  CLI::App app{"desk-scale acoustic training and speaker adaptation"};
  app.require_subcommand(1);

  ConfigSources sources;

  auto* keys = app.add_subcommand("config", "print the config key table");
  auto* gen = app.add_subcommand("gen-corpus", "synthesize the two corpora");
  std::string out_dir;
  AddConfigFlags(gen, &sources);
  gen->add_option("--out", out_dir, "output root directory")->required();

  auto* train = app.add_subcommand("train", "flat-start training");
  std::string corpus_dir, model_dir;
  bool sat = false;
  AddConfigFlags(train, &sources);
  train->add_option("--corpus", corpus_dir, "training corpus directory")
      ->required();
  train->add_option("--model", model_dir, "model output directory")
      ->required();
  train->add_flag("--sat", sat,
                  "also train per-speaker scales (discarded after training)");

  auto* adapt = app.add_subcommand("adapt", "estimate speaker adapters");
  std::string adapter_dir;
  std::string first_pass_dir;
  std::string method, criterion;
  bool oracle = false;
  double select_rate = -1.0;
  int adapt_epochs = -1, max_utts = -1;
  AddConfigFlags(adapt, &sources);
  adapt->add_option("--corpus", corpus_dir, "adaptation corpus directory")
      ->required();
  adapt->add_option("--model", model_dir, "model directory")->required();
  adapt->add_option("--out", adapter_dir, "adapter output directory")
      ->required();
  adapt->add_option("--first-pass-model", first_pass_dir,
                    "model whose decode supplies the supervision; defaults "
                    "to --model");
  adapt->add_option("--method", method, "lhuc, blhuc, map, or kl");
  adapt->add_option("--criterion", criterion, "ce or mmi+ce");
  adapt->add_flag("--oracle", oracle, "adapt on reference labels");
  adapt->add_option("--select-rate", select_rate,
                    "fraction of utterances kept by confidence");
  adapt->add_option("--epochs", adapt_epochs, "adaptation epochs");
  adapt->add_option("--max-utts", max_utts,
                    "adaptation utterances per speaker, 0 = all");

  auto* decode = app.add_subcommand("decode", "write hypothesis tokens");
  std::string hyp_path;
  AddConfigFlags(decode, &sources);
  decode->add_option("--corpus", corpus_dir, "corpus directory")->required();
  decode->add_option("--model", model_dir, "model directory")->required();
  decode->add_option("--adapters", adapter_dir,
                     "adapter directory; omit to decode unadapted");
  decode->add_option("--hyp", hyp_path, "hypothesis output file")->required();

  auto* score = app.add_subcommand("score", "token error rate metrics");
  lfa::ScoreArgs score_args;
  AddConfigFlags(score, &sources);
  score->add_option("--corpus", score_args.corpus_dir, "corpus directory")
      ->required();
  score->add_option("--hyp", score_args.hyp_path, "hypothesis file")
      ->required();
  score->add_option("--condition", score_args.condition,
                    "condition name recorded in the metrics")
      ->required();
  score->add_option("--test-set", score_args.test_set,
                    "test set name; defaults to the corpus dir name");
  score->add_option("--baseline", score_args.baseline_path,
                    "stored metrics file to attach as the baseline");
  score->add_option("--metrics", score_args.metrics_path,
                    "metrics JSON output file");
  score->add_option("--adapt-utts", score_args.adapt_utts,
                    "adaptation utterances per speaker, recorded as is");

  auto* report = app.add_subcommand("report", "summarize stored metrics");
  std::vector<std::string> metrics_paths;
  std::string format = "json";
  report->add_option("metrics", metrics_paths, "metrics JSON files")
      ->required();
  report->add_option("--format", format, "json, csv, or plotdata");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit cleanly; real parse errors turn
    // into the same JSON shape as toolkit failures.
    if (e.get_exit_code() == 0) return app.exit(e);
    throw lfa::InvalidArgument(e.what());
  }

  if (keys->parsed()) {
    std::cout << lfa::ConfigKeyTable();
    return 0;
  }
  if (gen->parsed()) {
    lfa::CmdGenCorpus(ResolveConfig(sources), out_dir, std::cout);
    return 0;
  }
  if (train->parsed()) {
    lfa::CmdTrain(ResolveConfig(sources), corpus_dir, model_dir, sat,
                  std::cout);
    return 0;
  }
  if (adapt->parsed()) {
    lfa::ExperimentConfig config = ResolveConfig(sources);
    if (!method.empty()) config.Set("adapt.method", method);
    if (!criterion.empty()) config.Set("adapt.criterion", criterion);
    if (oracle) config.Set("adapt.oracle", "true");
    if (select_rate >= 0.0)
      config.Set("adapt.selection_rate", std::to_string(select_rate));
    if (adapt_epochs >= 0)
      config.Set("adapt.epochs", std::to_string(adapt_epochs));
    if (max_utts >= 0) config.Set("adapt.max_utts", std::to_string(max_utts));
    lfa::CmdAdapt(config, corpus_dir, model_dir, adapter_dir, first_pass_dir,
                  std::cout);
    return 0;
  }
  if (decode->parsed()) {
    lfa::CmdDecode(ResolveConfig(sources), corpus_dir, model_dir, adapter_dir,
                   hyp_path, std::cout);
    return 0;
  }
  if (score->parsed()) {
    lfa::CmdScore(ResolveConfig(sources), score_args, std::cout);
    return 0;
  }
  if (report->parsed()) {
    std::cout << lfa::CmdReport(metrics_paths, format);
    return 0;
  }
  return 0;
}

int Fail(const char* kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump()
            << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const lfa::InvalidArgument& e) {
    return Fail("invalid_argument", e.what(), 2);
  } catch (const lfa::CorruptArchive& e) {
    return Fail("corrupt_archive", e.what(), 3);
  } catch (const lfa::MissingRecord& e) {
    return Fail("missing_record", e.what(), 3);
  } catch (const lfa::Error& e) {
    return Fail("error", e.what(), 4);
  } catch (const std::exception& e) {
    return Fail("unknown", e.what(), 1);
  }
}
