// lfa/harness/metrics.cc
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

#include "lfa/harness/metrics.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "lfa/base/common.h"

namespace lfa {

namespace {

nlohmann::json CountsJson(const EditCounts& counts) {
  return nlohmann::json{{"ref_tokens", counts.ref_tokens},
                        {"substitutions", counts.substitutions},
                        {"insertions", counts.insertions},
                        {"deletions", counts.deletions},
                        {"ter", counts.Rate()}};
}

void CheckCounts(const nlohmann::json& m, const std::string& where,
                 std::vector<std::string>* problems) {
  for (const char* field :
       {"ref_tokens", "substitutions", "insertions", "deletions"}) {
    if (!m.contains(field) || !m[field].is_number_integer())
      problems->push_back(where + field + ": missing or not an integer");
    else if (m[field].get<int64_t>() < 0)
      problems->push_back(where + field + ": negative");
  }
  if (!m.contains("ter") || !m["ter"].is_number())
    problems->push_back(where + "ter: missing or not a number");
  else if (m["ter"].get<double>() < 0.0)
    problems->push_back(where + "ter: negative");
}

}  // namespace

nlohmann::json MetricsFromTer(const std::string& condition,
                              const std::string& test_set, uint64_t seed,
                              const TerReport& report) {
  nlohmann::json m = CountsJson(report.total);
  m["condition"] = condition;
  m["test_set"] = test_set;
  m["seed"] = seed;
  nlohmann::json per_speaker = nlohmann::json::object();
  for (const auto& [speaker, counts] : report.per_speaker)
    per_speaker[speaker] = CountsJson(counts);
  m["per_speaker"] = per_speaker;
  m["wall_clock_sec"] = 0.0;
  return m;
}

void AttachBaseline(nlohmann::json* metrics, const nlohmann::json& baseline) {
  LFA_CHECK(metrics != nullptr);
  const double base_ter = baseline.at("ter").get<double>();
  nlohmann::json b{{"condition", baseline.at("condition")},
                   {"ter", base_ter}};
  if (base_ter > 0.0) {
    const double ours = metrics->at("ter").get<double>();
    b["relative_reduction"] = (base_ter - ours) / base_ter;
  }
  (*metrics)["baseline"] = b;
}

std::vector<std::string> ValidateMetrics(const nlohmann::json& metrics) {
  std::vector<std::string> problems;
  if (!metrics.is_object()) {
    problems.push_back("metrics: not a JSON object");
    return problems;
  }
  for (const char* field : {"condition", "test_set"}) {
    if (!metrics.contains(field) || !metrics[field].is_string())
      problems.push_back(std::string(field) + ": missing or not a string");
  }
  if (!metrics.contains("seed") || !metrics["seed"].is_number_integer())
    problems.push_back("seed: missing or not an integer");
  CheckCounts(metrics, "", &problems);
  if (!metrics.contains("per_speaker") || !metrics["per_speaker"].is_object()) {
    problems.push_back("per_speaker: missing or not an object");
  } else {
    for (const auto& [speaker, counts] : metrics["per_speaker"].items()) {
      if (!counts.is_object())
        problems.push_back("per_speaker." + speaker + ": not an object");
      else
        CheckCounts(counts, "per_speaker." + speaker + ".", &problems);
    }
  }
  if (!metrics.contains("wall_clock_sec") ||
      !metrics["wall_clock_sec"].is_number())
    problems.push_back("wall_clock_sec: missing or not a number");
  if (metrics.contains("baseline")) {
    const auto& b = metrics["baseline"];
    if (!b.is_object()) {
      problems.push_back("baseline: not an object");
    } else {
      if (!b.contains("condition") || !b["condition"].is_string())
        problems.push_back("baseline.condition: missing or not a string");
      if (!b.contains("ter") || !b["ter"].is_number())
        problems.push_back("baseline.ter: missing or not a number");
      if (b.contains("relative_reduction") &&
          !b["relative_reduction"].is_number())
        problems.push_back("baseline.relative_reduction: not a number");
    }
  }
  if (metrics.contains("adapt_utts_per_speaker") &&
      !metrics["adapt_utts_per_speaker"].is_number_integer())
    problems.push_back("adapt_utts_per_speaker: not an integer");
  return problems;
}

nlohmann::json StripWallClock(const nlohmann::json& metrics) {
  nlohmann::json out = metrics;
  out.erase("wall_clock_sec");
  return out;
}

void WriteJsonFile(const std::string& path, const nlohmann::json& value) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << value.dump(2) << "\n";
  if (!os) throw Error("failed writing " + path);
}

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MissingRecord("cannot open " + path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArchive("bad JSON in " + path + ": " + e.what());
  }
}

std::string RenderReport(const std::vector<nlohmann::json>& records,
                         const std::string& format) {
  if (format == "json") {
    return nlohmann::json(records).dump(2) + "\n";
  }
  if (format == "csv") {
    std::string out =
        "condition,test_set,seed,ref_tokens,substitutions,insertions,"
        "deletions,ter,relative_reduction\n";
    for (const nlohmann::json& m : records) {
      out += m.at("condition").get<std::string>() + ",";
      out += m.at("test_set").get<std::string>() + ",";
      out += m.at("seed").dump() + ",";
      out += m.at("ref_tokens").dump() + ",";
      out += m.at("substitutions").dump() + ",";
      out += m.at("insertions").dump() + ",";
      out += m.at("deletions").dump() + ",";
      out += m.at("ter").dump() + ",";
      if (m.contains("baseline") &&
          m["baseline"].contains("relative_reduction"))
        out += m["baseline"]["relative_reduction"].dump();
      out += "\n";
    }
    return out;
  }
  if (format == "plotdata") {
    // One "condition count ter" line per adapted record, grouped by
    // condition and ordered by adaptation data amount.
    std::vector<const nlohmann::json*> rows;
    for (const nlohmann::json& m : records)
      if (m.contains("adapt_utts_per_speaker")) rows.push_back(&m);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const nlohmann::json* a, const nlohmann::json* b) {
                       const auto ca = a->at("condition").get<std::string>();
                       const auto cb = b->at("condition").get<std::string>();
                       if (ca != cb) return ca < cb;
                       return a->at("adapt_utts_per_speaker").get<int>() <
                              b->at("adapt_utts_per_speaker").get<int>();
                     });
    std::string out;
    for (const nlohmann::json* m : rows) {
      out += m->at("condition").get<std::string>() + " " +
             m->at("adapt_utts_per_speaker").dump() + " " +
             m->at("ter").dump() + "\n";
    }
    return out;
  }
  throw InvalidArgument("unknown report format \"" + format +
                        "\"; expected json, csv, or plotdata");
}

}  // namespace lfa
