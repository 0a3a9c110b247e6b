// lfa/harness/metrics.h
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
// Metrics files: one JSON object per scored condition, documented by
// docs/metrics-schema.json. Dumps are deterministic (sorted keys,
// shortest round-trip numbers), so identical runs produce identical
// bytes once the wall-clock field is stripped.

#ifndef LFA_HARNESS_METRICS_H_
#define LFA_HARNESS_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfa/harness/ter.h"

namespace lfa {

// Builds the metrics object for one condition from alignment counts.
// wall_clock_sec starts at 0; the caller stamps it last.
nlohmann::json MetricsFromTer(const std::string& condition,
                              const std::string& test_set, uint64_t seed,
                              const TerReport& report);

// Copies the baseline's condition and ter into metrics->at("baseline")
// and records relative_reduction = (baseline - ours) / baseline,
// computed from the stored baseline value, never re-derived.
void AttachBaseline(nlohmann::json* metrics, const nlohmann::json& baseline);

// Structural problems with a metrics object, empty when it conforms
// to the shipped schema. Every problem is reported, not just the
// first.
std::vector<std::string> ValidateMetrics(const nlohmann::json& metrics);

// Copy without the volatile wall_clock_sec field; byte comparisons
// between runs go through this.
nlohmann::json StripWallClock(const nlohmann::json& metrics);

void WriteJsonFile(const std::string& path, const nlohmann::json& value);
nlohmann::json ReadJsonFile(const std::string& path);

// Renders a set of metrics records as "json" (an array), "csv" (one
// row per record), or "plotdata" (condition, adaptation utterance
// count, ter triples for records that carry a count).
std::string RenderReport(const std::vector<nlohmann::json>& records,
                         const std::string& format);

}  // namespace lfa

#endif  // LFA_HARNESS_METRICS_H_
