// lfa/harness/ter.cc
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

#include "lfa/harness/ter.h"

#include <algorithm>
#include <limits>

#include "lfa/base/common.h"

namespace lfa {

double EditCounts::Rate() const {
  if (ref_tokens == 0) {
    return NumErrors() == 0 ? 0.0
                            : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(NumErrors()) / ref_tokens;
}

EditCounts& EditCounts::operator+=(const EditCounts& other) {
  substitutions += other.substitutions;
  insertions += other.insertions;
  deletions += other.deletions;
  ref_tokens += other.ref_tokens;
  return *this;
}

EditCounts AlignTokens(const std::vector<std::string>& ref,
                       const std::vector<std::string>& hyp) {
  const int nr = static_cast<int>(ref.size());
  const int nh = static_cast<int>(hyp.size());
  // d(i, j): cost of aligning the first i reference tokens with the
  // first j hypothesis tokens.
  std::vector<std::vector<int>> d(nr + 1, std::vector<int>(nh + 1, 0));
  for (int i = 1; i <= nr; ++i) d[i][0] = i;
  for (int j = 1; j <= nh; ++j) d[0][j] = j;
  for (int i = 1; i <= nr; ++i) {
    for (int j = 1; j <= nh; ++j) {
      const int sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int del = d[i - 1][j] + 1;
      const int ins = d[i][j - 1] + 1;
      d[i][j] = std::min({sub, del, ins});
    }
  }

  EditCounts counts;
  counts.ref_tokens = nr;
  int i = nr;
  int j = nh;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const int cost = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      if (d[i][j] == d[i - 1][j - 1] + cost) {
        counts.substitutions += cost;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++counts.deletions;
      --i;
      continue;
    }
    LFA_CHECK(j > 0 && d[i][j] == d[i][j - 1] + 1);
    ++counts.insertions;
    --j;
  }
  return counts;
}

TerReport ScoreTokenErrorRate(
    const std::map<std::string, std::vector<std::string>>& refs,
    const std::map<std::string, std::vector<std::string>>& hyps,
    const std::map<std::string, std::string>& speaker_by_id) {
  std::string missing;
  for (const auto& [id, toks] : refs) {
    (void)toks;
    if (hyps.find(id) == hyps.end()) missing += "\n  no hypothesis for " + id;
  }
  for (const auto& [id, toks] : hyps) {
    (void)toks;
    if (refs.find(id) == refs.end()) missing += "\n  no reference for " + id;
  }
  if (!missing.empty())
    throw InvalidArgument("reference/hypothesis id mismatch:" + missing);

  TerReport report;
  for (const auto& [id, ref] : refs) {
    const auto spk = speaker_by_id.find(id);
    if (spk == speaker_by_id.end())
      throw InvalidArgument("no speaker recorded for utterance " + id);
    const EditCounts counts = AlignTokens(ref, hyps.at(id));
    report.total += counts;
    report.per_speaker[spk->second] += counts;
  }
  return report;
}

std::vector<std::string> StripToken(const std::vector<std::string>& tokens,
                                    const std::string& token) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens)
    if (t != token) out.push_back(t);
  return out;
}

}  // namespace lfa
