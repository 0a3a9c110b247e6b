// lfa/harness/ter.h
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
// Token error rate: Levenshtein alignment of reference against
// hypothesis token strings, TER = (sub + ins + del) / ref tokens.

#ifndef LFA_HARNESS_TER_H_
#define LFA_HARNESS_TER_H_

#include <map>
#include <string>
#include <vector>

namespace lfa {

struct EditCounts {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int ref_tokens = 0;

  int NumErrors() const { return substitutions + insertions + deletions; }
  // (S + I + D) / N. An empty reference scores 0 when the hypothesis
  // is also empty and infinity otherwise.
  double Rate() const;
  EditCounts& operator+=(const EditCounts& other);
};

// Minimum-cost alignment with unit costs. When costs tie the
// backtrace prefers a substitution over a deletion over an insertion,
// so one wrong token is one substitution, never a deletion plus an
// insertion.
EditCounts AlignTokens(const std::vector<std::string>& ref,
                       const std::vector<std::string>& hyp);

struct TerReport {
  EditCounts total;
  std::map<std::string, EditCounts> per_speaker;
};

// Scores hypotheses against references by utterance id. The two maps
// must cover exactly the same ids; any mismatch is reported in one
// error listing every id that is missing from either side.
// speaker_by_id must name a speaker for every scored id.
TerReport ScoreTokenErrorRate(
    const std::map<std::string, std::vector<std::string>>& refs,
    const std::map<std::string, std::vector<std::string>>& hyps,
    const std::map<std::string, std::string>& speaker_by_id);

// Removes every occurrence of token (scoring usually drops silence).
std::vector<std::string> StripToken(const std::vector<std::string>& tokens,
                                    const std::string& token);

}  // namespace lfa

#endif  // LFA_HARNESS_TER_H_
