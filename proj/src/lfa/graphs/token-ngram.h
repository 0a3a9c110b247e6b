// lfa/graphs/token-ngram.h
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
// Token-level n-gram model with interpolated absolute discounting:
//
//   P(w | h) = max(c(h,w) - d, 0) / c(h)
//            + d * N1plus(h) / c(h) * P(w | parent(h))
//
// where parent(h) drops the oldest token and the unigram level
// interpolates with the uniform distribution over the inventory. The
// interpolated form keeps every state exactly normalized and, for
// d > 0, assigns every token nonzero probability. Histories are
// counted without begin-of-sequence padding, so the start state is the
// empty (unigram) history. States are the observed histories of length
// < order; lookups back off to the longest observed suffix.

#ifndef LFA_GRAPHS_TOKEN_NGRAM_H_
#define LFA_GRAPHS_TOKEN_NGRAM_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace lfa {

class TokenNgramLm {
 public:
  int Order() const { return order_; }
  int NumTokens() const { return num_tokens_; }
  int NumStates() const { return static_cast<int>(histories_.size()); }
  int Start() const { return start_; }
  double Discount() const { return discount_; }

  const std::vector<int32_t>& StateHistory(int state) const;
  double LogProb(int state, int32_t token) const;
  int NextState(int state, int32_t token) const;

  // Sum of a sequence's conditional log probabilities starting from
  // the empty history.
  double ScoreSequence(const std::vector<int32_t>& tokens) const;

  // Throws unless every state's probabilities sum to one within tol.
  void CheckNormalized(double tol = 1e-9) const;

  void Save(std::ostream& os) const;
  static TokenNgramLm Load(std::istream& is);

 private:
  friend TokenNgramLm EstimateTokenNgram(
      const std::vector<std::vector<int32_t>>& corpus, int order,
      int num_tokens, double discount);

  int order_ = 0;
  int num_tokens_ = 0;
  int start_ = 0;
  double discount_ = 0.0;
  std::vector<std::vector<int32_t>> histories_;  // per state
  std::vector<std::vector<double>> log_probs_;   // per state, per token
  std::vector<std::vector<int>> next_state_;     // per state, per token
};

// Counts all orders up to `order` over the label sequences (empty
// sequences are ignored) and freezes the smoothed model. num_tokens is
// the inventory size and bounds the token ids.
TokenNgramLm EstimateTokenNgram(const std::vector<std::vector<int32_t>>& corpus,
                                int order, int num_tokens,
                                double discount = 0.5);

}  // namespace lfa

#endif  // LFA_GRAPHS_TOKEN_NGRAM_H_
