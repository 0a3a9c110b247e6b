// lfa/graphs/token-ngram.cc
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

#include "lfa/graphs/token-ngram.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "lfa/base/common.h"

namespace lfa {

const std::vector<int32_t>& TokenNgramLm::StateHistory(int state) const {
  if (state < 0 || state >= NumStates())
    throw InvalidArgument("lm state out of range: " + std::to_string(state));
  return histories_[state];
}

double TokenNgramLm::LogProb(int state, int32_t token) const {
  if (state < 0 || state >= NumStates())
    throw InvalidArgument("lm state out of range: " + std::to_string(state));
  if (token < 0 || token >= num_tokens_)
    throw InvalidArgument("token id out of range: " + std::to_string(token));
  return log_probs_[state][token];
}

int TokenNgramLm::NextState(int state, int32_t token) const {
  if (state < 0 || state >= NumStates())
    throw InvalidArgument("lm state out of range: " + std::to_string(state));
  if (token < 0 || token >= num_tokens_)
    throw InvalidArgument("token id out of range: " + std::to_string(token));
  return next_state_[state][token];
}

double TokenNgramLm::ScoreSequence(const std::vector<int32_t>& tokens) const {
  double total = 0.0;
  int state = start_;
  for (int32_t w : tokens) {
    total += LogProb(state, w);
    state = NextState(state, w);
  }
  return total;
}

void TokenNgramLm::CheckNormalized(double tol) const {
  for (int s = 0; s < NumStates(); ++s) {
    double acc = kLogZero;
    for (int w = 0; w < num_tokens_; ++w) acc = LogAdd(acc, log_probs_[s][w]);
    if (std::abs(acc) > tol)
      throw Error("lm state " + std::to_string(s) +
                  " log mass off by " + std::to_string(acc));
  }
}

void TokenNgramLm::Save(std::ostream& os) const {
  os.precision(17);
  os << "order " << order_ << "\n";
  os << "tokens " << num_tokens_ << "\n";
  os << "discount " << discount_ << "\n";
  os << "states " << NumStates() << "\n";
  for (int s = 0; s < NumStates(); ++s) {
    os << "state";
    for (int32_t t : histories_[s]) os << " " << t;
    os << "\n";
    os << "logprobs";
    for (int w = 0; w < num_tokens_; ++w) os << " " << log_probs_[s][w];
    os << "\n";
    os << "next";
    for (int w = 0; w < num_tokens_; ++w) os << " " << next_state_[s][w];
    os << "\n";
  }
}

TokenNgramLm TokenNgramLm::Load(std::istream& is) {
  TokenNgramLm lm;
  std::string key;
  int num_states = 0;
  if (!(is >> key >> lm.order_) || key != "order")
    throw CorruptArchive("lm file: expected order");
  if (!(is >> key >> lm.num_tokens_) || key != "tokens")
    throw CorruptArchive("lm file: expected tokens");
  if (!(is >> key >> lm.discount_) || key != "discount")
    throw CorruptArchive("lm file: expected discount");
  if (!(is >> key >> num_states) || key != "states")
    throw CorruptArchive("lm file: expected states");
  if (lm.order_ < 1 || lm.num_tokens_ < 1 || num_states < 1)
    throw CorruptArchive("lm file: bad header");
  is >> std::ws;
  lm.histories_.resize(num_states);
  lm.log_probs_.resize(num_states);
  lm.next_state_.resize(num_states);
  std::string line;
  for (int s = 0; s < num_states; ++s) {
    if (!std::getline(is, line)) throw CorruptArchive("lm file: truncated");
    std::istringstream hs(line);
    hs >> key;
    if (key != "state") throw CorruptArchive("lm file: expected state line");
    int32_t t;
    while (hs >> t) lm.histories_[s].push_back(t);
    if (!std::getline(is, line)) throw CorruptArchive("lm file: truncated");
    std::istringstream ps(line);
    ps >> key;
    if (key != "logprobs")
      throw CorruptArchive("lm file: expected logprobs line");
    double p;
    while (ps >> p) lm.log_probs_[s].push_back(p);
    if (static_cast<int>(lm.log_probs_[s].size()) != lm.num_tokens_)
      throw CorruptArchive("lm file: wrong logprobs arity");
    if (!std::getline(is, line)) throw CorruptArchive("lm file: truncated");
    std::istringstream ns(line);
    ns >> key;
    if (key != "next") throw CorruptArchive("lm file: expected next line");
    int n;
    while (ns >> n) {
      if (n < 0 || n >= num_states)
        throw CorruptArchive("lm file: next state out of range");
      lm.next_state_[s].push_back(n);
    }
    if (static_cast<int>(lm.next_state_[s].size()) != lm.num_tokens_)
      throw CorruptArchive("lm file: wrong next arity");
  }
  // The empty history is always present and is the start state.
  lm.start_ = -1;
  for (int s = 0; s < num_states; ++s)
    if (lm.histories_[s].empty()) lm.start_ = s;
  if (lm.start_ < 0) throw CorruptArchive("lm file: no unigram state");
  lm.CheckNormalized(1e-6);
  return lm;
}

TokenNgramLm EstimateTokenNgram(const std::vector<std::vector<int32_t>>& corpus,
                                int order, int num_tokens, double discount) {
  if (order < 1) throw InvalidArgument("lm order must be >= 1");
  if (num_tokens < 1) throw InvalidArgument("lm needs a token inventory");
  if (discount < 0.0 || discount >= 1.0)
    throw InvalidArgument("discount must be in [0, 1)");
  using History = std::vector<int32_t>;
  std::map<History, std::map<int32_t, long>> counts;
  long total_tokens = 0;
  for (const auto& seq : corpus) {
    for (size_t i = 0; i < seq.size(); ++i) {
      if (seq[i] < 0 || seq[i] >= num_tokens)
        throw InvalidArgument("label id out of range: " +
                              std::to_string(seq[i]));
      ++total_tokens;
      // Count the token under every available history length; no
      // begin-of-sequence padding, so short prefixes only contribute
      // their shorter contexts.
      const int max_len =
          std::min<int>(order - 1, static_cast<int>(i));
      for (int len = 0; len <= max_len; ++len) {
        History h(seq.begin() + (i - len), seq.begin() + i);
        counts[h][seq[i]] += 1;
      }
    }
  }
  if (total_tokens == 0)
    throw InvalidArgument("lm estimation needs a non-empty corpus");

  TokenNgramLm lm;
  lm.order_ = order;
  lm.num_tokens_ = num_tokens;
  lm.discount_ = discount;
  for (const auto& [h, _] : counts) lm.histories_.push_back(h);
  // Parents (shorter suffixes) come first so the smoothing recursion
  // below can run in one pass.
  std::sort(lm.histories_.begin(), lm.histories_.end(),
            [](const History& a, const History& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  std::map<History, int> state_of;
  for (int s = 0; s < lm.NumStates(); ++s) state_of[lm.histories_[s]] = s;
  lm.start_ = state_of.at(History{});

  lm.log_probs_.resize(lm.NumStates());
  lm.next_state_.resize(lm.NumStates());
  std::vector<std::vector<double>> probs(lm.NumStates());
  for (int s = 0; s < lm.NumStates(); ++s) {
    const History& h = lm.histories_[s];
    const auto& row = counts.at(h);
    long ctx_count = 0;
    long distinct = 0;
    for (const auto& [w, c] : row) {
      ctx_count += c;
      if (c > 0) ++distinct;
    }
    std::vector<double> lower(num_tokens, 1.0 / num_tokens);
    if (!h.empty()) {
      History parent(h.begin() + 1, h.end());
      lower = probs[state_of.at(parent)];
    }
    std::vector<double>& p = probs[s];
    p.assign(num_tokens, 0.0);
    const double backoff_mass =
        discount * static_cast<double>(distinct) / ctx_count;
    for (int w = 0; w < num_tokens; ++w) {
      const auto it = row.find(w);
      const double c = it == row.end() ? 0.0 : static_cast<double>(it->second);
      p[w] = std::max(c - discount, 0.0) / ctx_count + backoff_mass * lower[w];
    }
    lm.log_probs_[s].resize(num_tokens);
    for (int w = 0; w < num_tokens; ++w)
      lm.log_probs_[s][w] = std::log(p[w]);
    // Successor state: longest observed suffix of h + w.
    lm.next_state_[s].resize(num_tokens);
    for (int32_t w = 0; w < num_tokens; ++w) {
      History full = h;
      full.push_back(w);
      const int cap = std::min<int>(order - 1, static_cast<int>(full.size()));
      int next = lm.start_;
      for (int len = cap; len >= 1; --len) {
        History cand(full.end() - len, full.end());
        const auto it = state_of.find(cand);
        if (it != state_of.end()) {
          next = it->second;
          break;
        }
      }
      lm.next_state_[s][w] = next;
    }
  }
  return lm;
}

}  // namespace lfa
