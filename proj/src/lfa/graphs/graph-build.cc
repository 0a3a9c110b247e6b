// lfa/graphs/graph-build.cc
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

#include "lfa/graphs/graph-build.h"

#include <cmath>
#include <deque>
#include <map>
#include <string>
#include <tuple>

#include "lfa/base/common.h"

namespace lfa {

int MinSupervisionFrames(const std::vector<int32_t>& labels,
                         const HmmTopology& topo) {
  return static_cast<int>(labels.size()) * topo.states_per_unit;
}

namespace {

void ValidateLabels(const std::vector<int32_t>& labels,
                    const TokenInventory& inventory) {
  if (labels.empty()) throw InvalidArgument("empty label sequence");
  for (int32_t w : labels)
    if (w < 0 || w >= inventory.NumTokens())
      throw InvalidArgument("label id out of range: " + std::to_string(w));
}

// Appends one left-to-right unit chain for `token` to the builder.
// Returns the chain's first and last state. The entry arc itself is
// added by the caller since its source varies.
struct UnitChain {
  int first;
  int last;
};

UnitChain AddUnitStates(GraphBuilder& b, int states_per_unit) {
  UnitChain chain{-1, -1};
  for (int k = 0; k < states_per_unit; ++k) {
    const int s = b.AddState();
    if (k == 0) chain.first = s;
    chain.last = s;
  }
  return chain;
}

}  // namespace

WeightedGraph BuildNumeratorGraph(const std::vector<int32_t>& labels,
                                  const HmmTopology& topo,
                                  const TokenInventory& inventory, int frames,
                                  const TokenNgramLm* lm,
                                  bool allow_boundary_silence) {
  topo.Validate();
  ValidateLabels(labels, inventory);
  if (lm != nullptr && lm->NumTokens() != inventory.NumTokens())
    throw InvalidArgument("lm and inventory token counts differ");
  if (frames < MinSupervisionFrames(labels, topo))
    throw InfeasibleSupervision(
        "label sequence needs at least " +
        std::to_string(MinSupervisionFrames(labels, topo)) +
        " frames, got " + std::to_string(frames));

  const int S = topo.states_per_unit;
  const int32_t sil = inventory.SilenceId();
  std::vector<std::vector<int32_t>> variants;
  const bool lead = allow_boundary_silence && labels.front() != sil;
  const bool trail = allow_boundary_silence && labels.back() != sil;
  for (int use_lead = 0; use_lead <= (lead ? 1 : 0); ++use_lead) {
    for (int use_trail = 0; use_trail <= (trail ? 1 : 0); ++use_trail) {
      std::vector<int32_t> v;
      if (use_lead) v.push_back(sil);
      v.insert(v.end(), labels.begin(), labels.end());
      if (use_trail) v.push_back(sil);
      if (MinSupervisionFrames(v, topo) <= frames) variants.push_back(v);
    }
  }

  GraphBuilder b(inventory.NumPdfs(S));
  const int start = b.AddState();
  b.SetStart(start);
  for (const auto& v : variants) {
    int prev_last = start;
    int lm_state = lm ? lm->Start() : 0;
    for (size_t i = 0; i < v.size(); ++i) {
      const int32_t w = v[i];
      const int32_t ctx = i == 0 ? sil : v[i - 1];
      const UnitChain chain = AddUnitStates(b, S);
      double entry = i == 0 ? 0.0 : std::log(topo.ExitProb());
      if (lm) {
        entry += lm->LogProb(lm_state, w);
        lm_state = lm->NextState(lm_state, w);
      }
      b.AddArc(prev_last, chain.first, inventory.PdfId(ctx, w, 0, S), w,
               entry);
      for (int k = 0; k < S; ++k) {
        const int s = chain.first + k;
        b.AddArc(s, s, inventory.PdfId(ctx, w, k, S), kNoLabel,
                 std::log(topo.SelfLoopProb(k)));
        if (k + 1 < S)
          b.AddArc(s, s + 1, inventory.PdfId(ctx, w, k + 1, S), kNoLabel,
                   std::log(topo.ForwardProb(k)));
      }
      prev_last = chain.last;
    }
    b.SetFinal(prev_last, std::log(topo.ExitProb()));
  }
  return b.Seal();
}

namespace {

WeightedGraph BuildLmExpandedGraph(const TokenNgramLm& lm,
                                   const HmmTopology& topo,
                                   const TokenInventory& inventory,
                                   bool with_olabels) {
  topo.Validate();
  if (lm.NumTokens() != inventory.NumTokens())
    throw InvalidArgument("lm and inventory token counts differ");
  const int S = topo.states_per_unit;
  const int32_t sil = inventory.SilenceId();
  const bool bicontext =
      inventory.context_mode() == ContextMode::kLeftBicontext;

  GraphBuilder b(inventory.NumPdfs(S));
  const int start = b.AddState();
  b.SetStart(start);

  // Key: lm state after entering the unit, the unit's token, and its
  // left context (collapsed in mono mode). Value: first state of the
  // unit's chain.
  using Key = std::tuple<int, int32_t, int32_t>;
  std::map<Key, int> first_state;
  std::deque<Key> queue;

  auto intern = [&](int lm_state, int32_t token, int32_t ctx) {
    const Key key{lm_state, token, bicontext ? ctx : 0};
    auto it = first_state.find(key);
    if (it != first_state.end()) return it->second;
    const UnitChain chain = AddUnitStates(b, S);
    first_state.emplace(key, chain.first);
    queue.push_back(key);
    return chain.first;
  };

  for (int32_t w = 0; w < inventory.NumTokens(); ++w) {
    const int dst = intern(lm.NextState(lm.Start(), w), w, sil);
    b.AddArc(start, dst, inventory.PdfId(sil, w, 0, S),
             with_olabels ? w : kNoLabel, lm.LogProb(lm.Start(), w));
  }

  while (!queue.empty()) {
    const auto [lm_state, token, ctx] = queue.front();
    queue.pop_front();
    const int first = first_state.at(Key{lm_state, token, ctx});
    for (int k = 0; k < S; ++k) {
      const int s = first + k;
      b.AddArc(s, s, inventory.PdfId(ctx, token, k, S), kNoLabel,
               std::log(topo.SelfLoopProb(k)));
      if (k + 1 < S)
        b.AddArc(s, s + 1, inventory.PdfId(ctx, token, k + 1, S), kNoLabel,
                 std::log(topo.ForwardProb(k)));
    }
    const int last = first + S - 1;
    b.SetFinal(last, std::log(topo.ExitProb()));
    const double exit = std::log(topo.ExitProb());
    for (int32_t w = 0; w < inventory.NumTokens(); ++w) {
      const int dst = intern(lm.NextState(lm_state, w), w, token);
      b.AddArc(last, dst, inventory.PdfId(token, w, 0, S),
               with_olabels ? w : kNoLabel, exit + lm.LogProb(lm_state, w));
    }
  }
  return b.Seal();
}

}  // namespace

WeightedGraph BuildDenominatorGraph(const TokenNgramLm& lm,
                                    const HmmTopology& topo,
                                    const TokenInventory& inventory) {
  return BuildLmExpandedGraph(lm, topo, inventory, /*with_olabels=*/false);
}

WeightedGraph BuildDecodingGraph(const TokenNgramLm& lm,
                                 const HmmTopology& topo,
                                 const TokenInventory& inventory) {
  return BuildLmExpandedGraph(lm, topo, inventory, /*with_olabels=*/true);
}

}  // namespace lfa
