// lfa/graphs/graph-build.h
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
// Builders for the three frame-synchronous acceptors used by training
// and decoding. All of them emit the pdf of the arc's destination HMM
// state, carry log transition probabilities on the HMM arcs, the unit
// exit probability on final weights, and token log probabilities from
// the n-gram model on unit entry arcs. Keeping the numerator's label
// sequence scored by the same model that expands the denominator makes
// every numerator path a denominator path with an identical score, so
// the discriminative loss can never go negative.

#ifndef LFA_GRAPHS_GRAPH_BUILD_H_
#define LFA_GRAPHS_GRAPH_BUILD_H_

#include <cstdint>
#include <vector>

#include "lfa/graphs/hmm-topology.h"
#include "lfa/graphs/token-inventory.h"
#include "lfa/graphs/token-ngram.h"
#include "lfa/graphs/weighted-graph.h"

namespace lfa {

// Fewest frames that can realize the label sequence: every unit must
// visit each of its states at least once.
int MinSupervisionFrames(const std::vector<int32_t>& labels,
                         const HmmTopology& topo);

// Acceptor for the label sequence plus optional silence at either
// boundary (variants longer than `frames` are omitted; a boundary
// silence already present in the labels is not doubled). Throws
// InfeasibleSupervision when even the plain sequence does not fit in
// `frames`. When `lm` is non-null, entry arcs carry the label
// sequence's log probabilities under it.
WeightedGraph BuildNumeratorGraph(const std::vector<int32_t>& labels,
                                  const HmmTopology& topo,
                                  const TokenInventory& inventory, int frames,
                                  const TokenNgramLm* lm = nullptr,
                                  bool allow_boundary_silence = true);

// Acceptor for every token sequence, weighted by the n-gram model.
// States are (lm state, token, left context, hmm state) tuples reached
// by breadth-first expansion from the start, so construction is
// deterministic.
WeightedGraph BuildDenominatorGraph(const TokenNgramLm& lm,
                                    const HmmTopology& topo,
                                    const TokenInventory& inventory);

// Same automaton with token output labels on entry arcs, for reading
// hypotheses off best paths.
WeightedGraph BuildDecodingGraph(const TokenNgramLm& lm,
                                 const HmmTopology& topo,
                                 const TokenInventory& inventory);

}  // namespace lfa

#endif  // LFA_GRAPHS_GRAPH_BUILD_H_
