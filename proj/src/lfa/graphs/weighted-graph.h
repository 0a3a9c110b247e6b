// lfa/graphs/weighted-graph.h
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
// Immutable weighted acceptor over pdf emissions. Every arc consumes
// one observation frame and emits the pdf of its destination HMM
// state; weights are natural-log probabilities. Arcs live in one
// contiguous array sorted by source state. Optional output labels
// carry token identities for decoding.

#ifndef LFA_GRAPHS_WEIGHTED_GRAPH_H_
#define LFA_GRAPHS_WEIGHTED_GRAPH_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lfa/base/common.h"

namespace lfa {

inline constexpr int32_t kNoLabel = -1;

struct Arc {
  int32_t src = 0;
  int32_t dst = 0;
  int32_t pdf = 0;
  int32_t olabel = kNoLabel;
  double weight = 0.0;  // log probability
};

class WeightedGraph {
 public:
  WeightedGraph() = default;

  int NumStates() const { return static_cast<int>(arc_offsets_.size()) - 1; }
  int NumArcs() const { return static_cast<int>(arcs_.size()); }
  int NumPdfs() const { return num_pdfs_; }
  int Start() const { return start_; }

  const std::vector<Arc>& arcs() const { return arcs_; }
  // Half-open range of arc indices leaving `state`.
  std::pair<int, int> ArcRange(int state) const {
    return {arc_offsets_[state], arc_offsets_[state + 1]};
  }

  // kLogZero when the state is not final.
  double FinalWeight(int state) const { return final_weights_[state]; }
  bool IsFinal(int state) const { return final_weights_[state] != kLogZero; }
  const std::vector<int>& FinalStates() const { return final_states_; }

  // Fewest arcs on any start-to-final path; the shortest accepted
  // frame count.
  int MinPathFrames() const;

  void Save(const std::string& path) const;
  static WeightedGraph Load(const std::string& path);

  // Debug listing: one "src dst pdf_id log_weight" line per arc plus
  // commented start/final lines.
  void TextDump(std::ostream& os) const;

 private:
  friend class GraphBuilder;

  int start_ = 0;
  int num_pdfs_ = 0;
  std::vector<Arc> arcs_;             // sorted by src
  std::vector<int> arc_offsets_;      // size NumStates()+1
  std::vector<double> final_weights_; // size NumStates()
  std::vector<int> final_states_;     // ascending
};

class GraphBuilder {
 public:
  explicit GraphBuilder(int num_pdfs);

  int AddState();
  int NumStates() const { return num_states_; }
  void SetStart(int state);
  void SetFinal(int state, double log_weight);
  void AddArc(int src, int dst, int32_t pdf, int32_t olabel,
              double log_weight);

  // Freezes the graph: sorts arcs by source (stable, preserving
  // insertion order within a state) and verifies there are no dead
  // states, i.e. every state lies on some start-to-final path. With
  // trim_dead, unreachable and non-coaccessible states are removed
  // instead and ids are compacted in order.
  WeightedGraph Seal(bool trim_dead = false);

 private:
  int num_pdfs_;
  int num_states_ = 0;
  int start_ = -1;
  std::vector<Arc> arcs_;
  std::vector<std::pair<int, double>> finals_;
  bool sealed_ = false;
};

}  // namespace lfa

#endif  // LFA_GRAPHS_WEIGHTED_GRAPH_H_
