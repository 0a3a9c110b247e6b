// lfa/infer/lattice.h
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
// Beam-exact lattices. The lattice is a prefix tree of complete
// length-T paths: it contains a path if and only if the path's total
// score is within `beam` of the best one. Enumeration is
// branch-and-bound with the exact max-plus completion bound, so no
// over- or under-generation is possible. Graph and acoustic scores are
// kept separate on every lattice arc.

#ifndef LFA_INFER_LATTICE_H_
#define LFA_INFER_LATTICE_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lfa/graphs/weighted-graph.h"
#include "lfa/infer/frame-scores.h"

namespace lfa {

// The requested beam admits more paths than the configured limits.
class LatticeTooLarge : public Error {
 public:
  explicit LatticeTooLarge(const std::string& msg) : Error(msg) {}
};

struct LatticeArc {
  int32_t src = 0;
  int32_t dst = 0;
  int32_t pdf = 0;
  int32_t olabel = kNoLabel;
  double graph_score = 0.0;  // transition + lm weight
  double ac_score = 0.0;     // frame score
};

struct LatticeFinal {
  int32_t node = 0;
  double final_weight = 0.0;
  double total_score = 0.0;  // complete path score including final weight
};

struct Lattice {
  int num_frames = 0;
  int num_pdfs = 0;
  int32_t root = 0;
  std::vector<int32_t> node_frame;   // per node
  // Depth-first preorder; every node other than the root has exactly
  // one incoming arc.
  std::vector<LatticeArc> arcs;
  // One entry per complete path in the lattice.
  std::vector<LatticeFinal> finals;
  double best_score = 0.0;
  double beam = 0.0;

  std::size_t NumPaths() const { return finals.size(); }
  void TextDump(std::ostream& os) const;
};

struct LatticeLimits {
  std::size_t max_paths = 50000;
  std::size_t max_arcs = 2000000;
};

// Requires beam > 0 (infinite beam allowed). Throws
// InfeasibleSupervision when no complete path exists and
// LatticeTooLarge when the beam admits more than the limits.
Lattice GenerateLattice(const WeightedGraph& graph, const FrameScores& scores,
                        double beam, const LatticeLimits& limits = {});

// frames x pdfs posterior mass of each pdf under the lattice's path
// distribution; rows sum to one.
Eigen::MatrixXd LatticeFramePosteriors(const Lattice& lattice);

}  // namespace lfa

#endif  // LFA_INFER_LATTICE_H_
