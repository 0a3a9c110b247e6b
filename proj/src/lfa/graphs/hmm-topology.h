// lfa/graphs/hmm-topology.h
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
// Flat-start left-to-right HMM unit topology. Every state has a self
// loop and one forward arc; the last state's forward arc exits the
// unit. Transition probabilities are fixed and uniform over each
// state's outgoing arcs, so they stay untrained.

#ifndef LFA_GRAPHS_HMM_TOPOLOGY_H_
#define LFA_GRAPHS_HMM_TOPOLOGY_H_

#include <vector>

namespace lfa {

struct HmmTopology {
  int states_per_unit = 0;
  // Indexed by state: probability of the self loop and of advancing
  // (the last state's advance is the unit exit).
  std::vector<double> self_loop_prob;
  std::vector<double> forward_prob;

  double SelfLoopProb(int state) const { return self_loop_prob.at(state); }
  double ForwardProb(int state) const { return forward_prob.at(state); }
  double ExitProb() const { return forward_prob.back(); }

  // Throws unless every state's outgoing probabilities sum to one and
  // the chain reaches the exit.
  void Validate() const;
};

// Uniform 1/k over each state's k outgoing arcs; k is 2 everywhere in
// the linear chain.
HmmTopology BuildHmmTopology(int states_per_unit);

}  // namespace lfa

#endif  // LFA_GRAPHS_HMM_TOPOLOGY_H_
