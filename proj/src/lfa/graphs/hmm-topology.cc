// lfa/graphs/hmm-topology.cc
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

#include "lfa/graphs/hmm-topology.h"

#include <cmath>
#include <string>

#include "lfa/base/common.h"

namespace lfa {

void HmmTopology::Validate() const {
  if (states_per_unit < 1)
    throw InvalidArgument("topology needs at least one state");
  if (static_cast<int>(self_loop_prob.size()) != states_per_unit ||
      static_cast<int>(forward_prob.size()) != states_per_unit)
    throw InvalidArgument("topology table size mismatch");
  for (int s = 0; s < states_per_unit; ++s) {
    const double sum = self_loop_prob[s] + forward_prob[s];
    if (std::abs(sum - 1.0) > 1e-12)
      throw InvalidArgument("state " + std::to_string(s) +
                            " outgoing probabilities sum to " +
                            std::to_string(sum));
    if (forward_prob[s] <= 0.0)
      throw InvalidArgument("state " + std::to_string(s) +
                            " cannot reach the exit");
  }
}

HmmTopology BuildHmmTopology(int states_per_unit) {
  if (states_per_unit < 1)
    throw InvalidArgument("states_per_unit must be >= 1, got " +
                          std::to_string(states_per_unit));
  HmmTopology topo;
  topo.states_per_unit = states_per_unit;
  topo.self_loop_prob.assign(states_per_unit, 0.5);
  topo.forward_prob.assign(states_per_unit, 0.5);
  topo.Validate();
  return topo;
}

}  // namespace lfa
