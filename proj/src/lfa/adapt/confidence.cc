// lfa/adapt/confidence.cc
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

#include "lfa/adapt/confidence.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lfa/base/common.h"

namespace lfa {

double ConfidenceScore(const Lattice& lattice,
                       const std::vector<int32_t>& best_path_pdfs) {
  if (static_cast<int>(best_path_pdfs.size()) != lattice.num_frames) {
    throw InvalidArgument("ConfidenceScore: best path has " +
                          std::to_string(best_path_pdfs.size()) +
                          " frames, lattice has " +
                          std::to_string(lattice.num_frames));
  }
  if (lattice.num_frames == 0) {
    throw InvalidArgument("ConfidenceScore: empty lattice");
  }
  const Eigen::MatrixXd post = LatticeFramePosteriors(lattice);
  double sum = 0.0;
  for (int t = 0; t < lattice.num_frames; ++t) {
    const int32_t pdf = best_path_pdfs[t];
    if (pdf < 0 || pdf >= lattice.num_pdfs) {
      throw InvalidArgument("ConfidenceScore: pdf out of range");
    }
    sum += post(t, pdf);
  }
  return sum / lattice.num_frames;
}

std::vector<int> SelectByConfidence(const std::vector<ScoredUtterance>& scored,
                                    double rate) {
  if (!(rate > 0.0) || rate > 1.0) {
    throw InvalidArgument("SelectByConfidence: rate must be in (0, 1]");
  }
  for (const ScoredUtterance& s : scored) {
    if (!std::isfinite(s.confidence)) {
      throw InvalidArgument("SelectByConfidence: non-finite confidence for " +
                            s.id);
    }
  }
  const int n = static_cast<int>(scored.size());
  if (n == 0) return {};
  const int keep = static_cast<int>(std::ceil(rate * n));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&scored](int a, int b) {
    if (scored[a].confidence != scored[b].confidence) {
      return scored[a].confidence > scored[b].confidence;
    }
    return scored[a].id < scored[b].id;
  });
  order.resize(std::min(keep, n));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace lfa
