// lfa/net/lhuc.h
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
// Hidden unit contribution scaling. Each hooked hidden layer owns a
// parameter vector r whose element-wise squashing
//
//   xi(r) = 2 * logistic(r), in (0, 2)
//
// multiplies the layer's activations. xi(0) is exactly 1, so a zero
// vector reproduces the unadapted network bit for bit.

#ifndef LFA_NET_LHUC_H_
#define LFA_NET_LHUC_H_

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace lfa {

inline double LhucScale(double r) { return 2.0 / (1.0 + std::exp(-r)); }

inline double LhucScaleDeriv(double r) {
  const double s = 1.0 / (1.0 + std::exp(-r));
  return 2.0 * s * (1.0 - s);
}

inline Eigen::VectorXd LhucScale(const Eigen::VectorXd& r) {
  return r.unaryExpr([](double x) { return LhucScale(x); });
}

inline Eigen::VectorXd LhucScaleDeriv(const Eigen::VectorXd& r) {
  return r.unaryExpr([](double x) { return LhucScaleDeriv(x); });
}

// One r vector per hidden layer; layers without a value stay
// unscaled. This is the evaluation-time view: deterministic adapters
// put r here directly, Bayesian ones a posterior sample or mean.
struct LhucStack {
  std::vector<std::optional<Eigen::VectorXd>> r;

  bool Engaged(int layer) const {
    return layer < static_cast<int>(r.size()) && r[layer].has_value();
  }
};

}  // namespace lfa

#endif  // LFA_NET_LHUC_H_
