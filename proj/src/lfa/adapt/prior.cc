// lfa/adapt/prior.cc
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

#include "lfa/adapt/prior.h"

#include <cmath>

#include "lfa/base/common.h"

namespace lfa {

void GaussianPrior::Validate() const {
  if (!std::isfinite(mean)) throw InvalidArgument("prior: non-finite mean");
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw InvalidArgument("prior: stddev must be positive and finite");
  }
}

double GaussianKl(const Eigen::VectorXd& mu, const Eigen::VectorXd& sigma,
                  const GaussianPrior& prior) {
  prior.Validate();
  if (mu.size() != sigma.size()) {
    throw InvalidArgument("GaussianKl: mu/sigma size mismatch");
  }
  const double s0 = prior.stddev;
  const double var0 = s0 * s0;
  double kl = 0.0;
  for (Eigen::Index d = 0; d < mu.size(); ++d) {
    const double s = sigma[d];
    if (!(s > 0.0)) throw InvalidArgument("GaussianKl: sigma must be > 0");
    const double m = mu[d] - prior.mean;
    kl += std::log(s0 / s) + (s * s + m * m) / (2.0 * var0) - 0.5;
  }
  return kl;
}

void AccumulateGaussianKlGrad(const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& sigma,
                              const GaussianPrior& prior, double scale,
                              Eigen::VectorXd* g_mu,
                              Eigen::VectorXd* g_log_sigma) {
  prior.Validate();
  LFA_CHECK(g_mu != nullptr && g_log_sigma != nullptr);
  LFA_CHECK(g_mu->size() == mu.size() && g_log_sigma->size() == mu.size());
  if (mu.size() != sigma.size()) {
    throw InvalidArgument("GaussianKl: mu/sigma size mismatch");
  }
  const double var0 = prior.stddev * prior.stddev;
  for (Eigen::Index d = 0; d < mu.size(); ++d) {
    const double s = sigma[d];
    if (!(s > 0.0)) throw InvalidArgument("GaussianKl: sigma must be > 0");
    (*g_mu)[d] += scale * (mu[d] - prior.mean) / var0;
    (*g_log_sigma)[d] += scale * (s * s / var0 - 1.0);
  }
}

double MapPenalty(const Eigen::VectorXd& r, const GaussianPrior& prior) {
  prior.Validate();
  const double var0 = prior.stddev * prior.stddev;
  return (r.array() - prior.mean).square().sum() / (2.0 * var0);
}

void AccumulateMapGrad(const Eigen::VectorXd& r, const GaussianPrior& prior,
                       double scale, Eigen::VectorXd* g_r) {
  prior.Validate();
  LFA_CHECK(g_r != nullptr && g_r->size() == r.size());
  const double var0 = prior.stddev * prior.stddev;
  *g_r += (scale / var0) * (r.array() - prior.mean).matrix();
}

}  // namespace lfa
