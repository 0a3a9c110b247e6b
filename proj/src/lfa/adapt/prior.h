// lfa/adapt/prior.h
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
// Isotropic Gaussian prior over adapter parameters, with the two ways
// the estimators lean on it: the exact KL divergence from a diagonal
// Gaussian posterior (Bayesian estimation) and a quadratic penalty on
// a point estimate (MAP estimation).

#ifndef LFA_ADAPT_PRIOR_H_
#define LFA_ADAPT_PRIOR_H_

#include <Eigen/Core>

namespace lfa {

struct GaussianPrior {
  double mean = 0.0;
  double stddev = 1.0;

  void Validate() const;
};

// KL( N(mu, diag(sigma^2)) || N(mean, stddev^2 I) ), summed over
// dimensions:
//
//   sum_d  log(stddev / sigma_d)
//          + (sigma_d^2 + (mu_d - mean)^2) / (2 stddev^2) - 1/2
//
// Requires every sigma_d > 0.
double GaussianKl(const Eigen::VectorXd& mu, const Eigen::VectorXd& sigma,
                  const GaussianPrior& prior);

// Adds scale * dKL/dmu and scale * dKL/dlog_sigma into the given
// accumulators (sized like mu).
void AccumulateGaussianKlGrad(const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& sigma,
                              const GaussianPrior& prior, double scale,
                              Eigen::VectorXd* g_mu,
                              Eigen::VectorXd* g_log_sigma);

// sum_d (r_d - mean)^2 / (2 stddev^2), the negative log prior density
// up to a constant.
double MapPenalty(const Eigen::VectorXd& r, const GaussianPrior& prior);

// Adds scale * dPenalty/dr into the accumulator.
void AccumulateMapGrad(const Eigen::VectorXd& r, const GaussianPrior& prior,
                       double scale, Eigen::VectorXd* g_r);

}  // namespace lfa

#endif  // LFA_ADAPT_PRIOR_H_
