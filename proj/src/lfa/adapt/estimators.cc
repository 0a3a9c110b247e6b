// lfa/adapt/estimators.cc
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

#include "lfa/adapt/estimators.h"

#include <cmath>
#include <utility>

#include "lfa/adapt/objective-eval.h"
#include "lfa/base/common.h"
#include "lfa/infer/forward-backward.h"

namespace lfa {
namespace {

// Gradients of one SGD step with respect to the adapter parameters,
// one slot per hooked layer.
struct StepGradients {
  std::vector<Eigen::VectorXd> mu;
  std::vector<Eigen::VectorXd> log_sigma;  // Bayesian only
  double loss = 0.0;
};

void CheckUtterances(const AcousticNet& net,
                     const std::vector<AdaptUtterance>& utts) {
  for (const AdaptUtterance& utt : utts) {
    if (utt.features.rows() < 1 || utt.features.cols() != net.InputDim()) {
      throw InvalidArgument("adapt: utterance " + utt.id +
                            " feature shape mismatch");
    }
    if (utt.supervision.NumPdfs() != net.NumPdfs()) {
      throw InvalidArgument("adapt: utterance " + utt.id +
                            " supervision pdf count does not match the net");
    }
  }
}

// Frame targets frozen at the current parameters: numerator
// occupancies under the frame head's own logits.
std::vector<Eigen::MatrixXd> RefreshTargets(
    const AcousticNet& net, const SpeakerAdapter& adapter,
    const std::vector<AdaptUtterance>& utts) {
  const LhucStack stack = adapter.PredictionStack(net.NumHiddenLayers());
  std::vector<Eigen::MatrixXd> targets;
  targets.reserve(utts.size());
  for (const AdaptUtterance& utt : utts) {
    const HeadScores heads = net.Forward(utt.features, &stack, nullptr);
    targets.push_back(ForwardBackward(utt.supervision, heads.ce).occupancies);
  }
  return targets;
}

StepGradients DeterministicStep(const AcousticNet& net,
                                const SpeakerAdapter& adapter,
                                const AdaptUtterance& utt,
                                const WeightedGraph* den_graph,
                                const AdaptOptions& options,
                                const EvalOptions& eval_options,
                                double n_scale) {
  const LhucStack stack = adapter.PredictionStack(net.NumHiddenLayers());
  UtteranceEval eval =
      EvalAdaptationObjective(net, &stack, utt.features, utt.supervision,
                              den_graph, options.objective, eval_options);
  const NetGradients grads = net.Backward(eval.tape, eval.g_lfmmi, eval.g_ce,
                                          {.net = false, .adapter = true});
  StepGradients out;
  out.loss = eval.loss.total;
  for (const LayerAdapter& la : adapter.layers) {
    LFA_CHECK(grads.lhuc_r[la.layer].has_value());
    Eigen::VectorXd g = *grads.lhuc_r[la.layer];
    if (options.penalty == AdaptPenalty::kParamPrior) {
      AccumulateMapGrad(la.mu, options.prior,
                        options.penalty_weight * n_scale, &g);
      out.loss +=
          options.penalty_weight * n_scale * MapPenalty(la.mu, options.prior);
    }
    out.mu.push_back(std::move(g));
  }
  return out;
}

StepGradients BayesianStep(const AcousticNet& net,
                           const SpeakerAdapter& adapter,
                           const AdaptUtterance& utt,
                           const WeightedGraph* den_graph,
                           const AdaptOptions& options,
                           const EvalOptions& eval_options, double n_scale,
                           Rng& rng) {
  const int num_layers = net.NumHiddenLayers();
  const int k = options.num_samples;
  StepGradients out;
  std::vector<Eigen::VectorXd> sigma;
  for (const LayerAdapter& la : adapter.layers) {
    out.mu.push_back(Eigen::VectorXd::Zero(la.mu.size()));
    out.log_sigma.push_back(Eigen::VectorXd::Zero(la.mu.size()));
    sigma.push_back(la.log_sigma.array().exp().matrix());
  }

  const double inv_k = 1.0 / k;
  for (int s = 0; s < k; ++s) {
    std::vector<Eigen::VectorXd> eps;
    const LhucStack stack =
        adapter.SampleStack(num_layers, rng, options.zero_sigma, &eps);
    UtteranceEval eval =
        EvalAdaptationObjective(net, &stack, utt.features, utt.supervision,
                                den_graph, options.objective, eval_options);
    const NetGradients grads = net.Backward(eval.tape, eval.g_lfmmi, eval.g_ce,
                                            {.net = false, .adapter = true});
    out.loss += eval.loss.total * inv_k;
    for (std::size_t i = 0; i < adapter.layers.size(); ++i) {
      const LayerAdapter& la = adapter.layers[i];
      LFA_CHECK(grads.lhuc_r[la.layer].has_value());
      const Eigen::VectorXd& gr = *grads.lhuc_r[la.layer];
      out.mu[i] += inv_k * gr;
      if (!options.zero_sigma) {
        // r = mu + sigma .* eps, so dr/dlog_sigma = sigma .* eps.
        out.log_sigma[i] +=
            inv_k * (gr.array() * eps[i].array() * sigma[i].array()).matrix();
      }
    }
  }

  const double gamma3 = options.objective.Gamma3();
  if (!options.zero_sigma && gamma3 > 0.0) {
    for (std::size_t i = 0; i < adapter.layers.size(); ++i) {
      const LayerAdapter& la = adapter.layers[i];
      out.loss += gamma3 * n_scale * GaussianKl(la.mu, sigma[i], options.prior);
      AccumulateGaussianKlGrad(la.mu, sigma[i], options.prior,
                               gamma3 * n_scale, &out.mu[i],
                               &out.log_sigma[i]);
    }
  }
  return out;
}

}  // namespace

const char* AdaptMethodName(AdaptMethod method) {
  switch (method) {
    case AdaptMethod::kDeterministic:
      return "lhuc";
    case AdaptMethod::kBayesian:
      return "blhuc";
  }
  throw InvalidArgument("unknown adapt method");
}

AdaptMethod AdaptMethodFromName(const std::string& name) {
  if (name == "lhuc") return AdaptMethod::kDeterministic;
  if (name == "blhuc") return AdaptMethod::kBayesian;
  throw InvalidArgument("unknown adapt method: " + name);
}

const char* AdaptPenaltyName(AdaptPenalty penalty) {
  switch (penalty) {
    case AdaptPenalty::kNone:
      return "none";
    case AdaptPenalty::kParamPrior:
      return "map";
    case AdaptPenalty::kOutputKl:
      return "kl";
  }
  throw InvalidArgument("unknown adapt penalty");
}

AdaptPenalty AdaptPenaltyFromName(const std::string& name) {
  if (name == "none") return AdaptPenalty::kNone;
  if (name == "map") return AdaptPenalty::kParamPrior;
  if (name == "kl") return AdaptPenalty::kOutputKl;
  throw InvalidArgument("unknown adapt penalty: " + name);
}

void AdaptOptions::Validate() const {
  objective.Validate();
  prior.Validate();
  if (epochs < 0) throw InvalidArgument("adapt: negative epochs");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("adapt: learning_rate must be positive");
  }
  if (num_samples < 1) throw InvalidArgument("adapt: num_samples < 1");
  if (!(penalty_weight >= 0.0)) {
    throw InvalidArgument("adapt: negative penalty_weight");
  }
  if (method == AdaptMethod::kBayesian && penalty != AdaptPenalty::kNone) {
    throw InvalidArgument(
        "adapt: the Bayesian estimator is regularized by its prior KL; "
        "extra penalties apply to the deterministic one only");
  }
  if (method == AdaptMethod::kDeterministic && zero_sigma) {
    throw InvalidArgument("adapt: zero_sigma only applies to blhuc");
  }
}

SpeakerAdapter EstimateAdapter(const AcousticNet& net,
                               const std::vector<AdaptUtterance>& utts,
                               const WeightedGraph* den_graph,
                               const AdaptOptions& options,
                               const std::string& speaker,
                               AdaptReport* report) {
  options.Validate();
  AdaptReport local_report;
  AdaptReport& rep = report != nullptr ? *report : local_report;
  rep = AdaptReport{};

  const AdapterMode mode = options.method == AdaptMethod::kBayesian
                               ? AdapterMode::kBayesian
                               : AdapterMode::kDeterministic;
  SpeakerAdapter adapter =
      SpeakerAdapter::Identity(net, mode, options.hooked_layers, speaker);
  if (utts.empty() || options.epochs == 0) return adapter;
  CheckUtterances(net, utts);
  if (options.objective.gamma1 > 0.0 && den_graph == nullptr) {
    throw InvalidArgument("adapt: sequence term needs a denominator graph");
  }

  // Frozen unadapted logits for the output-divergence penalty.
  std::vector<Eigen::MatrixXd> ref_logits;
  if (options.penalty == AdaptPenalty::kOutputKl) {
    ref_logits.reserve(utts.size());
    for (const AdaptUtterance& utt : utts) {
      ref_logits.push_back(net.Forward(utt.features, nullptr, nullptr).ce);
    }
  }

  const double n_scale = 1.0 / static_cast<double>(utts.size());
  SpeakerAdapter last_good = adapter;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::vector<Eigen::MatrixXd> targets;
    if (options.objective.gamma2 > 0.0) {
      targets = RefreshTargets(net, adapter, utts);
    }
    double epoch_loss = 0.0;
    for (std::size_t step = 0; step < utts.size(); ++step) {
      const AdaptUtterance& utt = utts[step];
      EvalOptions eval_options;
      if (!targets.empty()) eval_options.frame_targets = &targets[step];
      if (options.penalty == AdaptPenalty::kOutputKl) {
        eval_options.si_ce_logits = &ref_logits[step];
        eval_options.output_kl_weight = options.penalty_weight;
      }

      StepGradients grads;
      try {
        if (options.method == AdaptMethod::kBayesian) {
          Rng rng = Rng::ForStream(
              options.seed, "blhuc/" + speaker + "/e" + std::to_string(epoch) +
                                "/s" + std::to_string(step));
          grads = BayesianStep(net, adapter, utt, den_graph, options,
                               eval_options, n_scale, rng);
        } else {
          grads = DeterministicStep(net, adapter, utt, den_graph, options,
                                    eval_options, n_scale);
        }
      } catch (const InfeasibleSupervision& e) {
        throw;  // a bad supervision graph is a caller bug, not divergence
      } catch (const Error& e) {
        rep.diverged = true;
        rep.note = std::string("stopped at epoch ") + std::to_string(epoch) +
                   " on " + utt.id + ": " + e.what();
        return last_good;
      }
      if (!std::isfinite(grads.loss)) {
        rep.diverged = true;
        rep.note = std::string("non-finite loss at epoch ") +
                   std::to_string(epoch) + " on " + utt.id;
        return last_good;
      }

      last_good = adapter;
      try {
        for (std::size_t i = 0; i < adapter.layers.size(); ++i) {
          LayerAdapter& la = adapter.layers[i];
          ApplySgdVec(la.mu, grads.mu[i], options.learning_rate,
                      "adapter mu, layer " + std::to_string(la.layer));
          if (options.method == AdaptMethod::kBayesian &&
              !options.zero_sigma) {
            ApplySgdVec(la.log_sigma, grads.log_sigma[i],
                        options.learning_rate,
                        "adapter log_sigma, layer " + std::to_string(la.layer));
          }
        }
      } catch (const Error& e) {
        rep.diverged = true;
        rep.note = std::string("non-finite gradient at epoch ") +
                   std::to_string(epoch) + " on " + utt.id + ": " + e.what();
        return last_good;
      }
      epoch_loss += grads.loss;
      ++rep.updates;
    }
    rep.epoch_losses.push_back(epoch_loss * n_scale);
  }
  return adapter;
}

}  // namespace lfa
