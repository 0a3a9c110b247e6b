// lfa/net/acoustic-net.h
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
// Feed-forward acoustic model: affine + ReLU hidden layers with
// optional per-layer activation scaling, and two linear output heads
// over the same trunk. The first head produces log scores for the
// sequence objective, the second logits for the frame-level
// cross-entropy smoothing term. All math is double precision and
// single threaded, so results are reproducible.

#ifndef LFA_NET_ACOUSTIC_NET_H_
#define LFA_NET_ACOUSTIC_NET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfa/base/rng.h"
#include "lfa/net/lhuc.h"

namespace lfa {

struct NetDims {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int num_pdfs = 0;
};

struct AffineLayer {
  Eigen::MatrixXd w;  // out x in
  Eigen::VectorXd b;
};

struct HeadScores {
  Eigen::MatrixXd lfmmi;  // frames x pdfs
  Eigen::MatrixXd ce;     // frames x pdfs, pre-softmax logits
};

// Per-utterance activation cache written by Forward and consumed once
// by Backward.
struct GradientTape {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre;      // affine outputs per layer
  std::vector<Eigen::MatrixXd> post;     // relu outputs, unscaled
  std::vector<Eigen::MatrixXd> adapted;  // relu outputs after scaling
  std::vector<std::optional<Eigen::VectorXd>> scale;
  std::vector<std::optional<Eigen::VectorXd>> scale_deriv;
  bool consumed = false;
};

struct NetGradients {
  std::vector<AffineLayer> hidden;
  AffineLayer lfmmi_head;
  AffineLayer ce_head;
  // Gradients w.r.t. the hooked layers' r vectors.
  std::vector<std::optional<Eigen::VectorXd>> lhuc_r;
};

struct BackwardRequest {
  bool net = true;
  bool adapter = false;
};

class AcousticNet {
 public:
  AcousticNet() = default;

  // Glorot uniform on [-a, a] with a = sqrt(6 / (fan_in + fan_out)),
  // drawn in a fixed order (layers bottom up, weights row major,
  // then the two heads); biases start at zero.
  static AcousticNet RandomInit(const NetDims& dims, Rng& rng);

  int InputDim() const { return input_dim_; }
  int NumPdfs() const { return num_pdfs_; }
  int NumHiddenLayers() const { return static_cast<int>(hidden_.size()); }
  int HiddenDim(int layer) const;
  NetDims Dims() const;

  const AffineLayer& HiddenLayer(int layer) const { return hidden_[layer]; }
  AffineLayer& MutableHiddenLayer(int layer) { return hidden_[layer]; }
  const AffineLayer& LfmmiHead() const { return lfmmi_head_; }
  const AffineLayer& CeHead() const { return ce_head_; }
  AffineLayer& MutableLfmmiHead() { return lfmmi_head_; }
  AffineLayer& MutableCeHead() { return ce_head_; }

  // features: frames x input_dim. A null adapter means no scaling
  // anywhere; tape may be null when no backward pass will follow.
  HeadScores Forward(const Eigen::MatrixXd& features,
                     const LhucStack* adapter, GradientTape* tape) const;

  // Backpropagates the two head gradients through the tape, returning
  // whichever of the trunk/head and adapter gradients were requested.
  // The tape is single use.
  NetGradients Backward(GradientTape& tape, const Eigen::MatrixXd& g_lfmmi,
                        const Eigen::MatrixXd& g_ce,
                        const BackwardRequest& request) const;

  void Save(const std::string& path) const;
  static AcousticNet Load(const std::string& path);
  // FNV-1a over the serialized parameters; cheap identity check.
  uint64_t Checksum() const;

 private:
  friend void ApplySgd(AcousticNet& net, const NetGradients& grads,
                       double learning_rate);

  std::string SerializeParams() const;

  int input_dim_ = 0;
  int num_pdfs_ = 0;
  std::vector<AffineLayer> hidden_;
  AffineLayer lfmmi_head_;
  AffineLayer ce_head_;
};

// Vanilla SGD update p -= lr * g on every trunk and head parameter.
// Throws Error on any non-finite gradient, naming the parameter block.
void ApplySgd(AcousticNet& net, const NetGradients& grads,
              double learning_rate);

// Same rule for a bare parameter vector (adapter updates).
void ApplySgdVec(Eigen::VectorXd& param, const Eigen::VectorXd& grad,
                 double learning_rate, const std::string& what);

}  // namespace lfa

#endif  // LFA_NET_ACOUSTIC_NET_H_
