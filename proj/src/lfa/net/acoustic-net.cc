// lfa/net/acoustic-net.cc
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

#include "lfa/net/acoustic-net.h"

#include <cmath>
#include <sstream>

#include "lfa/base/bin-io.h"
#include "lfa/base/common.h"

namespace lfa {

namespace {
constexpr char kNetMagic[5] = "LFN1";

AffineLayer GlorotLayer(int out_dim, int in_dim, Rng& rng) {
  const double a = std::sqrt(6.0 / (in_dim + out_dim));
  AffineLayer layer;
  layer.w.resize(out_dim, in_dim);
  for (int r = 0; r < out_dim; ++r)
    for (int c = 0; c < in_dim; ++c) layer.w(r, c) = rng.Uniform(-a, a);
  layer.b = Eigen::VectorXd::Zero(out_dim);
  return layer;
}

void CheckFinite(const Eigen::MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) throw Error("non-finite gradient in " + what);
}

}  // namespace

AcousticNet AcousticNet::RandomInit(const NetDims& dims, Rng& rng) {
  if (dims.input_dim < 1) throw InvalidArgument("input_dim must be >= 1");
  if (dims.num_pdfs < 1) throw InvalidArgument("num_pdfs must be >= 1");
  if (dims.hidden_dims.empty())
    throw InvalidArgument("need at least one hidden layer");
  for (int h : dims.hidden_dims)
    if (h < 1) throw InvalidArgument("hidden dims must be >= 1");

  AcousticNet net;
  net.input_dim_ = dims.input_dim;
  net.num_pdfs_ = dims.num_pdfs;
  int in_dim = dims.input_dim;
  for (int h : dims.hidden_dims) {
    net.hidden_.push_back(GlorotLayer(h, in_dim, rng));
    in_dim = h;
  }
  net.lfmmi_head_ = GlorotLayer(dims.num_pdfs, in_dim, rng);
  net.ce_head_ = GlorotLayer(dims.num_pdfs, in_dim, rng);
  return net;
}

int AcousticNet::HiddenDim(int layer) const {
  if (layer < 0 || layer >= NumHiddenLayers())
    throw InvalidArgument("layer index out of range");
  return static_cast<int>(hidden_[layer].w.rows());
}

NetDims AcousticNet::Dims() const {
  NetDims d;
  d.input_dim = input_dim_;
  d.num_pdfs = num_pdfs_;
  for (const auto& l : hidden_) d.hidden_dims.push_back(l.w.rows());
  return d;
}

HeadScores AcousticNet::Forward(const Eigen::MatrixXd& features,
                                const LhucStack* adapter,
                                GradientTape* tape) const {
  if (hidden_.empty()) throw Error("uninitialized network");
  if (features.rows() < 1)
    throw InvalidArgument("need at least one feature frame");
  if (features.cols() != input_dim_)
    throw InvalidArgument("feature dim " + std::to_string(features.cols()) +
                          " does not match network input dim " +
                          std::to_string(input_dim_));
  if (!features.allFinite())
    throw InvalidArgument("features must be finite");
  if (adapter != nullptr) {
    for (int l = 0; l < NumHiddenLayers(); ++l)
      if (adapter->Engaged(l) &&
          adapter->r[l]->size() != hidden_[l].w.rows())
        throw InvalidArgument("adapter vector size mismatch at layer " +
                              std::to_string(l));
  }

  if (tape != nullptr) {
    *tape = GradientTape{};
    tape->input = features;
    tape->pre.resize(hidden_.size());
    tape->post.resize(hidden_.size());
    tape->adapted.resize(hidden_.size());
    tape->scale.resize(hidden_.size());
    tape->scale_deriv.resize(hidden_.size());
  }

  Eigen::MatrixXd x = features;
  for (size_t l = 0; l < hidden_.size(); ++l) {
    Eigen::MatrixXd z =
        (x * hidden_[l].w.transpose()).rowwise() + hidden_[l].b.transpose();
    Eigen::MatrixXd h = z.cwiseMax(0.0);
    Eigen::MatrixXd scaled;
    const bool engaged = adapter != nullptr && adapter->Engaged(l);
    if (engaged) {
      const Eigen::VectorXd xi = LhucScale(*adapter->r[l]);
      scaled = h.array().rowwise() * xi.transpose().array();
      if (tape != nullptr) {
        tape->scale[l] = xi;
        tape->scale_deriv[l] = LhucScaleDeriv(*adapter->r[l]);
      }
    } else {
      scaled = h;
    }
    if (tape != nullptr) {
      tape->pre[l] = std::move(z);
      tape->post[l] = std::move(h);
      tape->adapted[l] = scaled;
    }
    x = std::move(scaled);
  }

  HeadScores out;
  out.lfmmi =
      (x * lfmmi_head_.w.transpose()).rowwise() + lfmmi_head_.b.transpose();
  out.ce = (x * ce_head_.w.transpose()).rowwise() + ce_head_.b.transpose();
  return out;
}

NetGradients AcousticNet::Backward(GradientTape& tape,
                                   const Eigen::MatrixXd& g_lfmmi,
                                   const Eigen::MatrixXd& g_ce,
                                   const BackwardRequest& request) const {
  if (tape.consumed) throw Error("gradient tape already consumed");
  tape.consumed = true;
  const int L = NumHiddenLayers();
  if (static_cast<int>(tape.pre.size()) != L)
    throw InvalidArgument("tape does not match this network");
  const Eigen::Index T = tape.input.rows();
  if (g_lfmmi.rows() != T || g_lfmmi.cols() != num_pdfs_ ||
      g_ce.rows() != T || g_ce.cols() != num_pdfs_)
    throw InvalidArgument("head gradient shape mismatch");

  NetGradients grads;
  grads.lhuc_r.resize(L);
  if (request.net) grads.hidden.resize(L);

  const Eigen::MatrixXd& trunk_out = tape.adapted[L - 1];
  if (request.net) {
    grads.lfmmi_head.w = g_lfmmi.transpose() * trunk_out;
    grads.lfmmi_head.b = g_lfmmi.colwise().sum().transpose();
    grads.ce_head.w = g_ce.transpose() * trunk_out;
    grads.ce_head.b = g_ce.colwise().sum().transpose();
  }

  // Upstream gradient w.r.t. the scaled activations of layer l.
  Eigen::MatrixXd up = g_lfmmi * lfmmi_head_.w + g_ce * ce_head_.w;
  for (int l = L - 1; l >= 0; --l) {
    if (tape.scale[l].has_value()) {
      if (request.adapter) {
        // d loss / d r = sum_t up(t) .* h(t) .* dxi/dr.
        const Eigen::VectorXd hu =
            (up.array() * tape.post[l].array()).colwise().sum().transpose();
        grads.lhuc_r[l] =
            (hu.array() * tape.scale_deriv[l]->array()).matrix();
      }
      up = up.array().rowwise() * tape.scale[l]->transpose().array();
    }
    // ReLU gate: subgradient zero at exactly zero.
    Eigen::MatrixXd dz =
        (tape.pre[l].array() > 0.0).cast<double>() * up.array();
    if (request.net) {
      const Eigen::MatrixXd& in =
          l == 0 ? tape.input : tape.adapted[l - 1];
      grads.hidden[l].w = dz.transpose() * in;
      grads.hidden[l].b = dz.colwise().sum().transpose();
    }
    if (l > 0) up = dz * hidden_[l].w;
  }
  return grads;
}

std::string AcousticNet::SerializeParams() const {
  std::ostringstream os;
  WriteU32(os, 1);  // version
  WriteU32(os, static_cast<uint32_t>(input_dim_));
  WriteU32(os, static_cast<uint32_t>(hidden_.size()));
  for (const auto& l : hidden_) WriteU32(os, static_cast<uint32_t>(l.w.rows()));
  WriteU32(os, static_cast<uint32_t>(num_pdfs_));
  for (const auto& l : hidden_) {
    WriteMatrix(os, l.w);
    WriteVector(os, l.b);
  }
  WriteMatrix(os, lfmmi_head_.w);
  WriteVector(os, lfmmi_head_.b);
  WriteMatrix(os, ce_head_.w);
  WriteVector(os, ce_head_.b);
  return os.str();
}

void AcousticNet::Save(const std::string& path) const {
  SaveWithChecksum(path, kNetMagic, SerializeParams());
}

AcousticNet AcousticNet::Load(const std::string& path) {
  std::istringstream is(LoadChecked(path, kNetMagic));
  const uint32_t version = ReadU32(is);
  if (version != 1)
    throw CorruptArchive("unsupported checkpoint version " +
                         std::to_string(version));
  AcousticNet net;
  net.input_dim_ = static_cast<int>(ReadU32(is));
  const uint32_t num_hidden = ReadU32(is);
  if (num_hidden == 0 || num_hidden > 64)
    throw CorruptArchive("unreasonable hidden layer count");
  std::vector<int> dims(num_hidden);
  for (auto& d : dims) d = static_cast<int>(ReadU32(is));
  net.num_pdfs_ = static_cast<int>(ReadU32(is));
  int in_dim = net.input_dim_;
  for (uint32_t l = 0; l < num_hidden; ++l) {
    AffineLayer layer;
    layer.w = ReadMatrix(is);
    layer.b = ReadVector(is);
    if (layer.w.rows() != dims[l] || layer.w.cols() != in_dim ||
        layer.b.size() != dims[l])
      throw CorruptArchive("checkpoint layer shape mismatch");
    net.hidden_.push_back(std::move(layer));
    in_dim = dims[l];
  }
  net.lfmmi_head_.w = ReadMatrix(is);
  net.lfmmi_head_.b = ReadVector(is);
  net.ce_head_.w = ReadMatrix(is);
  net.ce_head_.b = ReadVector(is);
  if (net.lfmmi_head_.w.rows() != net.num_pdfs_ ||
      net.lfmmi_head_.w.cols() != in_dim ||
      net.ce_head_.w.rows() != net.num_pdfs_ ||
      net.ce_head_.w.cols() != in_dim ||
      net.lfmmi_head_.b.size() != net.num_pdfs_ ||
      net.ce_head_.b.size() != net.num_pdfs_)
    throw CorruptArchive("checkpoint head shape mismatch");
  return net;
}

uint64_t AcousticNet::Checksum() const {
  const std::string payload = SerializeParams();
  return Fnv1a64(payload.data(), payload.size());
}

void ApplySgd(AcousticNet& net, const NetGradients& grads,
              double learning_rate) {
  if (static_cast<int>(grads.hidden.size()) != net.NumHiddenLayers())
    throw InvalidArgument("gradients do not cover every layer");
  for (int l = 0; l < net.NumHiddenLayers(); ++l) {
    CheckFinite(grads.hidden[l].w, "hidden layer " + std::to_string(l));
    CheckFinite(grads.hidden[l].b, "hidden bias " + std::to_string(l));
  }
  CheckFinite(grads.lfmmi_head.w, "sequence head");
  CheckFinite(grads.ce_head.w, "ce head");
  CheckFinite(grads.lfmmi_head.b, "sequence head bias");
  CheckFinite(grads.ce_head.b, "ce head bias");
  for (int l = 0; l < net.NumHiddenLayers(); ++l) {
    net.hidden_[l].w -= learning_rate * grads.hidden[l].w;
    net.hidden_[l].b -= learning_rate * grads.hidden[l].b;
  }
  net.lfmmi_head_.w -= learning_rate * grads.lfmmi_head.w;
  net.lfmmi_head_.b -= learning_rate * grads.lfmmi_head.b;
  net.ce_head_.w -= learning_rate * grads.ce_head.w;
  net.ce_head_.b -= learning_rate * grads.ce_head.b;
}

void ApplySgdVec(Eigen::VectorXd& param, const Eigen::VectorXd& grad,
                 double learning_rate, const std::string& what) {
  if (param.size() != grad.size())
    throw InvalidArgument("gradient size mismatch for " + what);
  if (!grad.allFinite()) throw Error("non-finite gradient in " + what);
  param -= learning_rate * grad;
}

}  // namespace lfa
