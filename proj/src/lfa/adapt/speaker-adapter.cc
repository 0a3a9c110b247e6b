// lfa/adapt/speaker-adapter.cc
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

#include "lfa/adapt/speaker-adapter.h"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lfa/base/bin-io.h"
#include "lfa/base/common.h"

namespace lfa {
namespace {

constexpr char kAdapterMagic[] = "LFA1";
constexpr uint32_t kAdapterVersion = 1;

}  // namespace

const char* AdapterModeName(AdapterMode mode) {
  switch (mode) {
    case AdapterMode::kDeterministic:
      return "deterministic";
    case AdapterMode::kBayesian:
      return "bayesian";
  }
  throw InvalidArgument("unknown adapter mode");
}

AdapterMode AdapterModeFromName(const std::string& name) {
  if (name == "deterministic") return AdapterMode::kDeterministic;
  if (name == "bayesian") return AdapterMode::kBayesian;
  throw InvalidArgument("unknown adapter mode: " + name);
}

SpeakerAdapter SpeakerAdapter::Identity(const AcousticNet& net,
                                        AdapterMode mode,
                                        const std::vector<int>& hooked_layers,
                                        std::string speaker) {
  std::vector<int> hooked = hooked_layers;
  if (hooked.empty()) {
    for (int l = 0; l < net.NumHiddenLayers(); ++l) hooked.push_back(l);
  }
  SpeakerAdapter adapter;
  adapter.speaker = std::move(speaker);
  adapter.mode = mode;
  for (int layer : hooked) {
    if (layer < 0 || layer >= net.NumHiddenLayers()) {
      throw InvalidArgument("adapter: hooked layer " + std::to_string(layer) +
                            " out of range");
    }
    LayerAdapter la;
    la.layer = layer;
    la.mu = Eigen::VectorXd::Zero(net.HiddenDim(layer));
    if (mode == AdapterMode::kBayesian) {
      la.log_sigma = Eigen::VectorXd::Zero(net.HiddenDim(layer));
    }
    adapter.layers.push_back(std::move(la));
  }
  for (std::size_t i = 1; i < adapter.layers.size(); ++i) {
    if (adapter.layers[i].layer <= adapter.layers[i - 1].layer) {
      throw InvalidArgument("adapter: hooked layers must be ascending");
    }
  }
  return adapter;
}

void SpeakerAdapter::Validate(const AcousticNet& net) const {
  int prev = -1;
  for (const LayerAdapter& la : layers) {
    if (la.layer <= prev) {
      throw InvalidArgument("adapter: layers out of order");
    }
    prev = la.layer;
    if (la.layer < 0 || la.layer >= net.NumHiddenLayers()) {
      throw InvalidArgument("adapter: layer " + std::to_string(la.layer) +
                            " out of range");
    }
    if (la.mu.size() != net.HiddenDim(la.layer)) {
      throw InvalidArgument("adapter: layer " + std::to_string(la.layer) +
                            " size mismatch");
    }
    if (mode == AdapterMode::kBayesian) {
      if (la.log_sigma.size() != la.mu.size()) {
        throw InvalidArgument("adapter: log_sigma size mismatch at layer " +
                              std::to_string(la.layer));
      }
    } else if (la.log_sigma.size() != 0) {
      throw InvalidArgument("adapter: deterministic layer carries log_sigma");
    }
  }
}

std::vector<int> SpeakerAdapter::HookedLayers() const {
  std::vector<int> out;
  out.reserve(layers.size());
  for (const LayerAdapter& la : layers) out.push_back(la.layer);
  return out;
}

LhucStack SpeakerAdapter::PredictionStack(int num_layers) const {
  LhucStack stack;
  stack.r.resize(num_layers);
  for (const LayerAdapter& la : layers) {
    LFA_CHECK(la.layer >= 0 && la.layer < num_layers);
    stack.r[la.layer] = la.mu;
  }
  return stack;
}

LhucStack SpeakerAdapter::SampleStack(int num_layers, Rng& rng, bool zero_sigma,
                                      std::vector<Eigen::VectorXd>* eps_out)
    const {
  if (mode != AdapterMode::kBayesian) {
    throw InvalidArgument("SampleStack: adapter is not Bayesian");
  }
  LhucStack stack;
  stack.r.resize(num_layers);
  if (eps_out != nullptr) eps_out->clear();
  for (const LayerAdapter& la : layers) {
    LFA_CHECK(la.layer >= 0 && la.layer < num_layers);
    LFA_CHECK(la.log_sigma.size() == la.mu.size());
    Eigen::VectorXd eps(la.mu.size());
    for (Eigen::Index d = 0; d < eps.size(); ++d) eps[d] = rng.Normal();
    if (zero_sigma) {
      stack.r[la.layer] = la.mu;
    } else {
      stack.r[la.layer] =
          la.mu + (la.log_sigma.array().exp() * eps.array()).matrix();
    }
    if (eps_out != nullptr) eps_out->push_back(std::move(eps));
  }
  return stack;
}

void SpeakerAdapter::Save(const std::string& path) const {
  std::ostringstream os;
  WriteU32(os, kAdapterVersion);
  WriteString(os, speaker);
  WriteU32(os, mode == AdapterMode::kBayesian ? 1 : 0);
  WriteU32(os, static_cast<uint32_t>(layers.size()));
  for (const LayerAdapter& la : layers) {
    WriteU32(os, static_cast<uint32_t>(la.layer));
    WriteVector(os, la.mu);
    WriteU32(os, la.log_sigma.size() > 0 ? 1 : 0);
    if (la.log_sigma.size() > 0) WriteVector(os, la.log_sigma);
  }
  SaveWithChecksum(path, kAdapterMagic, os.str());
}

SpeakerAdapter SpeakerAdapter::Load(const std::string& path) {
  std::istringstream is(LoadChecked(path, kAdapterMagic));
  const uint32_t version = ReadU32(is);
  if (version != kAdapterVersion) {
    throw CorruptArchive(path + ": unsupported adapter version " +
                         std::to_string(version));
  }
  SpeakerAdapter adapter;
  adapter.speaker = ReadString(is);
  adapter.mode =
      ReadU32(is) == 1 ? AdapterMode::kBayesian : AdapterMode::kDeterministic;
  const uint32_t num_layers = ReadU32(is);
  int prev = -1;
  for (uint32_t i = 0; i < num_layers; ++i) {
    LayerAdapter la;
    la.layer = static_cast<int>(ReadU32(is));
    if (la.layer <= prev) throw CorruptArchive(path + ": layers out of order");
    prev = la.layer;
    la.mu = ReadVector(is);
    if (ReadU32(is) == 1) {
      la.log_sigma = ReadVector(is);
      if (la.log_sigma.size() != la.mu.size()) {
        throw CorruptArchive(path + ": log_sigma size mismatch");
      }
    }
    const bool wants_sigma = adapter.mode == AdapterMode::kBayesian;
    if (wants_sigma != (la.log_sigma.size() > 0)) {
      throw CorruptArchive(path + ": mode and stored vectors disagree");
    }
    adapter.layers.push_back(std::move(la));
  }
  return adapter;
}

void SpeakerAdapter::TextDump(std::ostream& os) const {
  os << std::setprecision(17);
  os << "speaker " << speaker << '\n';
  os << "mode " << AdapterModeName(mode) << '\n';
  os << "layers " << layers.size() << '\n';
  for (const LayerAdapter& la : layers) {
    os << "layer " << la.layer << " mu";
    for (Eigen::Index d = 0; d < la.mu.size(); ++d) os << ' ' << la.mu[d];
    os << '\n';
    if (la.log_sigma.size() > 0) {
      os << "layer " << la.layer << " log_sigma";
      for (Eigen::Index d = 0; d < la.log_sigma.size(); ++d) {
        os << ' ' << la.log_sigma[d];
      }
      os << '\n';
    }
  }
}

}  // namespace lfa
