// tests/net_test.cc
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lfa/net/acoustic-net.h"
#include "lfa/net/lhuc.h"
#include "testutil.h"

using namespace lfa;

namespace {

NetDims SmallDims() {
  NetDims d;
  d.input_dim = 5;
  d.hidden_dims = {6, 4};
  d.num_pdfs = 3;
  return d;
}

LhucStack RandomAdapter(const AcousticNet& net, Rng& rng) {
  LhucStack stack;
  stack.r.resize(net.NumHiddenLayers());
  for (int l = 0; l < net.NumHiddenLayers(); ++l) {
    Eigen::VectorXd r(net.HiddenDim(l));
    for (int i = 0; i < r.size(); ++i) r(i) = rng.Uniform(-1.0, 1.0);
    stack.r[l] = r;
  }
  return stack;
}

}  // namespace

TEST_CASE("scaling function hits its anchor values") {
  CHECK(LhucScale(0.0) == 1.0);
  // 2 * logistic(-6) ~= 0.004945; near-zero amplitude.
  CHECK(std::abs(LhucScale(-6.0) - 0.004945) < 1e-6);
  CHECK(std::abs(LhucScale(6.0) - (2.0 - 0.004945)) < 1e-6);
  CHECK(LhucScale(40.0) <= 2.0);
  // Derivative by central difference.
  for (double r : {-2.0, -0.3, 0.0, 0.7, 3.1}) {
    double x = r;
    const double fd = test::CentralDiff([&] { return LhucScale(x); }, &x);
    CHECK(test::RelErr(LhucScaleDeriv(r), fd) < 1e-8);
  }
}

TEST_CASE("random init respects the fan-based bound") {
  Rng rng(5);
  const AcousticNet net = AcousticNet::RandomInit(SmallDims(), rng);
  CHECK(net.InputDim() == 5);
  CHECK(net.NumPdfs() == 3);
  CHECK(net.NumHiddenLayers() == 2);
  CHECK(net.HiddenDim(0) == 6);
  CHECK(net.HiddenDim(1) == 4);
  const double a0 = std::sqrt(6.0 / (5 + 6));
  CHECK(net.HiddenLayer(0).w.cwiseAbs().maxCoeff() <= a0);
  CHECK(net.HiddenLayer(0).b.cwiseAbs().maxCoeff() == 0.0);
  // Same seed, same parameters.
  Rng rng2(5);
  const AcousticNet net2 = AcousticNet::RandomInit(SmallDims(), rng2);
  CHECK(net.Checksum() == net2.Checksum());
}

TEST_CASE("an all-zero adapter is bit-identical to no adapter") {
  Rng rng(6);
  const AcousticNet net = AcousticNet::RandomInit(SmallDims(), rng);
  const Eigen::MatrixXd feats = test::RandomScores(rng, 7, 5, -1.0, 1.0);
  LhucStack zero;
  zero.r.resize(2);
  zero.r[0] = Eigen::VectorXd::Zero(6);
  zero.r[1] = Eigen::VectorXd::Zero(4);
  const HeadScores plain = net.Forward(feats, nullptr, nullptr);
  const HeadScores scaled = net.Forward(feats, &zero, nullptr);
  CHECK(plain.lfmmi == scaled.lfmmi);
  CHECK(plain.ce == scaled.ce);
}

TEST_CASE("backward matches finite differences everywhere") {
  Rng rng(7);
  AcousticNet net = AcousticNet::RandomInit(SmallDims(), rng);
  const int T = 4;
  const Eigen::MatrixXd feats = test::RandomScores(rng, T, 5, -1.0, 1.0);
  LhucStack adapter = RandomAdapter(net, rng);
  // Fixed random linear functional of the two heads.
  const Eigen::MatrixXd A = test::RandomScores(rng, T, 3, -1.0, 1.0);
  const Eigen::MatrixXd B = test::RandomScores(rng, T, 3, -1.0, 1.0);
  const auto loss = [&] {
    const HeadScores hs = net.Forward(feats, &adapter, nullptr);
    return (A.array() * hs.lfmmi.array()).sum() +
           (B.array() * hs.ce.array()).sum();
  };

  GradientTape tape;
  net.Forward(feats, &adapter, &tape);
  BackwardRequest req;
  req.net = true;
  req.adapter = true;
  const NetGradients grads = net.Backward(tape, A, B, req);

  double worst = 0.0;
  for (int l = 0; l < net.NumHiddenLayers(); ++l) {
    AffineLayer& layer = net.MutableHiddenLayer(l);
    for (int r = 0; r < layer.w.rows(); ++r)
      for (int c = 0; c < layer.w.cols(); ++c) {
        const double fd = test::CentralDiff(loss, &layer.w(r, c));
        worst = std::max(worst, test::RelErr(grads.hidden[l].w(r, c), fd));
      }
    for (int i = 0; i < layer.b.size(); ++i) {
      const double fd = test::CentralDiff(loss, &layer.b(i));
      worst = std::max(worst, test::RelErr(grads.hidden[l].b(i), fd));
    }
  }
  for (int l = 0; l < net.NumHiddenLayers(); ++l) {
    Eigen::VectorXd& r = *adapter.r[l];
    for (int i = 0; i < r.size(); ++i) {
      const double fd = test::CentralDiff(loss, &r(i));
      worst = std::max(worst, test::RelErr((*grads.lhuc_r[l])(i), fd));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("head gradients do not leak into each other") {
  Rng rng(8);
  const AcousticNet net = AcousticNet::RandomInit(SmallDims(), rng);
  const Eigen::MatrixXd feats = test::RandomScores(rng, 5, 5, -1.0, 1.0);
  const Eigen::MatrixXd G = test::RandomScores(rng, 5, 3, -1.0, 1.0);
  const Eigen::MatrixXd H = test::RandomScores(rng, 5, 3, -1.0, 1.0);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 3);

  GradientTape t1, t2;
  net.Forward(feats, nullptr, &t1);
  net.Forward(feats, nullptr, &t2);
  const NetGradients g1 = net.Backward(t1, G, zero, {});
  const NetGradients g2 = net.Backward(t2, G, H, {});
  CHECK(g1.lfmmi_head.w == g2.lfmmi_head.w);
  CHECK(g1.lfmmi_head.b == g2.lfmmi_head.b);
  CHECK(g1.ce_head.w.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a tape refuses to be consumed twice") {
  Rng rng(9);
  const AcousticNet net = AcousticNet::RandomInit(SmallDims(), rng);
  const Eigen::MatrixXd feats = test::RandomScores(rng, 3, 5, -1.0, 1.0);
  const Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3, 3);
  GradientTape tape;
  net.Forward(feats, nullptr, &tape);
  net.Backward(tape, G, G, {});
  CHECK_THROWS_AS(net.Backward(tape, G, G, {}), Error);
}

TEST_CASE("forward validates its inputs") {
  Rng rng(10);
  const AcousticNet net = AcousticNet::RandomInit(SmallDims(), rng);
  CHECK_THROWS_AS(net.Forward(Eigen::MatrixXd::Zero(3, 4), nullptr, nullptr),
                  InvalidArgument);
  CHECK_THROWS_AS(net.Forward(Eigen::MatrixXd::Zero(0, 5), nullptr, nullptr),
                  InvalidArgument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 5);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(net.Forward(bad, nullptr, nullptr), InvalidArgument);
  LhucStack wrong;
  wrong.r.resize(1);
  wrong.r[0] = Eigen::VectorXd::Zero(5);  // layer 0 is 6 wide
  CHECK_THROWS_AS(net.Forward(Eigen::MatrixXd::Zero(3, 5), &wrong, nullptr),
                  InvalidArgument);
}

TEST_CASE("checkpoints round trip exactly") {
  Rng rng(11);
  const AcousticNet net = AcousticNet::RandomInit(SmallDims(), rng);
  const std::string path =
      (std::filesystem::temp_directory_path() / "lfa_net_test.lfn").string();
  net.Save(path);
  {
    std::ifstream is(path, std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    CHECK(std::string(magic, 4) == "LFN1");
  }
  const AcousticNet back = AcousticNet::Load(path);
  CHECK(back.Checksum() == net.Checksum());
  const Eigen::MatrixXd feats = test::RandomScores(rng, 4, 5, -1.0, 1.0);
  const HeadScores a = net.Forward(feats, nullptr, nullptr);
  const HeadScores b = back.Forward(feats, nullptr, nullptr);
  CHECK(a.lfmmi == b.lfmmi);
  CHECK(a.ce == b.ce);

  // Flip a payload byte.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(64);
    char c;
    f.get(c);
    f.seekp(64);
    f.put(static_cast<char>(c ^ 0x10));
  }
  CHECK_THROWS_AS(AcousticNet::Load(path), CorruptArchive);
  std::filesystem::remove(path);
}

TEST_CASE("sgd on a convex toy decreases the loss every step") {
  Rng rng(12);
  AcousticNet net = AcousticNet::RandomInit(SmallDims(), rng);
  const Eigen::MatrixXd feats = test::RandomScores(rng, 6, 5, -1.0, 1.0);
  const Eigen::MatrixXd target = test::RandomScores(rng, 6, 3, -1.0, 1.0);
  const auto loss_of = [&](const HeadScores& hs) {
    return 0.5 * (hs.lfmmi - target).squaredNorm();
  };
  double prev = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 10; ++step) {
    GradientTape tape;
    const HeadScores hs = net.Forward(feats, nullptr, &tape);
    const double cur = loss_of(hs);
    CHECK(cur < prev);
    prev = cur;
    const Eigen::MatrixXd g = hs.lfmmi - target;
    const NetGradients grads =
        net.Backward(tape, g, Eigen::MatrixXd::Zero(6, 3), {});
    ApplySgd(net, grads, 0.01);
  }
}

TEST_CASE("sgd rejects non-finite gradients") {
  Rng rng(13);
  AcousticNet net = AcousticNet::RandomInit(SmallDims(), rng);
  const Eigen::MatrixXd feats = test::RandomScores(rng, 2, 5, -1.0, 1.0);
  GradientTape tape;
  net.Forward(feats, nullptr, &tape);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 3);
  g(0, 0) = std::numeric_limits<double>::infinity();
  NetGradients grads = net.Backward(tape, g, Eigen::MatrixXd::Zero(2, 3), {});
  CHECK_THROWS_WITH_AS(ApplySgd(net, grads, 0.1),
                       doctest::Contains("non-finite gradient"), Error);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd gv = Eigen::VectorXd::Zero(3);
  gv(1) = std::nan("");
  CHECK_THROWS_AS(ApplySgdVec(v, gv, 0.1, "r"), Error);
}
