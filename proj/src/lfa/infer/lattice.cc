// lfa/infer/lattice.cc
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

#include "lfa/infer/lattice.h"

#include <cmath>
#include <ostream>
#include <string>

namespace lfa {

void Lattice::TextDump(std::ostream& os) const {
  os << "# frames " << num_frames << " nodes " << node_frame.size()
     << " arcs " << arcs.size() << " paths " << finals.size() << "\n";
  os << "# best " << best_score << " beam " << beam << "\n";
  os.precision(17);
  for (const LatticeArc& a : arcs)
    os << a.src << " " << a.dst << " " << node_frame[a.src] << " " << a.pdf
       << " " << a.olabel << " " << a.graph_score << " " << a.ac_score
       << "\n";
  for (const LatticeFinal& f : finals)
    os << "# final " << f.node << " " << f.final_weight << " "
       << f.total_score << "\n";
}

namespace {

// Depth-first enumeration of all complete paths whose total score is
// within the beam; the exact max-plus completion bound makes the
// pruning decision final at every arc.
class LatticeEnumerator {
 public:
  LatticeEnumerator(const WeightedGraph& graph, const FrameScores& scores,
                    double threshold, const LatticeLimits& limits,
                    const Eigen::MatrixXd& betamax, Lattice* out)
      : graph_(graph),
        scores_(scores),
        threshold_(threshold),
        limits_(limits),
        betamax_(betamax),
        out_(out) {}

  void Run() {
    out_->root = NewNode(0);
    Descend(0, graph_.Start(), out_->root, 0.0);
  }

 private:
  int32_t NewNode(int frame) {
    out_->node_frame.push_back(frame);
    return static_cast<int32_t>(out_->node_frame.size()) - 1;
  }

  void Descend(int t, int state, int32_t node, double partial) {
    if (t == out_->num_frames) {
      const double fw = graph_.FinalWeight(state);
      if (fw == kLogZero || partial + fw < threshold_) return;
      out_->finals.push_back(LatticeFinal{node, fw, partial + fw});
      if (out_->finals.size() > limits_.max_paths)
        throw LatticeTooLarge("beam admits more than " +
                              std::to_string(limits_.max_paths) + " paths");
      return;
    }
    auto [lo, hi] = graph_.ArcRange(state);
    for (int ai = lo; ai < hi; ++ai) {
      const Arc& a = graph_.arcs()[ai];
      const double bound = betamax_(t + 1, a.dst);
      if (bound == kLogZero) continue;
      const double sc = a.weight + scores_(t, a.pdf);
      if (partial + sc + bound < threshold_) continue;
      const int32_t child = NewNode(t + 1);
      out_->arcs.push_back(LatticeArc{node, child, a.pdf, a.olabel, a.weight,
                                      scores_(t, a.pdf)});
      if (out_->arcs.size() > limits_.max_arcs)
        throw LatticeTooLarge("beam admits more than " +
                              std::to_string(limits_.max_arcs) + " arcs");
      Descend(t + 1, a.dst, child, partial + sc);
    }
  }

  const WeightedGraph& graph_;
  const FrameScores& scores_;
  const double threshold_;
  const LatticeLimits& limits_;
  const Eigen::MatrixXd& betamax_;
  Lattice* out_;
};

}  // namespace

Lattice GenerateLattice(const WeightedGraph& graph, const FrameScores& scores,
                        double beam, const LatticeLimits& limits) {
  ValidateFrameScores(graph, scores);
  if (std::isnan(beam) || beam <= 0.0)
    throw InvalidArgument("lattice beam must be > 0");
  const int T = static_cast<int>(scores.rows());
  const int S = graph.NumStates();

  // Exact best completion score from every (frame, state).
  Eigen::MatrixXd betamax(T + 1, S);
  betamax.setConstant(kLogZero);
  for (int s : graph.FinalStates()) betamax(T, s) = graph.FinalWeight(s);
  for (int t = T - 1; t >= 0; --t) {
    for (const Arc& a : graph.arcs()) {
      const double v = betamax(t + 1, a.dst);
      if (v == kLogZero) continue;
      const double cand = a.weight + scores(t, a.pdf) + v;
      if (cand > betamax(t, a.src)) betamax(t, a.src) = cand;
    }
  }
  const double best = betamax(0, graph.Start());
  if (best == kLogZero)
    throw InfeasibleSupervision("no complete path of length " +
                                std::to_string(T));

  Lattice lat;
  lat.num_frames = T;
  lat.num_pdfs = graph.NumPdfs();
  lat.best_score = best;
  lat.beam = beam;
  // An infinite beam gives a -inf threshold and keeps every path.
  const double threshold = best - beam;
  LatticeEnumerator(graph, scores, threshold, limits, betamax, &lat).Run();
  LFA_CHECK(!lat.finals.empty());
  return lat;
}

Eigen::MatrixXd LatticeFramePosteriors(const Lattice& lattice) {
  const auto num_nodes = lattice.node_frame.size();
  std::vector<double> alpha(num_nodes, kLogZero);
  std::vector<double> beta(num_nodes, kLogZero);
  alpha[lattice.root] = 0.0;
  // Arcs are in preorder, so a source is always finished first.
  for (const LatticeArc& a : lattice.arcs)
    alpha[a.dst] = alpha[a.src] + a.graph_score + a.ac_score;
  for (const LatticeFinal& f : lattice.finals)
    beta[f.node] = LogAdd(beta[f.node], f.final_weight);
  for (auto it = lattice.arcs.rbegin(); it != lattice.arcs.rend(); ++it)
    beta[it->src] = LogAdd(beta[it->src],
                           it->graph_score + it->ac_score + beta[it->dst]);
  const double total = beta[lattice.root];
  LFA_CHECK(total != kLogZero);

  Eigen::MatrixXd post =
      Eigen::MatrixXd::Zero(lattice.num_frames, lattice.num_pdfs);
  for (const LatticeArc& a : lattice.arcs) {
    if (beta[a.dst] == kLogZero) continue;
    const int t = lattice.node_frame[a.src];
    post(t, a.pdf) +=
        std::exp(alpha[a.src] + a.graph_score + a.ac_score + beta[a.dst] -
                 total);
  }
  return post;
}

}  // namespace lfa
