// tests/testutil.h
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
// Independent reference implementations used as oracles: exhaustive
// path enumeration over small graphs, random connected graph
// generation, and central finite differences.

#ifndef LFADAPT_TESTS_TESTUTIL_H_
#define LFADAPT_TESTS_TESTUTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "lfa/base/common.h"
#include "lfa/base/rng.h"
#include "lfa/graphs/weighted-graph.h"

namespace lfa {
namespace test {

struct EnumeratedPath {
  std::vector<int32_t> pdfs;     // length T
  std::vector<int32_t> states;   // length T+1
  std::vector<int32_t> olabels;  // non-epsilon output labels in order
  double graph_score = 0.0;      // arc weights + final weight, no acoustics
  double total_score = 0.0;      // graph_score + acoustic scores
};

// Every complete length-T path by brute-force depth-first search.
// With `scores` null the acoustic part is zero.
inline std::vector<EnumeratedPath> EnumeratePaths(
    const WeightedGraph& g, int frames, const Eigen::MatrixXd* scores,
    std::size_t max_paths = 5000000) {
  std::vector<EnumeratedPath> out;
  EnumeratedPath cur;
  cur.states.push_back(g.Start());
  std::function<void(int, int)> dfs = [&](int t, int state) {
    if (t == frames) {
      if (!g.IsFinal(state)) return;
      EnumeratedPath done = cur;
      done.graph_score += g.FinalWeight(state);
      done.total_score += g.FinalWeight(state);
      out.push_back(std::move(done));
      if (out.size() > max_paths) throw Error("enumeration blew up");
      return;
    }
    auto [lo, hi] = g.ArcRange(state);
    for (int ai = lo; ai < hi; ++ai) {
      const Arc& a = g.arcs()[ai];
      cur.pdfs.push_back(a.pdf);
      cur.states.push_back(a.dst);
      if (a.olabel != kNoLabel) cur.olabels.push_back(a.olabel);
      const double ac = scores ? (*scores)(t, a.pdf) : 0.0;
      cur.graph_score += a.weight;
      cur.total_score += a.weight + ac;
      dfs(t + 1, a.dst);
      cur.graph_score -= a.weight;
      cur.total_score -= a.weight + ac;
      if (a.olabel != kNoLabel) cur.olabels.pop_back();
      cur.states.pop_back();
      cur.pdfs.pop_back();
    }
  };
  dfs(0, g.Start());
  return out;
}

inline double LogSumPathScores(const std::vector<EnumeratedPath>& paths) {
  double acc = kLogZero;
  for (const auto& p : paths) acc = LogAdd(acc, p.total_score);
  return acc;
}

// Posterior pdf occupancy by direct summation over enumerated paths.
inline Eigen::MatrixXd EnumeratedOccupancies(
    const std::vector<EnumeratedPath>& paths, int frames, int num_pdfs) {
  const double total = LogSumPathScores(paths);
  Eigen::MatrixXd occ = Eigen::MatrixXd::Zero(frames, num_pdfs);
  for (const auto& p : paths) {
    const double w = std::exp(p.total_score - total);
    for (int t = 0; t < frames; ++t) occ(t, p.pdfs[t]) += w;
  }
  return occ;
}

// Random connected acceptor with at least one complete path of length
// `frames`. Built as random layers plus random skip arcs, then
// trimmed; retries until the length constraint holds.
inline WeightedGraph RandomGraph(Rng& rng, int num_pdfs, int frames,
                                 int max_states = 12, double olabel_prob = 0.3,
                                 int num_olabels = 4) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int n = static_cast<int>(rng.UniformInt(2, max_states));
    GraphBuilder b(num_pdfs);
    for (int i = 0; i < n; ++i) b.AddState();
    b.SetStart(0);
    const int num_arcs = static_cast<int>(rng.UniformInt(n, 4 * n));
    for (int i = 0; i < num_arcs; ++i) {
      const int src = static_cast<int>(rng.UniformInt(0, n - 1));
      const int dst = static_cast<int>(rng.UniformInt(0, n - 1));
      const int pdf = static_cast<int>(rng.UniformInt(0, num_pdfs - 1));
      const int32_t olabel =
          rng.Uniform() < olabel_prob
              ? static_cast<int32_t>(rng.UniformInt(0, num_olabels - 1))
              : kNoLabel;
      b.AddArc(src, dst, pdf, olabel, rng.Uniform(-2.0, 0.0));
    }
    const int num_finals = static_cast<int>(rng.UniformInt(1, 2));
    for (int i = 0; i < num_finals; ++i)
      b.SetFinal(static_cast<int>(rng.UniformInt(0, n - 1)),
                 rng.Uniform(-1.0, 0.0));
    WeightedGraph g;
    try {
      g = b.Seal(/*trim_dead=*/true);
    } catch (const Error&) {
      continue;  // start unreachable from a final; try again
    }
    // Reject graphs with no complete path of the requested length.
    bool feasible = false;
    {
      std::vector<char> cur(g.NumStates(), 0), next(g.NumStates(), 0);
      cur[g.Start()] = 1;
      for (int t = 0; t < frames; ++t) {
        std::fill(next.begin(), next.end(), 0);
        for (const Arc& a : g.arcs())
          if (cur[a.src]) next[a.dst] = 1;
        cur.swap(next);
      }
      for (int s = 0; s < g.NumStates(); ++s)
        if (cur[s] && g.IsFinal(s)) feasible = true;
    }
    if (feasible) return g;
  }
  throw Error("could not draw a feasible random graph");
}

inline Eigen::MatrixXd RandomScores(Rng& rng, int frames, int num_pdfs,
                                    double lo = -3.0, double hi = 1.0) {
  Eigen::MatrixXd m(frames, num_pdfs);
  for (int t = 0; t < frames; ++t)
    for (int p = 0; p < num_pdfs; ++p) m(t, p) = rng.Uniform(lo, hi);
  return m;
}

// Central difference d f / d x evaluated by mutating *x in place.
inline double CentralDiff(const std::function<double()>& f, double* x,
                          double eps = 1e-5) {
  const double saved = *x;
  *x = saved + eps;
  const double up = f();
  *x = saved - eps;
  const double down = f();
  *x = saved;
  return (up - down) / (2.0 * eps);
}

inline double RelErr(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Mixed tolerance for analytic-vs-numeric gradient checks; the
// absolute slack covers central-difference roundoff on components
// near zero.
inline bool FdClose(double analytic, double fd, double rel = 1e-4,
                    double abs = 1e-6) {
  return std::abs(analytic - fd) <=
         abs + rel * std::max(std::abs(analytic), std::abs(fd));
}

}  // namespace test
}  // namespace lfa

#endif  // LFADAPT_TESTS_TESTUTIL_H_
