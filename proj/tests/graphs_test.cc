// tests/graphs_test.cc
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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lfa/graphs/graph-build.h"
#include "lfa/graphs/hmm-topology.h"
#include "lfa/graphs/token-inventory.h"
#include "lfa/graphs/token-ngram.h"
#include "lfa/graphs/weighted-graph.h"
#include "testutil.h"

using namespace lfa;

namespace {

TokenInventory ThreeTokens(ContextMode mode = ContextMode::kMono) {
  return TokenInventory({"sil", "a", "b"}, "sil", mode);
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("topology is uniform and validates") {
  const HmmTopology topo = BuildHmmTopology(2);
  CHECK(topo.states_per_unit == 2);
  CHECK(topo.SelfLoopProb(0) == 0.5);
  CHECK(topo.ForwardProb(0) == 0.5);
  CHECK(topo.SelfLoopProb(1) == 0.5);
  CHECK(topo.ExitProb() == 0.5);
  topo.Validate();
  CHECK_THROWS_AS(BuildHmmTopology(0), InvalidArgument);

  HmmTopology broken = topo;
  broken.self_loop_prob[1] = 0.7;
  CHECK_THROWS_AS(broken.Validate(), InvalidArgument);
}

TEST_CASE("inventory validates and lays out pdf ids") {
  CHECK_THROWS_AS(TokenInventory({"a", "a", "sil"}, "sil", ContextMode::kMono),
                  InvalidArgument);
  CHECK_THROWS_AS(TokenInventory({"a", "b"}, "sil", ContextMode::kMono),
                  InvalidArgument);
  CHECK_THROWS_AS(TokenInventory({"sil"}, "sil", ContextMode::kMono),
                  InvalidArgument);

  const TokenInventory mono = ThreeTokens();
  CHECK(mono.NumTokens() == 3);
  CHECK(mono.SilenceId() == 0);
  CHECK(mono.FindToken("b") == 2);
  CHECK(mono.FindToken("zz") == -1);
  CHECK(mono.NumPdfs(2) == 6);
  std::set<int32_t> seen;
  for (int32_t w = 0; w < 3; ++w)
    for (int k = 0; k < 2; ++k) seen.insert(mono.PdfId(0, w, k, 2));
  CHECK(seen.size() == 6);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 5);

  const TokenInventory bi = ThreeTokens(ContextMode::kLeftBicontext);
  CHECK(bi.NumPdfs(2) == 18);
  std::set<int32_t> bi_seen;
  for (int32_t c = 0; c < 3; ++c)
    for (int32_t w = 0; w < 3; ++w)
      for (int k = 0; k < 2; ++k) bi_seen.insert(bi.PdfId(c, w, k, 2));
  CHECK(bi_seen.size() == 18);
  CHECK(*bi_seen.rbegin() == 17);
}

TEST_CASE("inventory round trips through text") {
  const TokenInventory inv = ThreeTokens(ContextMode::kLeftBicontext);
  std::stringstream ss;
  inv.Save(ss);
  const TokenInventory back = TokenInventory::Load(ss);
  CHECK(back.NumTokens() == 3);
  CHECK(back.SilenceId() == inv.SilenceId());
  CHECK(back.context_mode() == ContextMode::kLeftBicontext);
  CHECK(back.TokenText(2) == "b");
}

TEST_CASE("unigram estimate matches count ratio when undiscounted") {
  // Sequence [a, a, b] over {sil, a, b}.
  const TokenNgramLm lm = EstimateTokenNgram({{1, 1, 2}}, 1, 3, 0.0);
  CHECK(lm.NumStates() == 1);
  CHECK(std::abs(std::exp(lm.LogProb(lm.Start(), 1)) - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(std::exp(lm.LogProb(lm.Start(), 2)) - 1.0 / 3.0) < 1e-12);
  CHECK(std::exp(lm.LogProb(lm.Start(), 0)) == 0.0);
}

TEST_CASE("bigram probabilities match hand-applied discounting") {
  // Corpus { [a, b, a] } over {sil, a, b}, order 2, discount 0.5.
  // Unigrams: c(a)=2, c(b)=1, so with one third of the mass uniform:
  //   P(a) = 1.5/3 + (0.5*2/3)/3 = 11/18
  //   P(b) = 0.5/3 + 1/9        = 5/18
  //   P(sil) = 1/9              = 2/18
  // Bigrams, each context seen once with one continuation:
  //   P(b|a)  = 0.5 + 0.5*P(b) = 23/36
  //   P(a|b)  = 0.5 + 0.5*P(a) = 29/36
  //   P(sil|a)= 0.5*P(sil)     = 1/18
  const TokenNgramLm lm = EstimateTokenNgram({{1, 2, 1}}, 2, 3, 0.5);
  lm.CheckNormalized();
  const int s0 = lm.Start();
  CHECK(std::abs(std::exp(lm.LogProb(s0, 1)) - 11.0 / 18.0) < 1e-12);
  const int sa = lm.NextState(s0, 1);
  CHECK(lm.StateHistory(sa) == std::vector<int32_t>{1});
  CHECK(std::abs(std::exp(lm.LogProb(sa, 2)) - 23.0 / 36.0) < 1e-12);
  CHECK(std::abs(std::exp(lm.LogProb(sa, 0)) - 1.0 / 18.0) < 1e-12);
  const int sb = lm.NextState(sa, 2);
  CHECK(lm.StateHistory(sb) == std::vector<int32_t>{2});
  CHECK(std::abs(std::exp(lm.LogProb(sb, 1)) - 29.0 / 36.0) < 1e-12);
  // Unseen continuation keeps the walk at the longest observed suffix.
  CHECK(lm.NextState(sb, 0) == s0);  // [sil] never observed as context
}

TEST_CASE("ngram states are exactly normalized for random corpora") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int v = static_cast<int>(rng.UniformInt(2, 6));
    const int order = static_cast<int>(rng.UniformInt(1, 4));
    std::vector<std::vector<int32_t>> corpus;
    const int n_seqs = static_cast<int>(rng.UniformInt(1, 8));
    for (int i = 0; i < n_seqs; ++i) {
      std::vector<int32_t> seq;
      const int len = static_cast<int>(rng.UniformInt(1, 12));
      for (int j = 0; j < len; ++j)
        seq.push_back(static_cast<int32_t>(rng.UniformInt(0, v - 1)));
      corpus.push_back(seq);
    }
    const TokenNgramLm lm = EstimateTokenNgram(corpus, order, v, 0.5);
    lm.CheckNormalized(1e-9);
    // Positive probability everywhere once discounted.
    for (int s = 0; s < lm.NumStates(); ++s)
      for (int32_t w = 0; w < v; ++w)
        CHECK(std::isfinite(lm.LogProb(s, w)));
  }
}

TEST_CASE("ngram estimation rejects bad input") {
  CHECK_THROWS_AS(EstimateTokenNgram({}, 2, 3), InvalidArgument);
  CHECK_THROWS_AS(EstimateTokenNgram({{0, 1}}, 0, 3), InvalidArgument);
  CHECK_THROWS_AS(EstimateTokenNgram({{0, 5}}, 2, 3), InvalidArgument);
  CHECK_THROWS_AS(EstimateTokenNgram({{0, 1}}, 2, 3, 1.5), InvalidArgument);
}

TEST_CASE("ngram round trips through text") {
  const TokenNgramLm lm = EstimateTokenNgram({{1, 2, 1}, {2, 2, 0}}, 3, 3);
  std::stringstream ss;
  lm.Save(ss);
  const TokenNgramLm back = TokenNgramLm::Load(ss);
  CHECK(back.Order() == 3);
  CHECK(back.NumStates() == lm.NumStates());
  for (int s = 0; s < lm.NumStates(); ++s)
    for (int32_t w = 0; w < 3; ++w) {
      CHECK(back.LogProb(s, w) == lm.LogProb(s, w));
      CHECK(back.NextState(s, w) == lm.NextState(s, w));
    }
}

TEST_CASE("numerator for one token admits exactly the monotone alignments") {
  const TokenInventory inv = ThreeTokens();
  const HmmTopology topo = BuildHmmTopology(2);
  // Three frames leave no room for boundary silence, so the graph
  // accepts exactly s1 s1 s2 and s1 s2 s2.
  const WeightedGraph g = BuildNumeratorGraph({1}, topo, inv, 3);
  const auto paths = test::EnumeratePaths(g, 3, nullptr);
  REQUIRE(paths.size() == 2);
  const int32_t a0 = inv.PdfId(0, 1, 0, 2);
  const int32_t a1 = inv.PdfId(0, 1, 1, 2);
  std::set<std::vector<int32_t>> want = {{a0, a0, a1}, {a0, a1, a1}};
  std::set<std::vector<int32_t>> got = {paths[0].pdfs, paths[1].pdfs};
  CHECK(got == want);
}

TEST_CASE("numerator path count matches enumeration at the minimum length") {
  const TokenInventory inv = ThreeTokens();
  const HmmTopology topo = BuildHmmTopology(2);
  const WeightedGraph g = BuildNumeratorGraph({1, 2}, topo, inv, 4);
  CHECK(test::EnumeratePaths(g, 4, nullptr).size() == 1);
}

TEST_CASE("three-state unit over four frames has three alignments") {
  const TokenInventory inv = ThreeTokens();
  const HmmTopology topo = BuildHmmTopology(3);
  const WeightedGraph g = BuildNumeratorGraph({1}, topo, inv, 4);
  // Compositions of 4 frames into 3 positive runs: C(3,2) = 3.
  CHECK(test::EnumeratePaths(g, 4, nullptr).size() == 3);
}

TEST_CASE("numerator with room for silence includes boundary variants") {
  const TokenInventory inv = ThreeTokens();
  const HmmTopology topo = BuildHmmTopology(2);
  const WeightedGraph g = BuildNumeratorGraph({1}, topo, inv, 6);
  const auto paths = test::EnumeratePaths(g, 6, nullptr);
  // Variants: a alone, sil+a, a+sil (sil+a+sil needs 6 states = all 6
  // frames, also feasible).
  std::set<std::vector<int32_t>> label_seqs;
  const int32_t s0 = inv.PdfId(0, 0, 0, 2);
  bool saw_lead_sil = false, saw_plain = false;
  for (const auto& p : paths) {
    if (p.pdfs[0] == s0) saw_lead_sil = true;
    if (p.pdfs[0] == inv.PdfId(0, 1, 0, 2)) saw_plain = true;
  }
  CHECK(saw_lead_sil);
  CHECK(saw_plain);
  // A silence already in the labels is not doubled.
  const WeightedGraph g2 = BuildNumeratorGraph({0, 1}, topo, inv, 8);
  for (const auto& p : test::EnumeratePaths(g2, 8, nullptr)) {
    int lead_sil_units = 0;
    int32_t prev = -1;
    for (int32_t pdf : p.pdfs) {
      if (pdf == s0 && prev != s0) ++lead_sil_units;
      if (pdf != s0 && pdf != inv.PdfId(0, 0, 1, 2)) break;
      prev = pdf;
    }
    CHECK(lead_sil_units <= 1);
  }
}

TEST_CASE("numerator rejects infeasible and invalid requests") {
  const TokenInventory inv = ThreeTokens();
  const HmmTopology topo = BuildHmmTopology(2);
  CHECK_THROWS_AS(BuildNumeratorGraph({1, 2}, topo, inv, 3),
                  InfeasibleSupervision);
  CHECK_THROWS_AS(BuildNumeratorGraph({}, topo, inv, 3), InvalidArgument);
  CHECK_THROWS_AS(BuildNumeratorGraph({7}, topo, inv, 3), InvalidArgument);
  CHECK(MinSupervisionFrames({1, 2, 0}, topo) == 6);
}

TEST_CASE("numerator weights are the lm score plus transitions") {
  const TokenInventory inv = ThreeTokens();
  const HmmTopology topo = BuildHmmTopology(2);
  const TokenNgramLm lm = EstimateTokenNgram({{1, 2, 1}, {0, 1, 0}}, 2, 3);
  const int frames = 7;
  const WeightedGraph g =
      BuildNumeratorGraph({1, 2}, topo, inv, frames, &lm);
  for (const auto& p : test::EnumeratePaths(g, frames, nullptr)) {
    // Recover the token sequence from the pdf run structure.
    std::vector<int32_t> tokens;
    for (size_t i = 0; i < p.pdfs.size(); ++i) {
      const int32_t tok = p.pdfs[i] / 2;
      const int state = p.pdfs[i] % 2;
      if (state == 0 && (i == 0 || p.pdfs[i - 1] != p.pdfs[i]))
        tokens.push_back(tok);
    }
    const double want = lm.ScoreSequence(tokens) + frames * std::log(0.5);
    CHECK(std::abs(p.graph_score - want) < 1e-9);
    // Output labels on entry arcs spell the same sequence.
    CHECK(p.olabels == tokens);
  }
}

TEST_CASE("denominator paths are lm-scored token sequences") {
  const TokenInventory inv = ThreeTokens();
  const HmmTopology topo = BuildHmmTopology(2);
  const TokenNgramLm lm =
      EstimateTokenNgram({{1, 2, 1}, {0, 1, 2}, {2, 2, 0}}, 2, 3);
  const WeightedGraph den = BuildDenominatorGraph(lm, topo, inv);
  const WeightedGraph dec = BuildDecodingGraph(lm, topo, inv);
  CHECK(den.NumStates() == dec.NumStates());
  CHECK(den.NumArcs() == dec.NumArcs());

  const int frames = 6;
  const auto paths = test::EnumeratePaths(dec, frames, nullptr);
  CHECK(paths.size() > 0);
  for (const auto& p : paths) {
    REQUIRE(!p.olabels.empty());
    // Check the HMM segmentation: each token is a run over its two
    // pdfs in order.
    size_t i = 0;
    for (size_t u = 0; u < p.olabels.size(); ++u) {
      const int32_t w = p.olabels[u];
      const int32_t pdf0 = inv.PdfId(0, w, 0, 2);
      const int32_t pdf1 = inv.PdfId(0, w, 1, 2);
      REQUIRE(i < p.pdfs.size());
      CHECK(p.pdfs[i] == pdf0);
      while (i < p.pdfs.size() && p.pdfs[i] == pdf0) ++i;
      REQUIRE(i < p.pdfs.size());
      CHECK(p.pdfs[i] == pdf1);
      while (i < p.pdfs.size() && p.pdfs[i] == pdf1) ++i;
    }
    CHECK(i == p.pdfs.size());
    // Score decomposes into lm score plus one transition per frame.
    const double want =
        lm.ScoreSequence(p.olabels) + frames * std::log(0.5);
    CHECK(std::abs(p.graph_score - want) < 1e-9);
  }
}

TEST_CASE("left-bicontext denominator threads the previous token") {
  const TokenInventory inv = ThreeTokens(ContextMode::kLeftBicontext);
  const HmmTopology topo = BuildHmmTopology(2);
  const TokenNgramLm lm = EstimateTokenNgram({{1, 2, 1}, {0, 1, 2}}, 2, 3);
  const WeightedGraph dec = BuildDecodingGraph(lm, topo, inv);
  for (const auto& p : test::EnumeratePaths(dec, 5, nullptr)) {
    size_t i = 0;
    int32_t ctx = inv.SilenceId();
    for (int32_t w : p.olabels) {
      const int32_t pdf0 = inv.PdfId(ctx, w, 0, 2);
      const int32_t pdf1 = inv.PdfId(ctx, w, 1, 2);
      REQUIRE(i < p.pdfs.size());
      CHECK(p.pdfs[i] == pdf0);
      while (i < p.pdfs.size() && p.pdfs[i] == pdf0) ++i;
      REQUIRE(i < p.pdfs.size());
      CHECK(p.pdfs[i] == pdf1);
      while (i < p.pdfs.size() && p.pdfs[i] == pdf1) ++i;
      ctx = w;
    }
    CHECK(i == p.pdfs.size());
  }
}

TEST_CASE("denominator construction is deterministic") {
  const TokenInventory inv = ThreeTokens();
  const HmmTopology topo = BuildHmmTopology(2);
  const TokenNgramLm lm = EstimateTokenNgram({{1, 2, 1}, {0, 1, 2}}, 3, 3);
  const WeightedGraph a = BuildDenominatorGraph(lm, topo, inv);
  const WeightedGraph b = BuildDenominatorGraph(lm, topo, inv);
  std::ostringstream da, db;
  a.TextDump(da);
  b.TextDump(db);
  CHECK(a.NumStates() == b.NumStates());
  CHECK(a.NumArcs() == b.NumArcs());
  CHECK(da.str() == db.str());
}

TEST_CASE("builder rejects dead states unless asked to trim") {
  GraphBuilder b(2);
  const int s0 = b.AddState();
  const int s1 = b.AddState();
  b.AddState();  // dangling
  b.SetStart(s0);
  b.SetFinal(s1, 0.0);
  b.AddArc(s0, s1, 0, kNoLabel, -0.5);
  CHECK_THROWS_AS(b.Seal(), Error);

  GraphBuilder b2(2);
  const int t0 = b2.AddState();
  const int t1 = b2.AddState();
  b2.AddState();
  b2.SetStart(t0);
  b2.SetFinal(t1, 0.0);
  b2.AddArc(t0, t1, 0, kNoLabel, -0.5);
  const WeightedGraph g = b2.Seal(/*trim_dead=*/true);
  CHECK(g.NumStates() == 2);
  CHECK(g.NumArcs() == 1);
  CHECK(g.MinPathFrames() == 1);
}

TEST_CASE("builder validates arcs") {
  GraphBuilder b(2);
  const int s0 = b.AddState();
  b.SetStart(s0);
  CHECK_THROWS_AS(b.AddArc(s0, 5, 0, kNoLabel, 0.0), InvalidArgument);
  CHECK_THROWS_AS(b.AddArc(s0, s0, 7, kNoLabel, 0.0), InvalidArgument);
  CHECK_THROWS_AS(b.AddArc(s0, s0, 0, kNoLabel, kLogZero), InvalidArgument);
  CHECK_THROWS_AS(b.SetFinal(s0, std::nan("")), InvalidArgument);
}

TEST_CASE("graphs survive a save/load round trip") {
  const TokenInventory inv = ThreeTokens();
  const HmmTopology topo = BuildHmmTopology(2);
  const TokenNgramLm lm = EstimateTokenNgram({{1, 2, 1}, {0, 1, 2}}, 2, 3);
  const WeightedGraph g = BuildDenominatorGraph(lm, topo, inv);
  const std::string path = TempPath("lfa_graph_test.lfg");
  g.Save(path);

  // Magic bytes lead the file.
  {
    std::ifstream is(path, std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    CHECK(std::string(magic, 4) == "LFG1");
  }

  const WeightedGraph back = WeightedGraph::Load(path);
  CHECK(back.NumStates() == g.NumStates());
  CHECK(back.NumArcs() == g.NumArcs());
  CHECK(back.NumPdfs() == g.NumPdfs());
  CHECK(back.Start() == g.Start());
  for (int i = 0; i < g.NumArcs(); ++i) {
    CHECK(back.arcs()[i].src == g.arcs()[i].src);
    CHECK(back.arcs()[i].dst == g.arcs()[i].dst);
    CHECK(back.arcs()[i].pdf == g.arcs()[i].pdf);
    CHECK(back.arcs()[i].weight == g.arcs()[i].weight);
  }
  CHECK(back.FinalStates() == g.FinalStates());

  // Flipping one payload byte must be caught by the checksum.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(30);
    char c;
    f.seekg(30);
    f.get(c);
    f.seekp(30);
    f.put(static_cast<char>(c ^ 0x01));
  }
  CHECK_THROWS_AS(WeightedGraph::Load(path), CorruptArchive);

  // Truncation as well.
  g.Save(path);
  std::filesystem::resize_file(path, 40);
  CHECK_THROWS_AS(WeightedGraph::Load(path), CorruptArchive);
  std::filesystem::remove(path);
}

TEST_CASE("text dump lists one arc per line") {
  GraphBuilder b(2);
  const int s0 = b.AddState();
  const int s1 = b.AddState();
  b.SetStart(s0);
  b.SetFinal(s1, -0.25);
  b.AddArc(s0, s1, 1, kNoLabel, -0.5);
  const WeightedGraph g = b.Seal();
  std::ostringstream os;
  g.TextDump(os);
  CHECK(os.str().find("0 1 1 -0.5\n") != std::string::npos);
  CHECK(os.str().find("# final 1 -0.25") != std::string::npos);
}
