// lfa/graphs/weighted-graph.cc
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

#include "lfa/graphs/weighted-graph.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <sstream>

#include "lfa/base/bin-io.h"

namespace lfa {

int WeightedGraph::MinPathFrames() const {
  // BFS over arc counts from the start state.
  const int unset = -1;
  std::vector<int> dist(NumStates(), unset);
  std::deque<int> queue;
  dist[start_] = 0;
  queue.push_back(start_);
  int best = -1;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    if (IsFinal(s) && (best < 0 || dist[s] < best)) best = dist[s];
    auto [lo, hi] = ArcRange(s);
    for (int a = lo; a < hi; ++a) {
      const int d = arcs_[a].dst;
      if (dist[d] == unset) {
        dist[d] = dist[s] + 1;
        queue.push_back(d);
      }
    }
  }
  if (best < 0) throw Error("graph has no start-to-final path");
  return best;
}

namespace {
constexpr char kGraphMagic[5] = "LFG1";
}  // namespace

void WeightedGraph::Save(const std::string& path) const {
  std::ostringstream payload;
  WriteU32(payload, 1);  // version
  WriteU32(payload, static_cast<uint32_t>(NumStates()));
  WriteU32(payload, static_cast<uint32_t>(num_pdfs_));
  WriteU32(payload, static_cast<uint32_t>(start_));
  WriteU32(payload, static_cast<uint32_t>(final_states_.size()));
  for (int s : final_states_) {
    WriteU32(payload, static_cast<uint32_t>(s));
    WriteDouble(payload, final_weights_[s]);
  }
  WriteU64(payload, arcs_.size());
  for (const Arc& a : arcs_) {
    WriteU32(payload, static_cast<uint32_t>(a.src));
    WriteU32(payload, static_cast<uint32_t>(a.dst));
    WriteI32(payload, a.pdf);
    WriteI32(payload, a.olabel);
    WriteDouble(payload, a.weight);
  }
  SaveWithChecksum(path, kGraphMagic, payload.str());
}

WeightedGraph WeightedGraph::Load(const std::string& path) {
  std::istringstream is(LoadChecked(path, kGraphMagic));
  const uint32_t version = ReadU32(is);
  if (version != 1)
    throw CorruptArchive("unsupported graph version " +
                         std::to_string(version));
  const uint32_t num_states = ReadU32(is);
  const uint32_t num_pdfs = ReadU32(is);
  const uint32_t start = ReadU32(is);
  if (start >= num_states) throw CorruptArchive("start state out of range");
  GraphBuilder builder(static_cast<int>(num_pdfs));
  for (uint32_t s = 0; s < num_states; ++s) builder.AddState();
  builder.SetStart(static_cast<int>(start));
  const uint32_t num_finals = ReadU32(is);
  for (uint32_t i = 0; i < num_finals; ++i) {
    const uint32_t s = ReadU32(is);
    const double w = ReadDouble(is);
    if (s >= num_states) throw CorruptArchive("final state out of range");
    builder.SetFinal(static_cast<int>(s), w);
  }
  const uint64_t num_arcs = ReadU64(is);
  if (num_arcs > (1ull << 32)) throw CorruptArchive("unreasonable arc count");
  for (uint64_t i = 0; i < num_arcs; ++i) {
    const uint32_t src = ReadU32(is);
    const uint32_t dst = ReadU32(is);
    const int32_t pdf = ReadI32(is);
    const int32_t olabel = ReadI32(is);
    const double w = ReadDouble(is);
    if (src >= num_states || dst >= num_states)
      throw CorruptArchive("arc endpoint out of range");
    builder.AddArc(static_cast<int>(src), static_cast<int>(dst), pdf, olabel,
                   w);
  }
  try {
    return builder.Seal();
  } catch (const Error& e) {
    throw CorruptArchive(std::string("graph fails validation: ") + e.what());
  }
}

void WeightedGraph::TextDump(std::ostream& os) const {
  os << "# states " << NumStates() << " arcs " << NumArcs() << " pdfs "
     << num_pdfs_ << "\n";
  os << "# start " << start_ << "\n";
  os.precision(17);
  for (const Arc& a : arcs_)
    os << a.src << " " << a.dst << " " << a.pdf << " " << a.weight << "\n";
  for (int s : final_states_)
    os << "# final " << s << " " << final_weights_[s] << "\n";
}

GraphBuilder::GraphBuilder(int num_pdfs) : num_pdfs_(num_pdfs) {
  if (num_pdfs < 1) throw InvalidArgument("graph needs at least one pdf");
}

int GraphBuilder::AddState() { return num_states_++; }

void GraphBuilder::SetStart(int state) {
  if (state < 0 || state >= num_states_)
    throw InvalidArgument("start state out of range");
  start_ = state;
}

void GraphBuilder::SetFinal(int state, double log_weight) {
  if (state < 0 || state >= num_states_)
    throw InvalidArgument("final state out of range");
  if (std::isnan(log_weight) || log_weight == kLogZero)
    throw InvalidArgument("final weight must be finite");
  finals_.emplace_back(state, log_weight);
}

void GraphBuilder::AddArc(int src, int dst, int32_t pdf, int32_t olabel,
                          double log_weight) {
  if (src < 0 || src >= num_states_ || dst < 0 || dst >= num_states_)
    throw InvalidArgument("arc endpoint out of range");
  if (pdf < 0 || pdf >= num_pdfs_)
    throw InvalidArgument("arc pdf out of range: " + std::to_string(pdf));
  if (std::isnan(log_weight) || log_weight == kLogZero)
    throw InvalidArgument("arc weight must be finite");
  arcs_.push_back(Arc{src, dst, pdf, olabel, log_weight});
}

WeightedGraph GraphBuilder::Seal(bool trim_dead) {
  if (sealed_) throw Error("builder already sealed");
  sealed_ = true;
  if (start_ < 0) throw Error("no start state set");
  if (finals_.empty()) throw Error("no final state set");

  // Forward reachability from the start.
  std::vector<char> fwd(num_states_, 0);
  {
    std::deque<int> queue{start_};
    fwd[start_] = 1;
    std::vector<std::vector<int>> out(num_states_);
    for (size_t i = 0; i < arcs_.size(); ++i)
      out[arcs_[i].src].push_back(arcs_[i].dst);
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      for (int d : out[s])
        if (!fwd[d]) {
          fwd[d] = 1;
          queue.push_back(d);
        }
    }
  }
  // Backward reachability from the finals.
  std::vector<char> bwd(num_states_, 0);
  {
    std::deque<int> queue;
    for (const auto& [s, w] : finals_)
      if (!bwd[s]) {
        bwd[s] = 1;
        queue.push_back(s);
      }
    std::vector<std::vector<int>> in(num_states_);
    for (size_t i = 0; i < arcs_.size(); ++i)
      in[arcs_[i].dst].push_back(arcs_[i].src);
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      for (int p : in[s])
        if (!bwd[p]) {
          bwd[p] = 1;
          queue.push_back(p);
        }
    }
  }

  std::vector<int> remap(num_states_, -1);
  int kept = 0;
  for (int s = 0; s < num_states_; ++s) {
    const bool alive = fwd[s] && bwd[s];
    if (!alive && !trim_dead)
      throw Error("dead state " + std::to_string(s) +
                  " (unreachable or cannot reach a final state)");
    if (alive) remap[s] = kept++;
  }
  if (remap[start_] < 0) throw Error("start state cannot reach a final state");

  WeightedGraph g;
  g.start_ = remap[start_];
  g.num_pdfs_ = num_pdfs_;
  g.final_weights_.assign(kept, kLogZero);
  for (const auto& [s, w] : finals_)
    if (remap[s] >= 0) g.final_weights_[remap[s]] = w;
  for (int s = 0; s < kept; ++s)
    if (g.final_weights_[s] != kLogZero) g.final_states_.push_back(s);

  g.arcs_.reserve(arcs_.size());
  for (const Arc& a : arcs_) {
    if (remap[a.src] < 0 || remap[a.dst] < 0) continue;
    Arc b = a;
    b.src = remap[a.src];
    b.dst = remap[a.dst];
    g.arcs_.push_back(b);
  }
  std::stable_sort(g.arcs_.begin(), g.arcs_.end(),
                   [](const Arc& x, const Arc& y) { return x.src < y.src; });
  g.arc_offsets_.assign(kept + 1, 0);
  for (const Arc& a : g.arcs_) ++g.arc_offsets_[a.src + 1];
  for (int s = 0; s < kept; ++s) g.arc_offsets_[s + 1] += g.arc_offsets_[s];
  return g;
}

}  // namespace lfa
