// lfa/graphs/token-inventory.cc
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

#include "lfa/graphs/token-inventory.h"

#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "lfa/base/common.h"

namespace lfa {

const char* ContextModeName(ContextMode mode) {
  return mode == ContextMode::kMono ? "mono" : "bicontext";
}

ContextMode ContextModeFromName(const std::string& name) {
  if (name == "mono") return ContextMode::kMono;
  if (name == "bicontext") return ContextMode::kLeftBicontext;
  throw InvalidArgument("unknown context mode: " + name);
}

TokenInventory::TokenInventory(std::vector<std::string> tokens,
                               const std::string& silence, ContextMode mode)
    : tokens_(std::move(tokens)), silence_(-1), mode_(mode) {
  if (tokens_.size() < 2)
    throw InvalidArgument("inventory needs at least two tokens");
  std::set<std::string> seen;
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty())
      throw InvalidArgument("empty token text at id " + std::to_string(i));
    if (!seen.insert(tokens_[i]).second)
      throw InvalidArgument("duplicate token text: " + tokens_[i]);
    if (tokens_[i] == silence) silence_ = static_cast<int32_t>(i);
  }
  if (silence_ < 0)
    throw InvalidArgument("silence token not in inventory: " + silence);
}

const std::string& TokenInventory::TokenText(int32_t id) const {
  if (id < 0 || id >= NumTokens())
    throw InvalidArgument("token id out of range: " + std::to_string(id));
  return tokens_[id];
}

int32_t TokenInventory::FindToken(const std::string& text) const {
  for (size_t i = 0; i < tokens_.size(); ++i)
    if (tokens_[i] == text) return static_cast<int32_t>(i);
  return -1;
}

int TokenInventory::NumPdfs(int states_per_unit) const {
  if (states_per_unit < 1)
    throw InvalidArgument("states_per_unit must be >= 1");
  const int v = NumTokens();
  return mode_ == ContextMode::kMono ? v * states_per_unit
                                     : v * v * states_per_unit;
}

int32_t TokenInventory::PdfId(int32_t left_ctx, int32_t token, int state,
                              int states_per_unit) const {
  const int v = NumTokens();
  if (token < 0 || token >= v)
    throw InvalidArgument("token id out of range: " + std::to_string(token));
  if (state < 0 || state >= states_per_unit)
    throw InvalidArgument("hmm state out of range: " + std::to_string(state));
  if (mode_ == ContextMode::kMono)
    return token * states_per_unit + state;
  if (left_ctx < 0 || left_ctx >= v)
    throw InvalidArgument("left context out of range: " +
                          std::to_string(left_ctx));
  return (left_ctx * v + token) * states_per_unit + state;
}

void TokenInventory::Save(std::ostream& os) const {
  os << "context " << ContextModeName(mode_) << "\n";
  os << "silence " << tokens_[silence_] << "\n";
  for (const auto& t : tokens_) os << "token " << t << "\n";
}

TokenInventory TokenInventory::Load(std::istream& is) {
  std::string line;
  std::string context_name;
  std::string silence;
  std::vector<std::string> tokens;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind, value;
    ls >> kind >> value;
    if (kind == "context") {
      context_name = value;
    } else if (kind == "silence") {
      silence = value;
    } else if (kind == "token") {
      tokens.push_back(value);
    } else {
      throw CorruptArchive("bad inventory line: " + line);
    }
  }
  if (context_name.empty() || silence.empty() || tokens.empty())
    throw CorruptArchive("incomplete inventory file");
  return TokenInventory(std::move(tokens), silence,
                        ContextModeFromName(context_name));
}

}  // namespace lfa
