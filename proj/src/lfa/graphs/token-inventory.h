// lfa/graphs/token-inventory.h
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
// Token inventory: contiguous integer ids for the modeling units, a
// designated silence token, and the pdf id layout for a given number of
// HMM states per unit. In mono mode each (token, state) pair owns one
// pdf; in left-bicontext mode each (left context, token, state) triple
// does, with the utterance-initial left context fixed to silence.

#ifndef LFA_GRAPHS_TOKEN_INVENTORY_H_
#define LFA_GRAPHS_TOKEN_INVENTORY_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lfa {

enum class ContextMode { kMono, kLeftBicontext };

const char* ContextModeName(ContextMode mode);
ContextMode ContextModeFromName(const std::string& name);

class TokenInventory {
 public:
  // Tokens get ids 0..n-1 in the order given. silence must be present.
  TokenInventory(std::vector<std::string> tokens, const std::string& silence,
                 ContextMode mode);

  int NumTokens() const { return static_cast<int>(tokens_.size()); }
  int32_t SilenceId() const { return silence_; }
  ContextMode context_mode() const { return mode_; }

  const std::string& TokenText(int32_t id) const;
  // Returns -1 when the text is not in the inventory.
  int32_t FindToken(const std::string& text) const;

  int NumPdfs(int states_per_unit) const;
  // left_ctx is ignored in mono mode.
  int32_t PdfId(int32_t left_ctx, int32_t token, int state,
                int states_per_unit) const;

  void Save(std::ostream& os) const;
  static TokenInventory Load(std::istream& is);

 private:
  std::vector<std::string> tokens_;
  int32_t silence_;
  ContextMode mode_;
};

}  // namespace lfa

#endif  // LFA_GRAPHS_TOKEN_INVENTORY_H_
