// lfa/base/rng.h
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
// Deterministic random streams shared by every component.
//
// All sampling is built on std::mt19937_64, whose output sequence for a
// given seed is pinned by the language standard, plus hand-written value
// mappings below. The std::*_distribution adapters are implementation
// defined and are never used. With a fixed seed the integer draws are
// identical on every platform; the floating-point mappings additionally
// depend on libm (log, cos, sqrt), which is bit-stable on a given
// platform and correct to within an ulp elsewhere.

#ifndef LFA_BASE_RNG_H_
#define LFA_BASE_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace lfa {

// Avalanching finalizer used to derive stream seeds.
uint64_t SplitMix64(uint64_t x);

// FNV-1a 64-bit hash; also used as the checksum for binary archives.
uint64_t Fnv1a64(const void* data, std::size_t size);
uint64_t Fnv1a64(std::string_view s);

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Derives an independent stream from a base seed and a stream name,
  // e.g. ForStream(42, "corpus") or ForStream(42, "blhuc/spk03/2/17").
  // The mapping is SplitMix64(SplitMix64(base) ^ Fnv1a64(name)).
  static Rng ForStream(uint64_t base_seed, std::string_view stream);

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1): top 53 bits of a draw scaled by 2^-53.
  double Uniform();
  // Uniform on [lo, hi): lo + Uniform() * (hi - lo).
  double Uniform(double lo, double hi);

  // Uniform integer on [lo, hi] inclusive, unbiased via rejection.
  int64_t UniformInt(int64_t lo, int64_t hi);

  // Standard normal via the Box-Muller cosine branch; consumes exactly
  // two engine draws per call: z = sqrt(-2 ln u1) cos(2 pi u2) with
  // u1 in (0, 1] and u2 in [0, 1).
  double Normal();
  double Normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

}  // namespace lfa

#endif  // LFA_BASE_RNG_H_
