/* Copyright 2026 The Bias Audit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BIAS_AUDIT_FNV_H_
#define BIAS_AUDIT_FNV_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace bias_audit {

// Incremental 64-bit FNV-1a. Used for instance ids, dataset content hashes
// and seeded subsampling, so every byte fed in must be platform independent:
// integers go through UpdateU64, which always emits little-endian bytes.
class Fnv1a64 {
 public:
  static constexpr uint64_t kOffsetBasis = 14695981039346656037ULL;
  static constexpr uint64_t kPrime = 1099511628211ULL;

  void Update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= kPrime;
    }
  }

  void UpdateU64(uint64_t value) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= static_cast<unsigned char>((value >> (8 * i)) & 0xFF);
      state_ *= kPrime;
    }
  }

  uint64_t digest() const { return state_; }

 private:
  uint64_t state_ = kOffsetBasis;
};

uint64_t Fnv1a64Hash(std::string_view bytes);

// 16 lowercase hex digits, zero padded. Lexicographic order of the strings
// equals numeric order of the values.
std::string ToHex64(uint64_t value);

// FNV-1a over (seed as 8 LE bytes) followed by the word's UTF-8 bytes.
uint64_t SeededWordHash(uint64_t seed, std::string_view word);

// Per-trial seed: FNV-1a over (base_seed LE8) followed by (trial LE8).
uint64_t DeriveTrialSeed(uint64_t base_seed, uint64_t trial_index);

}  // namespace bias_audit

#endif  // BIAS_AUDIT_FNV_H_
