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

#include "bias_audit/fnv.h"

namespace bias_audit {

uint64_t Fnv1a64Hash(std::string_view bytes) {
  Fnv1a64 h;
  h.Update(bytes);
  return h.digest();
}

std::string ToHex64(uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[value & 0xF];
    value >>= 4;
  }
  return out;
}

uint64_t SeededWordHash(uint64_t seed, std::string_view word) {
  Fnv1a64 h;
  h.UpdateU64(seed);
  h.Update(word);
  return h.digest();
}

uint64_t DeriveTrialSeed(uint64_t base_seed, uint64_t trial_index) {
  Fnv1a64 h;
  h.UpdateU64(base_seed);
  h.UpdateU64(trial_index);
  return h.digest();
}

}  // namespace bias_audit
