// Copyright 2026 The pretext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRETEXT_RANDOM_H_
#define PRETEXT_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace pretext {

using Rng = std::mt19937_64;

// 64-bit FNV-1a over raw bytes.
uint64_t Fnv1a64(std::string_view bytes);

// SplitMix64 finalizer; a bijective 64-bit mixer.
uint64_t SplitMix64(uint64_t x);

// Derives an independent stream seed from a parent seed and a purpose tag.
// All randomness in a run flows from the master seed through these
// derivations, so results never depend on the order work is scheduled in.
uint64_t DeriveSeed(uint64_t parent, std::string_view tag);
uint64_t DeriveSeed(uint64_t parent, std::string_view tag, uint64_t index);

}  // namespace pretext

#endif  // PRETEXT_RANDOM_H_
