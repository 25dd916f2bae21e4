// Copyright 2026 The pairvqe Authors
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

#ifndef PAIRVQE_RNG_HPP_
#define PAIRVQE_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace pairvqe {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
uint64_t splitmix64(uint64_t x);

/// Independent stream for (seed, circuit id, index); counter-based, so the result does
/// not depend on how work is scheduled.
Rng make_stream(uint64_t seed, uint64_t circuit_id, uint64_t index = 0);

/// Stable 64-bit hash of a string (FNV-1a), used for circuit ids.
uint64_t stable_hash(std::string_view text);

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

}  // namespace pairvqe

#endif  // PAIRVQE_RNG_HPP_
