/*
 * SPDX-FileCopyrightText: Copyright 2026 The scnn-lab authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <random>

namespace scnn {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; the stream derivation below relies on its avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Independent RNG stream for (seed, index, purpose). Parallel consumers that
/// derive their streams this way reproduce sequential results exactly.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t purpose = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(purpose)};
    return Rng(seq);
}

// Stream purposes
inline constexpr std::uint64_t kNoiseStream = 0;
inline constexpr std::uint64_t kMaskStream = 1;
inline constexpr std::uint64_t kShuffleStream = 2;
inline constexpr std::uint64_t kInputStream = 3;
inline constexpr std::uint64_t kNetworkStream = 4;
inline constexpr std::uint64_t kJitterStream = 5;

/// Uniform double in [0,1) taken from the top 53 bits of a draw.
inline double uniform01(Rng &rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng &rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

} // namespace scnn
