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

// Execution and leakage transforms that implement the three mitigations:
// per-inference neuron shuffling, store-time Boolean masking, and
// constant-time activation evaluation.

#include <algorithm>
#include <cstdint>
#include <span>

#include "scnn/float_codec.hpp"
#include "scnn/mlp.hpp"
#include "scnn/rng.hpp"
#include "scnn/timing.hpp"

namespace scnn {

struct CountermeasureConfig {
    bool shuffle = false;
    bool mask = false;
    bool constant_time_activation = false;
    std::uint64_t seed = 0;

    bool any() const { return shuffle || mask || constant_time_activation; }
    friend bool operator==(const CountermeasureConfig &, const CountermeasureConfig &) = default;
};

/// Forward pass where each layer processes its neurons in a fresh uniform
/// permutation. Numeric results are identical to forward(): every neuron still
/// accumulates its own products in input order.
inline ForwardResult shuffled_forward(const NetworkDescription &net, std::span<const float> input, Rng &rng) {
    return forward_ordered(net, input, [&rng](std::size_t, std::size_t n) {
        auto p = identity_order(n);
        std::shuffle(p.begin(), p.end(), rng);
        return p;
    });
}

inline ForwardResult shuffled_forward(const NetworkDescription &net, std::span<const float> input, std::uint64_t seed) {
    Rng rng = derive_rng(seed, 0, kShuffleStream);
    return shuffled_forward(net, input, rng);
}

/// XORs every stored byte with a fresh uniform mask byte. The masks live only
/// on the leakage path; the value used by the next operation is unmasked.
inline StorageBytes masked_store_leakage(const StorageBytes &bytes, Rng &rng) {
    StorageBytes out = bytes;
    for (auto &b : out)
        b ^= std::uint8_t(rng() & 0xFFu);
    return out;
}

inline StorageBytes masked_store_leakage(const StorageBytes &bytes, std::uint64_t seed) {
    Rng rng = derive_rng(seed, 0, kMaskStream);
    return masked_store_leakage(bytes, rng);
}

/// Pads every activation to its own kind's worst case.
inline TimingProfiles constant_time_profile(TimingProfiles profiles) {
    for (auto k : kAllActivations)
        profiles[k].constant_time = true;
    return profiles;
}

} // namespace scnn
