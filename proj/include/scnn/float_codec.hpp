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

// IEEE 754 binary32 decomposition and the byte / Hamming weight views used
// by every leakage prediction in the library.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "scnn/error.hpp"

namespace scnn {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

struct FloatBits {
    std::uint8_t sign = 0;      // 0 or 1
    std::uint8_t exponent = 0;  // biased
    std::uint32_t mantissa = 0; // 23-bit fraction field

    static constexpr std::uint32_t kMantissaMask = (1u << 23) - 1;

    constexpr std::uint32_t word() const noexcept {
        return (std::uint32_t(sign & 1u) << 31) | (std::uint32_t(exponent) << 23) |
               (mantissa & kMantissaMask);
    }

    friend constexpr bool operator==(const FloatBits &, const FloatBits &) = default;
};

/// Storage order of a binary32 value: least-significant byte first, the
/// order in which an 8-bit core moves the four registers to memory.
using StorageBytes = std::array<std::uint8_t, 4>;

constexpr std::uint32_t float_word(float v) noexcept { return std::bit_cast<std::uint32_t>(v); }
constexpr float word_float(std::uint32_t w) noexcept { return std::bit_cast<float>(w); }

inline FloatBits decompose(float v) {
    if (!std::isfinite(v))
        throw DomainError("decompose: non-finite value");
    const std::uint32_t w = float_word(v);
    return FloatBits{std::uint8_t(w >> 31), std::uint8_t((w >> 23) & 0xFFu),
                     w & FloatBits::kMantissaMask};
}

inline float reconstruct(const FloatBits &b) {
    if (b.sign > 1 || b.mantissa > FloatBits::kMantissaMask)
        throw DomainError("reconstruct: field out of range");
    if (b.exponent == 0xFF)
        throw DomainError("reconstruct: exponent 255 encodes NaN/Inf");
    return word_float(b.word());
}

constexpr StorageBytes word_bytes(std::uint32_t w) noexcept {
    return {std::uint8_t(w), std::uint8_t(w >> 8), std::uint8_t(w >> 16), std::uint8_t(w >> 24)};
}

inline StorageBytes to_storage_bytes(float v) {
    if (!std::isfinite(v))
        throw DomainError("to_storage_bytes: non-finite value");
    return word_bytes(float_word(v));
}

/// Byte `index` (0 = least significant) of the stored representation.
/// Unchecked: used on the hot path of every CPA hypothesis.
constexpr std::uint8_t storage_byte(float v, unsigned index) noexcept {
    return std::uint8_t(float_word(v) >> (8 * index));
}

constexpr int hamming_weight(std::uint8_t x) noexcept { return std::popcount(x); }
constexpr int hamming_weight(std::uint32_t x) noexcept { return std::popcount(x); }

/// Top 7 mantissa bits (the part that shares a register with the exponent lsb).
constexpr unsigned mantissa7(float v) noexcept { return (float_word(v) >> 16) & 0x7Fu; }

/// Value with the given sign and exponent whose mantissa is `m7` in the 7
/// most significant fraction bits and zero elsewhere.
inline float candidate_from_mantissa7(unsigned m7, unsigned sign, unsigned exponent) {
    if (m7 > 0x7F || sign > 1 || exponent > 0xFF)
        throw DomainError("candidate_from_mantissa7: field out of range");
    return reconstruct(FloatBits{std::uint8_t(sign), std::uint8_t(exponent), std::uint32_t(m7) << 16});
}

/// Spacing between adjacent mantissa-7 candidates at the magnitude of `v`.
inline double mantissa7_ulp(float v) {
    const auto b = decompose(v);
    const int e = b.exponent == 0 ? -126 : int(b.exponent) - 127;
    return std::ldexp(1.0, e - 7);
}

} // namespace scnn
