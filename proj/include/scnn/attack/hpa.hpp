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

// Horizontal attack on one trace: the M products x * w_n that share an
// unknown input component x are cut out of the trace and treated as M
// observations with known operands w_n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <span>
#include <vector>

#include "scnn/attack/cpa.hpp"
#include "scnn/attack/spa.hpp"
#include "scnn/float_codec.hpp"

namespace scnn {

struct HpaOptions {
    std::size_t samples_per_byte = 4;
    std::size_t reliability_floor = 20; // fewer sub-traces than this: low confidence
    std::size_t carry = 256; // byte 3 candidates searched in the byte 2 stage
    /// Correlation ties (exponent shifts that only move the high bits change
    /// HW by a constant) are broken by squared error against the absolute
    /// level mul_amplitude + HW. Candidates within `tie_band` (relative) of
    /// the best peak take part.
    double mul_amplitude = 10.0;
    double tie_band = 0.05;
    HypothesisCounter *counter = nullptr;
};

struct HpaEstimate {
    float value = 0.0f; // bytes 3 and 2 recovered, low bits at the interval midpoint
    std::uint8_t byte3 = 0, byte2 = 0;
    double peak = 0.0;
    double margin = 0.0;
    std::size_t observations = 0;
    bool low_confidence = false;
    std::vector<Candidate> stage_a; // byte 3 ranking head
};

/// Offsets of product `component` inside each first-layer neuron's
/// multiplication region.
inline std::vector<std::size_t> hpa_offsets(std::span<const SpaPair> pairs, std::size_t neurons,
                                            std::size_t component, std::size_t samples_per_byte) {
    if (pairs.size() < neurons)
        throw UsageError("hpa_offsets: trace has fewer regions than neurons");
    std::vector<std::size_t> off(neurons);
    for (std::size_t n = 0; n < neurons; ++n)
        off[n] = pairs[n].mul.start + component * 4 * samples_per_byte;
    return off;
}

namespace detail {

inline bool finite_word(std::uint32_t w) { return ((w >> 23) & 0xFFu) != 0xFFu; }

/// Mean HW of byte `b` of w * x over inputs sharing byte 3 = h, spanning the
/// exponent lsb and four mantissa positions.
inline double byte3_model(std::uint8_t h, float w, unsigned b) {
    static constexpr std::uint32_t kMantissa[] = {0x000000u, 0x200000u, 0x400000u, 0x600000u};
    double s = 0;
    int n = 0;
    for (std::uint32_t e = 0; e < 2; ++e)
        for (auto m : kMantissa) {
            const std::uint32_t word = (std::uint32_t(h) << 24) | (e << 23) | m | 0x100000u;
            if (!finite_word(word))
                continue;
            s += hamming_weight(storage_byte(w * word_float(word), b));
            ++n;
        }
    return n ? s / n : 0.0;
}

} // namespace detail

/// `leak` rows are the cut sub-traces (4 * samples_per_byte columns each),
/// `weights` the known operand of each.
inline HpaEstimate hpa_input_recovery(const LeakageMatrix &leak, std::span<const float> weights,
                                      const HpaOptions &opt = {}) {
    if (leak.cols() != 4 * opt.samples_per_byte)
        throw UsageError("hpa: expected " + std::to_string(4 * opt.samples_per_byte) + " columns per sub-trace");
    HpaEstimate est;
    est.observations = leak.rows();
    est.low_confidence = leak.rows() < opt.reliability_floor;
    const CpaOptions co{1, nullptr, opt.counter};

    // Stage A: byte 3 (sign and high exponent bits).
    const auto bytes = HypothesisSpace::byte_values();
    auto a = cpa_scores(
        leak, weights, bytes, [](double h, float w) { return detail::byte3_model(std::uint8_t(h), w, 3); },
        byte_window(3, opt.samples_per_byte), co);
    sort_ranking(a);
    const auto w3 = byte_window(3, opt.samples_per_byte), w2 = byte_window(2, opt.samples_per_byte);
    est.stage_a.assign(a.begin(), a.begin() + std::min<std::size_t>(a.size(), 5));

    // Stage B: byte 2 under each carried byte 3 candidate, scored on both
    // windows. The prediction uses the midpoint of the 16 unknown low bits.
    std::vector<Candidate> joint;
    for (std::size_t c = 0; c < std::min(opt.carry, a.size()); ++c) {
        const auto h = std::uint32_t(a[c].hypothesis);
        auto make = [h](double g) { return (h << 24) | (std::uint32_t(g) << 16); };
        auto predict = [&](unsigned b) {
            return [&, b](double g, float w) {
                const std::uint32_t word = make(g) | 0x8000u;
                return detail::finite_word(word) ? double(hamming_weight(storage_byte(w * word_float(word), b))) : 0.0;
            };
        };
        auto s3 = cpa_scores(leak, weights, bytes, predict(3), w3, co);
        auto s2 = cpa_scores(leak, weights, bytes, predict(2), w2, co);
        auto both = combine_scores({s3, s2});
        for (auto &cand : both) {
            cand.hypothesis = double(make(cand.hypothesis)); // full word as the identifier
            joint.push_back(cand);
        }
    }
    auto r = rank(std::move(joint));
    break_ties(r.ranked, opt.tie_band, [&](double id) {
        const float x = word_float(std::uint32_t(id) | 0x8000u);
        if (!std::isfinite(x))
            return std::numeric_limits<double>::infinity();
        auto hw = [x](unsigned b) { return [x, b](float w) { return double(hamming_weight(storage_byte(w * x, b))); }; };
        return level_sse(leak, weights, w3, opt.mul_amplitude, hw(3)) +
               level_sse(leak, weights, w2, opt.mul_amplitude, hw(2));
    });
    const auto word = std::uint32_t(r.best().hypothesis);
    est.value = word_float(word | 0x8000u);
    est.byte3 = std::uint8_t(word >> 24);
    est.byte2 = std::uint8_t(word >> 16);
    est.peak = r.best().peak;
    // Adjacent byte 2 codes under the same byte 3 differ only in the lowest
    // predicted bit and do not count as competitors.
    est.margin = r.margin([](double x, double y) {
        const auto a = std::uint32_t(x), b = std::uint32_t(y);
        return (a >> 24) != (b >> 24) || std::abs(int((a >> 16) & 0xFF) - int((b >> 16) & 0xFF)) > 1;
    });
    return est;
}

/// Success criterion: within one mantissa-7 step of the true value.
inline bool hpa_success(float estimate, float truth) {
    return std::abs(double(estimate) - double(truth)) <= mantissa7_ulp(truth);
}

} // namespace scnn
