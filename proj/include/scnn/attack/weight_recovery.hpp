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

// Weight recovery from the four stored bytes of the products x_i * w.
//
// stage 1  grid hypotheses scored on the byte 3 and byte 2 windows; fixes
//          sign and exponent
// stage 2  mantissa-7 hypotheses with that sign and exponent, byte 2 window
// stage 3  grid points within 1.5 mantissa-7 steps of the stage 1 and 2
//          winners and of the level-model optimum, scored on all four byte
//          windows
//
// Stage 3 gives full precision when its winner clears the margin; otherwise
// the mantissa-7 value is returned and tagged as such.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "scnn/attack/cpa.hpp"
#include "scnn/float_codec.hpp"
#include "scnn/grid.hpp"

namespace scnn {

enum class WeightPrecision { Full, Mantissa7 };

constexpr std::string_view to_string(WeightPrecision p) noexcept {
    return p == WeightPrecision::Full ? "full" : "mantissa7";
}

struct WeightRecoveryOptions {
    WeightGrid grid;
    double margin = 0.05; // relative lead over the best distinct competitor
    double tie_band = 0.05; // near-ties resolved by the absolute leakage level
    double mul_amplitude = 10.0;
    std::size_t samples_per_byte = 4;
    /// Mean leaked HW per byte below this means the products are all zero.
    double zero_level = 0.5;
    std::size_t keep = 5; // candidates kept per stage as evidence
    /// Grid values whose level-model error is within alias_slack standard
    /// deviations of the best are reported as alternatives (at most
    /// max_alternatives). They explain the stored bytes equally well.
    double alias_slack = 3.0;
    std::size_t max_alternatives = 6;
    std::size_t threads = 1;
    HypothesisCounter *counter = nullptr;
};

struct WeightEstimate {
    float value = 0.0f;
    WeightPrecision precision = WeightPrecision::Mantissa7;
    bool conclusive = false;
    bool zero_flag = false;
    double peak = 0.0;
    double margin = 0.0;
    unsigned sign = 0, exponent = 0, mantissa7 = 0;
    std::vector<Candidate> stage1, stage2, stage3; // top candidates per stage
    std::vector<float> alternatives; // indistinguishable by the stored bytes, best first
};

namespace detail {

template <class Predict>
std::vector<Candidate> multi_byte_scores(const LeakageMatrix &leak, std::span<const float> known,
                                         const HypothesisSpace &space, Predict &&predict,
                                         std::initializer_list<unsigned> bytes, const WeightRecoveryOptions &opt) {
    std::vector<std::vector<Candidate>> parts;
    const CpaOptions co{opt.threads, nullptr, opt.counter};
    for (unsigned b : bytes)
        parts.push_back(cpa_scores(
            leak, known, space, [&](double h, float x) { return predict(h, x, b); },
            byte_window(b, opt.samples_per_byte), co));
    return combine_scores(parts);
}

template <class Predict>
double multi_byte_sse(const LeakageMatrix &leak, std::span<const float> known, double h, Predict &&predict,
                      std::initializer_list<unsigned> bytes, const WeightRecoveryOptions &opt) {
    double sse = 0;
    for (unsigned b : bytes)
        sse += level_sse(leak, known, byte_window(b, opt.samples_per_byte), opt.mul_amplitude,
                         [&](float x) { return predict(h, x, b); });
    return sse;
}

struct LevelFit {
    std::vector<double> sse; // per grid index
    double noise_var = 0;    // pooled within-window sample variance
};

/// Squared error of the level model over all four byte windows for every
/// grid value. Window means stand in for the samples; the within-window
/// spread is the same for every hypothesis and gives the noise estimate.
inline LevelFit level_grid_fit(const LeakageMatrix &leak, std::span<const float> known,
                               const WeightRecoveryOptions &opt) {
    const std::size_t spb = opt.samples_per_byte;
    std::vector<std::array<double, 4>> m(leak.rows());
    double within = 0;
    for (std::size_t r = 0; r < leak.rows(); ++r)
        for (unsigned b = 0; b < 4; ++b) {
            double s = 0;
            for (std::size_t c = b * spb; c < (b + 1) * spb; ++c)
                s += leak(r, c);
            const double mean = s / double(spb);
            for (std::size_t c = b * spb; c < (b + 1) * spb; ++c)
                within += (leak(r, c) - mean) * (leak(r, c) - mean);
            m[r][b] = mean - opt.mul_amplitude;
        }
    LevelFit fit;
    if (spb > 1)
        fit.noise_var = within / double(leak.rows() * 4 * (spb - 1));
    fit.sse.resize(opt.grid.size());
    parallel_for(fit.sse.size(), opt.threads, [&](std::size_t i) {
        const float h = opt.grid.value(i);
        double e = 0;
        for (std::size_t r = 0; r < m.size(); ++r) {
            const auto bytes = word_bytes(float_word(known[r] * h));
            for (unsigned b = 0; b < 4; ++b) {
                const double d = m[r][b] - hamming_weight(bytes[b]);
                e += d * d;
            }
        }
        fit.sse[i] = e;
    });
    if (opt.counter)
        opt.counter->add(fit.sse.size());
    return fit;
}

/// Grid values other than `chosen` within the slack of the best fit.
inline std::vector<float> level_alternatives(const LevelFit &fit, std::size_t rows, float chosen,
                                             const WeightRecoveryOptions &opt) {
    const double best = *std::min_element(fit.sse.begin(), fit.sse.end());
    // Per-entry variance of a window mean is noise_var / spb; the sse of a
    // fixed hypothesis then fluctuates with sd sqrt(2 * 4 rows) times that.
    const double sd = std::sqrt(8.0 * double(rows)) * fit.noise_var / double(opt.samples_per_byte);
    const double limit = best + opt.alias_slack * sd + 1e-9 * std::max(1.0, best);
    std::vector<std::pair<double, float>> c;
    for (std::size_t i = 0; i < fit.sse.size(); ++i)
        if (fit.sse[i] <= limit && opt.grid.value(i) != chosen)
            c.emplace_back(fit.sse[i], opt.grid.value(i));
    std::stable_sort(c.begin(), c.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    std::vector<float> out;
    for (std::size_t i = 0; i < std::min(c.size(), opt.max_alternatives); ++i)
        out.push_back(c[i].second);
    return out;
}

} // namespace detail

/// `leak` holds one row per trace and 4 * samples_per_byte columns: the byte
/// windows of the product known[r] * w, least significant byte first.
inline WeightEstimate recover_weight(const LeakageMatrix &leak, std::span<const float> known,
                                     const WeightRecoveryOptions &opt = {}) {
    if (leak.cols() != 4 * opt.samples_per_byte)
        throw UsageError("recover_weight: expected " + std::to_string(4 * opt.samples_per_byte) + " columns");
    WeightEstimate est;

    if (leak.mean() - opt.mul_amplitude < opt.zero_level) {
        est.zero_flag = true;
        est.precision = WeightPrecision::Full;
        return est;
    }

    const auto product_hw = [](double h, float x, unsigned b) {
        return double(hamming_weight(storage_byte(x * float(h), b)));
    };

    // Stage 1: sign and exponent.
    const auto grid = HypothesisSpace::grid(opt.grid);
    auto s1 = detail::multi_byte_scores(leak, known, grid, product_hw, {3u, 2u}, opt);
    sort_ranking(s1);
    break_ties(s1, opt.tie_band,
               [&](double h) { return detail::multi_byte_sse(leak, known, h, product_hw, {3u, 2u}, opt); });
    est.stage1.assign(s1.begin(), s1.begin() + std::min(opt.keep, s1.size()));
    const float w1 = float(s1.front().hypothesis);
    const FloatBits b1 = decompose(w1);
    est.sign = b1.sign;
    est.exponent = b1.exponent;

    // Stage 2: top mantissa bits.
    const auto m7space = HypothesisSpace::mantissa7();
    const unsigned sg = b1.sign, ex = b1.exponent;
    auto s2 = cpa_scores(
        leak, known, m7space,
        [&](double h, float x) {
            return double(hamming_weight(storage_byte(x * candidate_from_mantissa7(unsigned(h), sg, ex), 2)));
        },
        byte_window(2, opt.samples_per_byte), CpaOptions{opt.threads, nullptr, opt.counter});
    const auto r2 = rank(s2);
    est.stage2.assign(r2.ranked.begin(), r2.ranked.begin() + std::min(opt.keep, r2.ranked.size()));
    est.mantissa7 = unsigned(r2.best().hypothesis);
    const float w7 = candidate_from_mantissa7(est.mantissa7, sg, ex);
    // Adjacent codes share most predicted bits and are not real competitors.
    const double m7_margin = r2.margin([](double a, double b) { return std::abs(a - b) > 1.0; });

    // Stage 3: full-precision refinement on the grid near both estimates and
    // near the level-model optimum, which still works when the known
    // operands barely vary (saturated activations).
    const auto fit = detail::level_grid_fit(leak, known, opt);
    const float wl = opt.grid.value(std::size_t(std::min_element(fit.sse.begin(), fit.sse.end()) - fit.sse.begin()));
    std::set<std::size_t> idx;
    for (float c : {w1, w7, wl}) {
        const double r = 1.5 * mantissa7_ulp(c);
        const std::size_t lo = opt.grid.nearest_index(c - r), hi = opt.grid.nearest_index(c + r);
        for (std::size_t i = lo; i <= hi; ++i)
            if (std::abs(double(opt.grid.value(i)) - double(c)) <= r + 0.5 * opt.grid.step)
                idx.insert(i);
    }
    std::vector<double> values;
    for (auto i : idx)
        values.push_back(opt.grid.value(i));
    const auto refine = HypothesisSpace::explicit_values(values);
    auto s3 = detail::multi_byte_scores(leak, known, refine, product_hw, {3u, 2u, 1u, 0u}, opt);
    auto r3 = rank(std::move(s3));
    break_ties(r3.ranked, opt.tie_band, [&](double h) {
        return detail::multi_byte_sse(leak, known, h, product_hw, {3u, 2u, 1u, 0u}, opt);
    });
    est.stage3.assign(r3.ranked.begin(), r3.ranked.begin() + std::min(opt.keep, r3.ranked.size()));
    // Candidates inside the band (sign twins when the known operands never
    // change sign, power-of-two aliases when they barely vary) were decided
    // by the level comparison.
    const double full_margin = band_margin(r3.ranked, opt.tie_band);

    if (full_margin >= opt.margin) {
        est.value = float(r3.best().hypothesis);
        est.precision = WeightPrecision::Full;
        est.peak = r3.best().peak;
        est.margin = full_margin;
        est.conclusive = true;
    } else {
        est.value = w7;
        est.precision = WeightPrecision::Mantissa7;
        est.peak = r2.best().peak;
        est.margin = m7_margin;
        est.conclusive = m7_margin >= opt.margin;
    }
    est.alternatives = detail::level_alternatives(fit, leak.rows(), est.value, opt);
    return est;
}

} // namespace scnn
