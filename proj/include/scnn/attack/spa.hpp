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

// Simple power analysis: split one trace into alternating multiplication and
// activation regions.
//
// 1. centred moving average of width `smoothing`
// 2. label each sample act / mul / idle against the midpoint between the
//    nominal multiplication level (mul_amplitude + 4, the mean HW of a
//    uniform byte) and the activation level
// 3. absorb runs shorter than `min_run` into their predecessor
// 4. move every mul/act boundary to the split of the raw samples that
//    misclassifies the fewest samples within `smoothing` of the coarse cut
// 5. when `unit` is set, snap each mul region to a whole number of products
//    and slide it to the position that best fits the raw samples

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "scnn/leakage.hpp"

namespace scnn {

struct SpaParams {
    double mul_amplitude = 10.0;
    double act_amplitude = 30.0;
    std::size_t smoothing = 9;
    std::size_t min_run = 4;
    std::size_t unit = 0; // samples per product; 0 disables step 5

    static SpaParams from_config(const LeakageConfig &c) {
        SpaParams p;
        p.mul_amplitude = c.mul_amplitude;
        p.act_amplitude = c.act_amplitude;
        p.unit = c.product_samples();
        // Noisy traces: smooth over almost one product and ignore runs
        // shorter than half of one. Wider windows smear single products away.
        if (c.noise_sigma > 2.0) {
            p.smoothing = std::max<std::size_t>(p.unit - 1, 1) | 1u;
            p.min_run = std::max<std::size_t>(p.unit / 2, p.min_run);
        }
        return p;
    }

    double threshold() const { return 0.5 * (mul_amplitude + 4.0 + act_amplitude); }
    double idle_floor() const { return mul_amplitude - 0.25 * (act_amplitude - mul_amplitude); }
};

struct Span {
    std::size_t start = 0, end = 0; // [start, end)
    std::size_t size() const { return end - start; }
    friend bool operator==(const Span &, const Span &) = default;
};

struct SpaPair {
    Span mul, act;
    friend bool operator==(const SpaPair &, const SpaPair &) = default;
};

namespace detail {

enum class Level : unsigned char { Idle, Mul, Act };

struct Run {
    Level level;
    std::size_t start, end;
};

// Mul regions hold whole products. Each one gets the multiple of `unit`
// and the position where sum(thr - x) over it is largest, which is the
// likelihood-optimal cut for two equal-variance levels.
inline void fit_mul_lengths(std::span<const float> samples, double thr, double dir, std::size_t unit,
                            std::vector<Run> &runs) {
    const std::size_t n = samples.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        prefix[i + 1] = prefix[i] + thr - dir * double(samples[i]);
    auto score = [&](std::size_t a, std::size_t b) { return prefix[b] - prefix[a]; };
    for (std::size_t k = 0; k < runs.size(); ++k) {
        if (runs[k].level != Level::Mul)
            continue;
        Run &m = runs[k];
        // Every mul sample adds to the score and every act sample takes
        // away, so the best window over neighbouring lengths finds the count.
        const std::size_t units = std::max<std::size_t>(1, (m.end - m.start + unit / 2) / unit);
        const std::size_t lo_bound = k > 0 ? runs[k - 1].start + 1 : 0; // act runs keep a sample
        const std::size_t hi_bound = k + 1 < runs.size() ? runs[k + 1].end - 1 : n;
        std::size_t best = 0, len = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t u = units > 1 ? units - 1 : 1; u <= units + 1; ++u) {
            const std::size_t l = u * unit;
            if (hi_bound < lo_bound + l)
                continue;
            std::size_t lo = m.start > unit ? m.start - unit : 0, hi = m.start + unit;
            if (k == 0)
                lo = hi = 0; // traces open with a multiplication
            lo = std::max(lo, lo_bound);
            hi = std::min(hi, hi_bound - l);
            for (std::size_t s = lo; s <= hi; ++s)
                if (score(s, s + l) > best_score) {
                    best_score = score(s, s + l);
                    best = s;
                    len = l;
                }
        }
        if (len == 0)
            continue;
        m.start = best;
        m.end = best + len;
        if (k > 0)
            runs[k - 1].end = best;
        if (k + 1 < runs.size())
            runs[k + 1].start = m.end;
    }
}

} // namespace detail

inline std::vector<SpaPair> spa_segment(std::span<const float> samples, const SpaParams &p) {
    using detail::Level;
    const std::size_t n = samples.size();
    if (n == 0)
        return {};
    // Orient so that activation is the high level.
    const double dir = p.act_amplitude >= p.mul_amplitude ? 1.0 : -1.0;
    const double thr = dir * p.threshold(), floor = dir * p.idle_floor();

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        prefix[i + 1] = prefix[i] + dir * double(samples[i]);
    const std::size_t half = std::max<std::size_t>(p.smoothing, 1) / 2;

    std::vector<detail::Run> runs;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0, hi = std::min(n, i + half + 1);
        const double sm = (prefix[hi] - prefix[lo]) / double(hi - lo);
        const Level l = sm >= thr ? Level::Act : (sm >= floor ? Level::Mul : Level::Idle);
        if (runs.empty() || runs.back().level != l)
            runs.push_back({l, i, i + 1});
        else
            runs.back().end = i + 1;
    }

    // Absorb short runs and coalesce equal neighbours.
    std::vector<detail::Run> merged;
    for (const auto &r : runs) {
        if (!merged.empty() && (r.end - r.start < p.min_run || merged.back().level == r.level)) {
            merged.back().end = r.end;
            continue;
        }
        if (!merged.empty() && merged.back().end - merged.back().start < p.min_run) {
            // A short leading run takes the label of its successor.
            merged.back().level = r.level;
            merged.back().end = r.end;
            continue;
        }
        merged.push_back(r);
    }
    std::vector<detail::Run> clean;
    for (const auto &r : merged) {
        if (!clean.empty() && clean.back().level == r.level)
            clean.back().end = r.end;
        else
            clean.push_back(r);
    }

    // Boundary refinement on the raw samples.
    const std::size_t radius = std::max<std::size_t>(p.smoothing, 2);
    auto is_act = [&](std::size_t i) { return dir * double(samples[i]) >= thr; };
    for (std::size_t k = 1; k < clean.size(); ++k) {
        auto &a = clean[k - 1];
        auto &b = clean[k];
        const bool mul_act = a.level == Level::Mul && b.level == Level::Act;
        const bool act_mul = a.level == Level::Act && b.level == Level::Mul;
        if (!mul_act && !act_mul)
            continue;
        const std::size_t lo = std::max(a.start + 1, b.start >= radius ? b.start - radius : 0);
        const std::size_t hi = std::min(b.end - 1, b.start + radius);
        if (lo > hi)
            continue;
        // cost(s) = wrong-side samples in [lo - 1, hi + 1) when cutting at s
        std::size_t best = b.start, best_cost = n + 1;
        for (std::size_t s = lo; s <= hi; ++s) {
            std::size_t cost = 0;
            for (std::size_t i = lo - 1; i < s; ++i)
                cost += is_act(i) == mul_act; // before the cut: act samples are wrong for mul->act
            for (std::size_t i = s; i <= hi; ++i)
                cost += is_act(i) != mul_act;
            if (cost < best_cost || (cost == best_cost && s == b.start)) {
                best_cost = cost;
                best = s;
            }
        }
        a.end = best;
        b.start = best;
    }

    if (p.unit > 0)
        detail::fit_mul_lengths(samples, dir * p.threshold(), dir, p.unit, clean);

    std::vector<SpaPair> pairs;
    for (std::size_t k = 1; k < clean.size(); ++k)
        if (clean[k - 1].level == Level::Mul && clean[k].level == Level::Act)
            pairs.push_back({{clean[k - 1].start, clean[k - 1].end}, {clean[k].start, clean[k].end}});
    return pairs;
}

/// Ground-truth pairs from simulator annotations: consecutive mul regions
/// (a softmax layer) are merged in front of the activation that follows.
inline std::vector<SpaPair> annotated_pairs(const Trace &t) {
    std::vector<SpaPair> out;
    bool have_mul = false;
    Span mul;
    for (const auto &a : t.annotations) {
        if (a.kind == RegionKind::Mul) {
            if (!have_mul)
                mul = {a.start, a.end};
            else
                mul.end = a.end;
            have_mul = true;
        } else if (have_mul) {
            out.push_back({mul, {a.start, a.end}});
            have_mul = false;
        }
    }
    return out;
}

} // namespace scnn
