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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "scnn/attack/cpa.hpp"
#include "scnn/timing.hpp"

namespace scnn {

struct ClassifierOptions {
    /// Kinds whose statistics distance is within this band of the best are
    /// re-ranked by their duration-vs-input pattern.
    double pattern_band = 1.5;
    /// Pattern correlations closer than this count as a tie.
    double tie_epsilon = 0.05;
    /// Kinds the caller already ruled out (e.g. Softmax for per-neuron
    /// activation windows) are skipped.
    std::array<bool, 4> allowed{true, true, true, true};
};

struct ActivationClassification {
    ActivationKind kind = ActivationKind::ReLU;
    double distance = 0; // statistics distance of the chosen kind
    std::array<double, 4> stats_distance{};
    std::array<double, 4> pattern_score{}; // Pearson(duration, profile(x)), 0 when undefined
    bool pattern_used = false;
    bool pattern_tie = false;
};

/// Root-mean-square log ratio between observed (min, mean, max) and a profile.
inline double timing_stats_distance(const TimingStats &obs, const TimingStats &prof) {
    const double a = std::log(obs.min_ns / prof.min_ns), b = std::log(obs.mean_ns / prof.mean_ns),
                 c = std::log(obs.max_ns / prof.max_ns);
    return std::sqrt((a * a + b * b + c * c) / 3.0);
}

inline TimingStats observed_stats(std::span<const double> durations) {
    TimingStats s{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (double d : durations) {
        s.min_ns = std::min(s.min_ns, d);
        s.max_ns = std::max(s.max_ns, d);
        s.mean_ns += d;
    }
    s.mean_ns /= double(durations.size());
    return s;
}

/// Nearest timing profile. `inputs`, when non-empty, holds the activation
/// input for each duration and enables pattern refinement; `outputs` is the
/// output count assumed for Softmax (0: calibration count).
inline ActivationClassification classify_activation(std::span<const double> durations, std::span<const float> inputs,
                                                    const TimingProfiles &profiles, std::size_t outputs = 0,
                                                    const ClassifierOptions &opt = {}) {
    if (durations.empty())
        throw UsageError("classify_activation: no durations");
    if (!inputs.empty() && inputs.size() != durations.size())
        throw UsageError("classify_activation: one input per duration required");
    for (double d : durations)
        if (!(d > 0.0))
            throw UsageError("classify_activation: durations must be positive");

    ActivationClassification r;
    const TimingStats obs = observed_stats(durations);
    std::size_t best = 4;
    for (std::size_t k = 0; k < 4; ++k) {
        r.stats_distance[k] = opt.allowed[k] ? timing_stats_distance(obs, profiles.envelope(kAllActivations[k], outputs))
                                             : std::numeric_limits<double>::infinity();
        if (opt.allowed[k] && (best == 4 || r.stats_distance[k] < r.stats_distance[best]))
            best = k;
    }
    if (best == 4)
        throw UsageError("classify_activation: every kind excluded");
    r.kind = kAllActivations[best];
    r.distance = r.stats_distance[best];
    if (inputs.empty() || durations.size() < 3)
        return r;

    r.pattern_used = true;
    std::vector<double> model(durations.size());
    for (std::size_t k = 0; k < 4; ++k) {
        const auto kind = kAllActivations[k];
        const double scale = kind == ActivationKind::Softmax ? profiles.softmax_scale(outputs ? outputs : profiles.softmax_reference_outputs()) : 1.0;
        for (std::size_t i = 0; i < durations.size(); ++i)
            model[i] = profiles[kind].pattern(inputs[i]) * scale;
        try {
            r.pattern_score[k] = pearson<double, double>(durations, model);
        } catch (const UndefinedCorrelation &) {
            r.pattern_score[k] = 0.0;
        }
    }
    // Among kinds plausible by statistics, prefer the best pattern match.
    std::size_t top = best, second = 4;
    for (std::size_t k = 0; k < 4; ++k) {
        if (k == best || !opt.allowed[k] || r.stats_distance[k] > r.stats_distance[best] + opt.pattern_band)
            continue;
        if (r.pattern_score[k] > r.pattern_score[top]) {
            second = top;
            top = k;
        } else if (second == 4 || r.pattern_score[k] > r.pattern_score[second]) {
            second = k;
        }
    }
    const double lead = second == 4 ? r.pattern_score[top] : r.pattern_score[top] - r.pattern_score[second];
    if (second != 4 && lead < opt.tie_epsilon) {
        r.pattern_tie = true; // keep the statistics winner
        return r;
    }
    r.kind = kAllActivations[top];
    r.distance = r.stats_distance[top];
    return r;
}

} // namespace scnn
