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
#include <span>
#include <string_view>

#include "scnn/attack/weight_recovery.hpp"

namespace scnn {

enum class BoundaryDecision { SameLayer, NextLayer, Inconclusive };

constexpr std::string_view to_string(BoundaryDecision d) noexcept {
    switch (d) {
    case BoundaryDecision::SameLayer:
        return "same_layer";
    case BoundaryDecision::NextLayer:
        return "next_layer";
    case BoundaryDecision::Inconclusive:
        break;
    }
    return "inconclusive";
}

struct BoundaryResult {
    BoundaryDecision decision = BoundaryDecision::Inconclusive;
    BoundaryDecision leaning = BoundaryDecision::SameLayer; // higher peak, even when inconclusive
    double peak_same = 0, peak_next = 0;
    double margin = 0; // relative difference of the two peaks
    WeightEstimate same, next;
};

/// Does the product in `leak` use the raw layer inputs `x` (same layer) or
/// the recovered outputs `y` of the layer being built (next layer)? Both
/// hypotheses run the full weight recovery; the four-byte refinement peak
/// is compared.
inline BoundaryResult layer_boundary_test(const LeakageMatrix &leak, std::span<const float> x,
                                          std::span<const float> y, const WeightRecoveryOptions &opt = {},
                                          double margin = 0.05) {
    BoundaryResult r;
    r.same = recover_weight(leak, x, opt);
    r.next = recover_weight(leak, y, opt);
    auto peak = [](const WeightEstimate &e) { return e.stage3.empty() ? 0.0 : e.stage3.front().peak; };
    r.peak_same = peak(r.same);
    r.peak_next = peak(r.next);
    const double hi = std::max(r.peak_same, r.peak_next);
    r.margin = hi > 0 ? std::abs(r.peak_same - r.peak_next) / hi : 0.0;
    r.leaning = r.peak_next > r.peak_same ? BoundaryDecision::NextLayer : BoundaryDecision::SameLayer;
    r.decision = r.margin >= margin ? r.leaning : BoundaryDecision::Inconclusive;
    return r;
}

} // namespace scnn
