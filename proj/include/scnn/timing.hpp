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

// Data-dependent activation timing. Each profile reproduces the measured
// minimum / mean / maximum of an 8-bit target for inputs uniform in [-2, 2]
// through a one-parameter power-law shape:
//
//   ReLU     min + u(x) (max - min), u a uniform hash of the bits of x
//   Sigmoid  min + (max - min) t^g,   t = (2 - x) / 4   (slower for negative x)
//   Tanh     max - (max - min) a^g,   a = |x| / 2       (symmetric, slowest at 0)
//   Softmax  (min + (max - min) t^g) K / Kref, t = (x + 2) / 4
//
// With t uniform on [0,1], E[t^g] = 1 / (g + 1), which fixes g from the mean.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "scnn/float_codec.hpp"
#include "scnn/mlp.hpp"
#include "scnn/rng.hpp"

namespace scnn {

struct TimingStats {
    double min_ns = 0, max_ns = 0, mean_ns = 0;
};

struct TimingProfile {
    ActivationKind kind = ActivationKind::ReLU;
    TimingStats stats;
    bool constant_time = false; // every evaluation padded to max_ns

    /// Power-law exponent that reproduces stats.mean_ns.
    double shape_exponent() const {
        const double span = stats.max_ns - stats.min_ns;
        switch (kind) {
        case ActivationKind::Sigmoid:
        case ActivationKind::Softmax:
            return span / (stats.mean_ns - stats.min_ns) - 1.0;
        case ActivationKind::Tanh:
            return span / (stats.max_ns - stats.mean_ns) - 1.0;
        case ActivationKind::ReLU:
            break;
        }
        return 1.0;
    }

    /// Duration at the calibration output count (Softmax) for input x.
    double duration(float x) const {
        if (constant_time)
            return stats.max_ns;
        const double span = stats.max_ns - stats.min_ns;
        const double xv = std::clamp(double(x), -2.0, 2.0);
        switch (kind) {
        case ActivationKind::ReLU: {
            const double u = double(mix64(float_word(x)) >> 11) * 0x1.0p-53;
            return stats.min_ns + u * span;
        }
        case ActivationKind::Sigmoid:
            return stats.min_ns + span * std::pow((2.0 - xv) / 4.0, shape_exponent());
        case ActivationKind::Tanh:
            return stats.max_ns - span * std::pow(std::abs(xv) / 2.0, shape_exponent());
        case ActivationKind::Softmax:
            return stats.min_ns + span * std::pow((xv + 2.0) / 4.0, shape_exponent());
        }
        return stats.mean_ns;
    }

    /// The input-dependent part an attacker can model. ReLU jitter carries no
    /// usable pattern, so its model is flat.
    double pattern(float x) const {
        if (kind == ActivationKind::ReLU && !constant_time)
            return stats.mean_ns;
        return duration(x);
    }
};

class TimingProfiles {
  public:
    TimingProfiles() = default;
    TimingProfiles(std::array<TimingProfile, 4> p, std::size_t softmax_ref) : profiles_(p), softmax_ref_(softmax_ref) {}

    const TimingProfile &operator[](ActivationKind k) const { return profiles_[std::size_t(k)]; }
    TimingProfile &operator[](ActivationKind k) { return profiles_[std::size_t(k)]; }

    /// Output count at which the Softmax profile was calibrated.
    std::size_t softmax_reference_outputs() const { return softmax_ref_; }

    /// Scale applied to the Softmax profile for an output layer of K neurons.
    double softmax_scale(std::size_t outputs) const { return double(outputs) / double(softmax_ref_); }

    double duration(ActivationKind kind, float x, std::size_t outputs = 0) const {
        const double d = (*this)[kind].duration(x);
        return kind == ActivationKind::Softmax ? d * softmax_scale(outputs ? outputs : softmax_ref_) : d;
    }

    /// Envelope [min, max] for a kind, scaled for Softmax.
    TimingStats envelope(ActivationKind kind, std::size_t outputs = 0) const {
        TimingStats s = (*this)[kind].stats;
        if (kind == ActivationKind::Softmax) {
            const double k = softmax_scale(outputs ? outputs : softmax_ref_);
            s.min_ns *= k;
            s.max_ns *= k;
            s.mean_ns *= k;
        }
        if ((*this)[kind].constant_time)
            s.min_ns = s.mean_ns = s.max_ns;
        return s;
    }

  private:
    std::array<TimingProfile, 4> profiles_{};
    std::size_t softmax_ref_ = 3;
};

/// Calibration constants (ns) measured on the 8-bit target over 2000
/// evaluations with inputs in [-2, 2].
inline TimingProfiles reference_timing_profiles() {
    return TimingProfiles({TimingProfile{ActivationKind::ReLU, {5879, 6069, 5975}},
                           TimingProfile{ActivationKind::Sigmoid, {152155, 222102, 189144}},
                           TimingProfile{ActivationKind::Tanh, {51909, 210663, 184864}},
                           TimingProfile{ActivationKind::Softmax, {724366, 877194, 813712}}},
                          3);
}

} // namespace scnn
