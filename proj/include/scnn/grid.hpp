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
#include <cmath>
#include <cstddef>

#include "scnn/error.hpp"

namespace scnn {

/// Symmetric weight grid [-bound, bound] with spacing `step`.
struct WeightGrid {
    double bound = 5.0;
    double step = 0.01;

    void validate() const {
        if (!(step > 0.0) || !std::isfinite(step))
            throw DomainError("weight grid: step must be positive");
        if (!(bound > 0.0) || !std::isfinite(bound))
            throw DomainError("weight grid: bound must be positive");
        const double r = bound / step;
        if (std::fabs(r - std::round(r)) > 1e-6 * std::max(1.0, r))
            throw DomainError("weight grid: bound must be a whole number of steps");
    }

    std::size_t half_steps() const { return std::size_t(std::llround(bound / step)); }
    std::size_t size() const { return 2 * half_steps() + 1; }

    float value(std::size_t i) const {
        return float((double(i) - double(half_steps())) * step);
    }

    std::size_t nearest_index(double v) const {
        const double k = std::round(v / step) + double(half_steps());
        if (k <= 0.0)
            return 0;
        if (k >= double(size() - 1))
            return size() - 1;
        return std::size_t(k);
    }
};

} // namespace scnn
