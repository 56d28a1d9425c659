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
// Layer-by-layer recovery of a 4-6-5-3 network through a simulated device.

#include <cstdio>
#include <cstdlib>

#include "scnn/attack/reverse_engineer.hpp"

int main(int argc, char **argv) {
    using namespace scnn;
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    const auto target = random_network(make_architecture(4, {6, 5, 3}, ActivationKind::Sigmoid, ActivationKind::Sigmoid),
                                       WeightGrid{}, seed);
    SimulatedOracle device(target, LeakageConfig::for_preset(SnrPreset::AVR, seed));

    RecoveryOptions opt;
    opt.budget = 1000;
    const auto rep = reverse_engineer(device, opt);

    std::printf("layers:");
    for (const auto &l : rep.layers)
        std::printf(" %zu/%s", l.neurons, std::string(to_string(l.activation)).c_str());
    std::printf("\nboundaries:");
    for (const auto &b : rep.boundaries)
        std::printf(" %zu:%s(%s)", b.region, std::string(to_string(b.decision)).c_str(), b.method.c_str());
    std::printf("\nhypotheses evaluated: %llu\n", (unsigned long long)rep.hypothesis_evaluations);
    for (const auto &n : rep.notes)
        std::printf("note: %s\n", n.c_str());

    const auto fresh = uniform_inputs(100, 4, seed + 1000);
    const double d = max_output_difference(target, rep.network(), fresh);
    std::printf("max |y - y'| over 100 fresh inputs: %.3g\n", d);
    return d <= 1e-2 ? 0 : 1;
}
