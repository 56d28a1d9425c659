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
// Recovers one weight from 1000 simulated traces and prints the top of each
// stage's ranking.

#include <cstdio>
#include <cstdlib>

#include "scnn/attack/weight_recovery.hpp"
#include "scnn/leakage.hpp"

int main(int argc, char **argv) {
    using namespace scnn;
    const float w = argc > 1 ? std::strtof(argv[1], nullptr) : 2.43f;
    const double sigma = argc > 2 ? std::strtod(argv[2], nullptr) : 1.0;

    NetworkDescription net{1, {LayerSpec{1, ActivationKind::Sigmoid, {{w}}, {0.0f}}}};
    LeakageConfig cfg;
    cfg.noise_sigma = sigma;
    const auto ts = simulate_batch(net, uniform_inputs(1000, 1, 3), cfg);

    std::vector<float> x;
    for (const auto &row : ts.inputs)
        x.push_back(row[0]);
    const auto est = recover_weight(extract_windows(ts, 0, cfg.product_samples()), x);

    auto show = [](const char *name, const std::vector<Candidate> &c) {
        std::printf("%s\n", name);
        for (const auto &k : c)
            std::printf("  %-12.6g peak %.4f\n", k.hypothesis, k.peak);
    };
    show("stage 1 (sign, exponent)", est.stage1);
    show("stage 2 (mantissa7 code)", est.stage2);
    show("stage 3 (grid refinement)", est.stage3);
    std::printf("true %.6g  recovered %.6g (%s, margin %.3f)\n", w, est.value,
                std::string(to_string(est.precision)).c_str(), est.margin);
    return est.conclusive ? 0 : 1;
}
