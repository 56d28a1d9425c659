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
// Success rates of the attacks with each countermeasure switched on alone.

#include <cstdio>

#include "scnn/evaluation.hpp"

int main() {
    using namespace scnn;
    EvaluationOptions opt;
    opt.trials = 10;
    const CountermeasureConfig configs[] = {{true, false, false, 1}, {false, true, false, 1}, {false, false, true, 1}};
    const char *names[] = {"shuffle", "mask", "constant-time"};
    for (int i = 0; i < 3; ++i) {
        const auto rep = evaluate(configs[i], opt);
        std::printf("%s\n", names[i]);
        for (const auto &e : rep.entries)
            std::printf("  %-20s %5.1f%% -> %5.1f%%  (+%.1f samples/trace)\n",
                        std::string(to_string(e.attack)).c_str(), 100 * e.baseline.success_rate,
                        100 * e.protected_.success_rate, e.overhead_samples());
    }
}
