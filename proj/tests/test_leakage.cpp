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
#include <algorithm>

#include <gtest/gtest.h>

#include "scnn/leakage.hpp"

using namespace scnn;

namespace {

LeakageConfig noiseless() {
    LeakageConfig c;
    c.noise_sigma = 0.0;
    return c;
}

} // namespace

TEST(Leakage, MulWindowLevels) {
    NetworkDescription net{1, {LayerSpec{1, ActivationKind::ReLU, {{1.0f}}, {0.0f}}}};
    const auto cfg = noiseless();
    const auto t = simulate_trace(net, std::vector<float>{1.0f}, cfg, 0);
    ASSERT_FALSE(t.annotations.empty());
    const auto &mul = t.annotations.front();
    ASSERT_EQ(mul.kind, RegionKind::Mul);
    ASSERT_EQ(mul.end - mul.start, cfg.product_samples());
    const double expect[4] = {0, 0, 1, 6}; // 1.0 is stored as 00 00 80 3F
    for (unsigned b = 0; b < 4; ++b)
        for (std::size_t s = 0; s < cfg.samples_per_byte; ++s)
            EXPECT_DOUBLE_EQ(t.samples[mul.start + b * cfg.samples_per_byte + s] - cfg.mul_amplitude, expect[b]);
}

TEST(Leakage, SixPairsForSixNeurons) {
    const auto net =
        random_network(make_architecture(3, {6}, ActivationKind::Sigmoid, ActivationKind::Sigmoid), WeightGrid{}, 4);
    const auto t = simulate_trace(net, std::vector<float>{0.3f, -0.2f, 0.9f}, LeakageConfig{}, 0);
    std::size_t mul = 0, act = 0;
    for (const auto &a : t.annotations) {
        mul += a.kind == RegionKind::Mul;
        act += a.kind == RegionKind::Act;
    }
    EXPECT_EQ(mul, 6u);
    EXPECT_EQ(act, 6u);
    for (std::size_t i = 1; i < t.annotations.size(); ++i)
        EXPECT_GE(t.annotations[i].start, t.annotations[i - 1].end);
}

TEST(Leakage, Deterministic) {
    const auto net =
        random_network(make_architecture(4, {6, 3}, ActivationKind::Tanh, ActivationKind::Softmax), WeightGrid{}, 9);
    const auto in = uniform_inputs(20, 4, 2);
    auto cfg = LeakageConfig::for_preset(SnrPreset::AVR, 7);
    const auto a = simulate_batch(net, in, cfg);
    const auto b = simulate_batch(net, in, cfg);
    const auto p = simulate_batch(net, in, cfg, {}, reference_timing_profiles(), 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.traces[i].samples, b.traces[i].samples);
        EXPECT_EQ(a.traces[i].samples, p.traces[i].samples);
    }
    cfg.seed = 8;
    EXPECT_NE(simulate_batch(net, in, cfg).traces[0].samples, a.traces[0].samples);
}

TEST(Leakage, BatchShape) {
    NetworkDescription net{1, {LayerSpec{1, ActivationKind::ReLU, {{1.0f}}, {0.0f}}}};
    EXPECT_EQ(simulate_batch(net, uniform_inputs(1000, 1, 1), LeakageConfig{}).size(), 1000u);
    EXPECT_TRUE(simulate_batch(net, {}, LeakageConfig{}).empty());
    for (const auto &row : uniform_inputs(200, 3, 5))
        for (float v : row) {
            EXPECT_GE(v, -1.0f);
            EXPECT_LT(v, 1.0f);
        }
    EXPECT_EQ(LeakageConfig::for_preset(SnrPreset::ARM).recommended_traces(),
              2 * LeakageConfig::for_preset(SnrPreset::AVR).recommended_traces());
}

TEST(Leakage, ConfigValidation) {
    LeakageConfig c;
    c.noise_sigma = -1;
    EXPECT_THROW(c.validate(), UsageError);
    c = {};
    c.samples_per_byte = 0;
    EXPECT_THROW(c.validate(), UsageError);
    c = {};
    c.act_amplitude = c.mul_amplitude;
    EXPECT_THROW(c.validate(), UsageError);
    EXPECT_EQ(parse_preset("arm"), SnrPreset::ARM);
    EXPECT_THROW(parse_preset("x86"), UsageError);
}

TEST(Timing, ProfileProperties) {
    const auto p = reference_timing_profiles();
    Rng rng = derive_rng(3, 0);
    for (int i = 0; i < 2000; ++i) {
        const float x = float(uniform(rng, -4, 4));
        const double r = p.duration(ActivationKind::ReLU, x);
        EXPECT_GE(r, 5879);
        EXPECT_LE(r, 6069);
        EXPECT_EQ(p.duration(ActivationKind::Tanh, x), p.duration(ActivationKind::Tanh, -x));
        EXPECT_GE(p.duration(ActivationKind::Sigmoid, x), 152155);
        EXPECT_LE(p.duration(ActivationKind::Sigmoid, x), 222102);
    }
    EXPECT_DOUBLE_EQ(p.duration(ActivationKind::Softmax, 0.5f, 6), 2 * p.duration(ActivationKind::Softmax, 0.5f, 3));
}

TEST(Timing, MeansMatchCalibration) {
    const auto p = reference_timing_profiles();
    for (auto k : kAllActivations) {
        Rng rng = derive_rng(17, std::size_t(k));
        double s = 0;
        for (int i = 0; i < 2000; ++i)
            s += p.duration(k, float(uniform(rng, -2, 2)));
        EXPECT_NEAR(s / 2000 / p[k].stats.mean_ns, 1.0, 0.05) << to_string(k);
    }
}

TEST(Timing, ActivationSamplesStayInEnvelope) {
    const auto p = reference_timing_profiles();
    const auto env = p.envelope(ActivationKind::Sigmoid);
    EXPECT_EQ(activation_samples(0, env, 250), std::size_t(std::ceil(env.min_ns / 250)));
    EXPECT_EQ(activation_samples(1e9, env, 250), std::size_t(std::floor(env.max_ns / 250)));
}
