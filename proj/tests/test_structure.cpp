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
// SPA segmentation, layer boundaries, activation timing, HPA.

#include <cmath>

#include <gtest/gtest.h>

#include "scnn/attack/activation_classifier.hpp"
#include "scnn/attack/hpa.hpp"
#include "scnn/attack/layer_boundary.hpp"
#include "scnn/attack/spa.hpp"
#include "scnn/leakage.hpp"

using namespace scnn;

namespace {

NetworkDescription sigmoid_net(std::size_t in, std::vector<std::size_t> sizes, std::uint64_t seed) {
    return random_network(make_architecture(in, std::move(sizes), ActivationKind::Sigmoid, ActivationKind::Sigmoid),
                          WeightGrid{}, seed);
}

} // namespace

TEST(Spa, MatchesAnnotations) {
    for (double sigma : {0.0, 0.5, 1.0}) {
        LeakageConfig cfg;
        cfg.noise_sigma = sigma;
        const auto ts = simulate_batch(sigmoid_net(3, {6}, 2), uniform_inputs(10, 3, 4), cfg);
        for (const auto &t : ts.traces) {
            const auto found = spa_segment(t.samples, SpaParams::from_config(cfg));
            const auto truth = annotated_pairs(t);
            ASSERT_EQ(found.size(), 6u);
            for (std::size_t i = 0; i < 6; ++i) {
                EXPECT_EQ(found[i].mul.start, truth[i].mul.start);
                EXPECT_EQ(found[i].act.size(), truth[i].act.size());
            }
        }
    }
}

TEST(Spa, CountsLayout665) {
    const auto ts = simulate_batch(sigmoid_net(4, {6, 5, 5}, 3), uniform_inputs(3, 4, 1), LeakageConfig{});
    for (const auto &t : ts.traces)
        EXPECT_EQ(spa_segment(t.samples, SpaParams{}).size(), 16u);
    const auto sm = random_network(make_architecture(4, {6, 5, 3}, ActivationKind::Sigmoid, ActivationKind::Softmax),
                                   WeightGrid{}, 3);
    const auto t2 = simulate_batch(sm, uniform_inputs(1, 4, 1), LeakageConfig{});
    EXPECT_EQ(spa_segment(t2.traces[0].samples, SpaParams{}).size(), 12u);
}

TEST(Spa, ArmNoiseKeepsMulRegionsWhole) {
    // One input per neuron: 16-sample products, the hardest case. Traces
    // with a wrong region count are outvoted by the majority downstream.
    const auto cfg = LeakageConfig::for_preset(SnrPreset::ARM, 5);
    const auto ts = simulate_batch(sigmoid_net(1, {6}, 2), uniform_inputs(100, 1, 4), cfg);
    int counted = 0, regions = 0, placed = 0;
    for (const auto &t : ts.traces) {
        const auto found = spa_segment(t.samples, SpaParams::from_config(cfg));
        const auto truth = annotated_pairs(t);
        if (found.size() != truth.size())
            continue;
        ++counted;
        for (std::size_t i = 0; i < found.size(); ++i) {
            ++regions;
            placed += found[i].mul.size() == truth[i].mul.size() &&
                      std::abs(double(found[i].mul.start) - double(truth[i].mul.start)) <= 4.0;
        }
    }
    EXPECT_GE(counted, 70);
    EXPECT_GE(placed, regions * 95 / 100);
}

TEST(Spa, FlatTraceHasNoRegions) {
    std::vector<float> flat(5000, 0.0f);
    EXPECT_TRUE(spa_segment(flat, SpaParams{}).empty());
    EXPECT_TRUE(spa_segment(std::vector<float>{}, SpaParams{}).empty());
}

TEST(LayerBoundary, SameAndNextLayer) {
    const auto net = sigmoid_net(3, {6, 5}, 8);
    auto cfg = LeakageConfig::for_preset(SnrPreset::AVR, 2);
    const auto ts = simulate_batch(net, uniform_inputs(1000, 3, 5), cfg);
    auto mul_start = [&](std::size_t t, std::size_t region) {
        std::size_t k = 0;
        for (const auto &a : ts.traces[t].annotations)
            if (a.kind == RegionKind::Mul && k++ == region)
                return a.start;
        throw std::logic_error("region missing");
    };
    std::vector<std::size_t> rows(ts.size());
    std::vector<float> x, y;
    for (std::size_t t = 0; t < ts.size(); ++t) {
        rows[t] = t;
        x.push_back(ts.inputs[t][0]);
        y.push_back(infer(NetworkDescription{3, {net.layers[0]}}, ts.inputs[t])[0]);
    }
    for (auto [region, expect] : {std::pair{std::size_t(6), BoundaryDecision::NextLayer},
                                  std::pair{std::size_t(2), BoundaryDecision::SameLayer}}) {
        std::vector<std::size_t> off;
        for (std::size_t t = 0; t < ts.size(); ++t)
            off.push_back(mul_start(t, region));
        const auto r = layer_boundary_test(extract_windows(ts, rows, off, cfg.product_samples()), x, y);
        EXPECT_EQ(r.decision, expect) << "region " << region;
    }
}

TEST(LayerBoundary, EqualEvidenceIsInconclusive) {
    NetworkDescription net{1, {LayerSpec{1, ActivationKind::Sigmoid, {{1.25f}}, {0.0f}}}};
    LeakageConfig cfg;
    cfg.noise_sigma = 0;
    const auto ts = simulate_batch(net, uniform_inputs(300, 1, 3), cfg);
    std::vector<float> x;
    for (const auto &r : ts.inputs)
        x.push_back(r[0]);
    const auto r = layer_boundary_test(extract_windows(ts, 0, cfg.product_samples()), x, x);
    EXPECT_EQ(r.decision, BoundaryDecision::Inconclusive);
}

TEST(ActivationClassifier, StatisticsAlone) {
    const auto p = reference_timing_profiles();
    for (auto k : kAllActivations) {
        Rng rng = derive_rng(4, std::size_t(k));
        std::vector<double> d;
        for (int i = 0; i < 500; ++i)
            d.push_back(p.duration(k, float(uniform(rng, -2, 2))));
        EXPECT_EQ(classify_activation(d, {}, p).kind, k) << to_string(k);
    }
}

TEST(ActivationClassifier, PatternSeparatesShapes) {
    const auto p = reference_timing_profiles();
    Rng rng = derive_rng(6, 0);
    std::vector<double> d;
    std::vector<float> x;
    for (int i = 0; i < 300; ++i) {
        x.push_back(float(uniform(rng, -2, 2)));
        d.push_back(p.duration(ActivationKind::Sigmoid, x.back()));
    }
    const auto c = classify_activation(d, x, p);
    EXPECT_EQ(c.kind, ActivationKind::Sigmoid);
    EXPECT_GT(c.pattern_score[1], 0.99);
}

TEST(ActivationClassifier, ConstantTimeTiesSigmoidAndTanh) {
    const auto p = constant_time_profile(reference_timing_profiles());
    for (float x : {-1.5f, 0.0f, 0.3f, 2.0f})
        EXPECT_EQ(p.duration(ActivationKind::Sigmoid, x), 222102.0);
    std::vector<double> d(100, 222102.0);
    std::vector<float> x(100);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = -2.0f + 0.04f * float(i);
    ClassifierOptions o;
    o.pattern_band = 100;
    const auto c = classify_activation(d, x, p, 0, o);
    EXPECT_EQ(c.pattern_score[1], c.pattern_score[2]);
}

TEST(ActivationClassifier, Errors) {
    const auto p = reference_timing_profiles();
    EXPECT_THROW(classify_activation({}, {}, p), UsageError);
    std::vector<double> d{1.0, 2.0};
    std::vector<float> x{1.0f};
    EXPECT_THROW(classify_activation(d, x, p), UsageError);
}

namespace {

// One trace of an M-neuron first layer, cut into sub-traces, against M
// single-multiplication traces of the same products.
struct HpaPair {
    LeakageMatrix cut, batch;
    std::vector<float> w;
    float x;
};

HpaPair hpa_pair(std::size_t M, std::uint64_t seed) {
    LeakageConfig cfg;
    cfg.noise_sigma = 0;
    auto net = random_network(make_architecture(1, {M}, ActivationKind::ReLU, ActivationKind::ReLU), WeightGrid{}, seed);
    for (auto &row : net.layers[0].weights)
        if (row[0] == 0.0f)
            row[0] = 0.01f;
    const float x = uniform_inputs(1, 1, seed + 7)[0][0];
    const auto t = simulate_trace(net, std::vector<float>{x}, cfg, seed);
    std::vector<std::size_t> off;
    for (const auto &a : t.annotations)
        if (a.kind == RegionKind::Mul)
            off.push_back(a.start);
    HpaPair p{cut_subtraces(t.samples, off, cfg.product_samples()), LeakageMatrix(M, cfg.product_samples()), {}, x};
    for (std::size_t n = 0; n < M; ++n) {
        const float w = net.layers[0].weights[n][0];
        p.w.push_back(w);
        NetworkDescription single{1, {LayerSpec{1, ActivationKind::ReLU, {{w}}, {0.0f}}}};
        const auto s = simulate_trace(single, std::vector<float>{x}, cfg, seed + n);
        for (std::size_t c = 0; c < cfg.product_samples(); ++c)
            p.batch(n, c) = s.samples[c];
    }
    return p;
}

} // namespace

TEST(Hpa, CutEqualsBatchForAllM) {
    for (std::size_t M = 2; M <= 32; ++M) {
        const auto p = hpa_pair(M, 100 + M);
        ASSERT_EQ(p.cut, p.batch) << "M=" << M;
        const auto a = hpa_input_recovery(p.cut, p.w), b = hpa_input_recovery(p.batch, p.w);
        EXPECT_EQ(float_word(a.value), float_word(b.value));
        EXPECT_EQ(a.peak, b.peak);
        EXPECT_EQ(a.low_confidence, M < 20);
    }
}

TEST(Hpa, RecoversInputAtTwentyNeurons) {
    int ok = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto p = hpa_pair(20, 500 + s);
        ok += hpa_success(hpa_input_recovery(p.cut, p.w).value, p.x);
    }
    EXPECT_GE(ok, 18);
}

TEST(Hpa, FourNeuronsUnderNoiseAreUnreliable) {
    int ok = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto p = hpa_pair(4, 900 + s);
        Rng rng = derive_rng(s, 0);
        std::normal_distribution<double> g(0.0, 1.0);
        for (std::size_t r = 0; r < p.cut.rows(); ++r)
            for (auto &v : p.cut.row(r))
                v += g(rng);
        ok += hpa_success(hpa_input_recovery(p.cut, p.w).value, p.x);
    }
    EXPECT_LT(ok, 50);
}
