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
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <string>

#include "scnn/attack/activation_classifier.hpp"
#include "scnn/attack/hpa.hpp"
#include "scnn/attack/reverse_engineer.hpp"
#include "scnn/attack/weight_recovery.hpp"
#include "scnn/evaluation.hpp"

using namespace scnn;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

LeakageConfig sigma(double s, std::uint64_t seed = 0) {
    LeakageConfig c;
    c.noise_sigma = s;
    c.seed = seed;
    return c;
}

std::vector<float> column(const TraceSet &ts, std::size_t i) {
    std::vector<float> x;
    for (const auto &r : ts.inputs)
        x.push_back(r[i]);
    return x;
}

float nonzero_grid_weight(Rng &rng, const WeightGrid &g) {
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    for (;;) {
        const float w = g.value(pick(rng));
        if (w != 0.0f)
            return w;
    }
}

/// Captures one product x * w with `n` traces of inputs in [-1, 1].
struct Capture {
    LeakageMatrix leak;
    std::vector<float> x;
};

Capture capture(float w, std::size_t n, const LeakageConfig &cfg, std::uint64_t input_seed) {
    NetworkDescription net{1, {LayerSpec{1, ActivationKind::Sigmoid, {{w}}, {0.0f}}}};
    const auto ts = simulate_batch(net, uniform_inputs(n, 1, input_seed), cfg);
    return {extract_windows(ts, 0, cfg.product_samples()), column(ts, 0)};
}

// ---------------------------------------------------------------------------

Verdict c1_codec() {
    Rng rng = derive_rng(2024, 0);
    std::size_t n = 0, bad = 0;
    while (n < 1000000) {
        const auto w = std::uint32_t(rng());
        if (((w >> 23) & 0xFFu) == 0xFFu)
            continue;
        const float v = word_float(w);
        const auto bytes = to_storage_bytes(v);
        const std::uint32_t back = bytes[0] | bytes[1] << 8 | bytes[2] << 16 | std::uint32_t(bytes[3]) << 24;
        bad += float_word(reconstruct(decompose(v))) != w || back != w;
        ++n;
    }
    const bool anchors = decompose(2.43f) == FloatBits{0, 128, 0b00110111000010100011111} &&
                         decompose(0.890625f) == FloatBits{0, 126, 0b11001000000000000000000} &&
                         candidate_from_mantissa7(0b1100100, 0, 126) == 0.890625f &&
                         to_storage_bytes(2.36f) == StorageBytes{0x3D, 0x0A, 0x17, 0x40};
    return {bad == 0 && anchors, std::to_string(n) + " roundtrips, " + std::to_string(bad) + " mismatches, anchors " +
                                     (anchors ? "ok" : "WRONG")};
}

Verdict c2_timing() {
    // Durations are measured as activation window lengths in simulated traces.
    const auto prof = reference_timing_profiles();
    const auto cfg = sigma(0);
    bool ok = true;
    std::string d;
    for (auto k : kAllActivations) {
        NetworkDescription net;
        if (k == ActivationKind::Softmax)
            net = {1, {LayerSpec{3, k, {{1.0f}, {1.0f}, {1.0f}}, {0, 0, 0}}}};
        else
            net = {1, {LayerSpec{1, k, {{1.0f}}, {0.0f}}}};
        const auto ts = simulate_batch(net, uniform_inputs(2000, 1, 40 + std::size_t(k), -2.0, 2.0), cfg);
        std::vector<double> dur;
        for (const auto &t : ts.traces)
            for (const auto &a : t.annotations)
                if (a.kind != RegionKind::Mul)
                    dur.push_back(double(a.end - a.start) * cfg.time_unit_ns);
        const auto s = observed_stats(dur);
        const auto &ref = prof[k].stats;
        const double e = std::max({std::abs(s.min_ns / ref.min_ns - 1), std::abs(s.mean_ns / ref.mean_ns - 1),
                                   std::abs(s.max_ns / ref.max_ns - 1)});
        ok = ok && e <= 0.05 && dur.size() == 2000;
        char b[96];
        std::snprintf(b, sizeof b, "%s %.2f%% ", std::string(to_string(k)).c_str(), 100 * e);
        d += b;
    }
    return {ok, "worst relative error: " + d};
}

Verdict c3_classification() {
    // Whole-pipeline classification: traces at AVR noise, weights recovered
    // first, then the timing of each layer's activation windows.
    std::size_t right = 0, total = 0;
    std::string wrong;
    for (auto k : kAllActivations) {
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto arch = k == ActivationKind::Softmax
                                  ? make_architecture(2, {3, 3}, ActivationKind::ReLU, ActivationKind::Softmax)
                                  : make_architecture(2, {3}, k, k);
            const auto net = random_network(arch, WeightGrid{}, 1000 * std::size_t(k) + s);
            const auto ts = simulate_batch(net, uniform_inputs(300, 2, s), LeakageConfig::for_preset(SnrPreset::AVR, s));
            TraceSet blind = ts;
            for (auto &t : blind.traces)
                t.annotations.clear();
            RecoveryOptions opt;
            const auto r = recover_from_traces(blind, 2, opt);
            const bool hit = !r.layers.empty() && r.layers.back().activation == k;
            right += hit;
            ++total;
            if (!hit && wrong.size() < 120)
                wrong += " " + std::string(to_string(k)) + "#" + std::to_string(s);
        }
    }
    return {right == total, std::to_string(right) + "/" + std::to_string(total) + " correct" + wrong};
}

struct WeightSweep {
    std::size_t hits = 0, n = 0;
};

WeightSweep weight_sweep(SnrPreset preset, std::size_t traces, std::size_t count) {
    Rng rng = derive_rng(77, 0);
    WeightSweep out;
    for (std::size_t i = 0; i < count; ++i) {
        const float w = nonzero_grid_weight(rng, WeightGrid{});
        const auto c = capture(w, traces, LeakageConfig::for_preset(preset, 500 + i), 900 + i);
        const auto est = recover_weight(c.leak, c.x);
        out.hits += est.value == w || std::abs(double(est.value) - double(w)) < 0.01;
        ++out.n;
    }
    return out;
}

WeightSweep avr_sweep;

Verdict c4_weights() {
    avr_sweep = weight_sweep(SnrPreset::AVR, 1000, 100);
    const auto c = capture(0.89f, 1000, LeakageConfig::for_preset(SnrPreset::AVR, 3), 4);
    const auto est = recover_weight(c.leak, c.x);
    const float m7 = candidate_from_mantissa7(est.mantissa7, est.sign, est.exponent);
    const bool ok = avr_sweep.hits >= 95 && m7 == 0.890625f;
    char b[160];
    std::snprintf(b, sizeof b, "%zu/%zu weights recovered; 0.89 -> 7-bit stage %.9g, refined %.9g", avr_sweep.hits,
                  avr_sweep.n, m7, est.value);
    return {ok, b};
}

Verdict c5_oracle() {
    Rng rng = derive_rng(55, 0);
    const auto space = HypothesisSpace::grid(WeightGrid{});
    std::size_t good = 0;
    double worst = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        const float w = nonzero_grid_weight(rng, WeightGrid{});
        const auto c = capture(w, 100, sigma(0), 300 + i);
        std::vector<std::vector<Candidate>> parts;
        for (unsigned b = 0; b < 4; ++b)
            parts.push_back(cpa_scores(
                c.leak, c.x, space, [b](double h, float x) { return double(predicted_product_hw(x, float(h), b)); },
                byte_window(b, 4)));
        const auto r = rank(combine_scores(parts));
        const auto *truth = r.find(double(w));
        worst = std::max(worst, truth ? std::abs(truth->peak - 1.0) : 1.0);
        good += truth && r.rank_of(double(w)) == 1 && std::abs(truth->peak - 1.0) <= 1e-9;
    }
    char b[96];
    std::snprintf(b, sizeof b, "%zu/100 rank 1 with peak 1, worst |peak-1| %.2g", good, worst);
    return {good == 100, b};
}

Verdict c6_arm() {
    const auto c = capture(2.453f, 2000, LeakageConfig::for_preset(SnrPreset::ARM, 9), 10);
    const float v = recover_weight(c.leak, c.x).value;
    const auto arm = weight_sweep(SnrPreset::ARM, 1000, 100);
    if (avr_sweep.n == 0)
        avr_sweep = weight_sweep(SnrPreset::AVR, 1000, 100);
    const bool ok = std::abs(double(v) - 2.453) <= 0.01 && arm.hits < avr_sweep.hits;
    char b[160];
    std::snprintf(b, sizeof b, "2.453 at 2000 traces -> %.6g; success at 1000 traces ARM %zu%% vs AVR %zu%%", v,
                  arm.hits, avr_sweep.hits);
    return {ok, b};
}

Verdict c7_structure() {
    std::string d;
    bool ok = true;
    for (const auto &sizes : {std::vector<std::size_t>{6}, std::vector<std::size_t>{6, 5}, std::vector<std::size_t>{6, 5, 5}}) {
        std::size_t good = 0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const auto net = random_network(
                make_architecture(2, sizes, ActivationKind::Sigmoid, ActivationKind::Sigmoid), WeightGrid{}, 7000 + s);
            SimulatedOracle device(net, LeakageConfig::for_preset(SnrPreset::AVR, s));
            RecoveryOptions opt;
            opt.budget = 300;
            opt.input_seed = s;
            const auto r = reverse_engineer(device, opt);
            bool bounds = r.inconclusive_boundaries == 0;
            good += r.layer_sizes() == sizes && bounds;
        }
        ok = ok && good >= 95;
        d += "[" + std::to_string(sizes.size()) + " layers] " + std::to_string(good) + "/100 ";
    }
    return {ok, d};
}

Verdict c8_hpa() {
    const auto cfg = sigma(0);
    auto layer_trace = [&](std::size_t M, std::uint64_t seed, HpaEstimate &est, float &x) {
        auto net = detail::trial_network(1, M, ActivationKind::ReLU, seed);
        x = uniform_inputs(1, 1, seed)[0][0];
        const auto t = simulate_trace(net, std::vector<float>{x}, cfg, seed);
        std::vector<std::size_t> off;
        for (const auto &a : t.annotations)
            if (a.kind == RegionKind::Mul)
                off.push_back(a.start);
        const auto cut = cut_subtraces(t.samples, off, cfg.product_samples());
        std::vector<float> w;
        for (const auto &row : net.layers[0].weights)
            w.push_back(row[0]);
        est = hpa_input_recovery(cut, w);
        // Same products, one simulated trace each.
        LeakageMatrix batch(M, cfg.product_samples());
        for (std::size_t n = 0; n < M; ++n) {
            NetworkDescription one{1, {LayerSpec{1, ActivationKind::ReLU, {{w[n]}}, {0.0f}}}};
            const auto s = simulate_trace(one, std::vector<float>{x}, cfg, seed + n);
            for (std::size_t c = 0; c < cfg.product_samples(); ++c)
                batch(n, c) = s.samples[c];
        }
        const auto other = hpa_input_recovery(batch, w);
        return batch == cut && float_word(other.value) == float_word(est.value) && other.peak == est.peak;
    };
    std::size_t ok20 = 0;
    bool equivalent = true;
    for (std::uint64_t s = 0; s < 100; ++s) {
        HpaEstimate e;
        float x;
        equivalent = layer_trace(20, 3000 + s, e, x) && equivalent;
        ok20 += hpa_success(e.value, x);
    }
    for (std::size_t M = 2; M <= 32; ++M) {
        HpaEstimate e;
        float x;
        equivalent = layer_trace(M, 5000 + M, e, x) && equivalent;
    }
    return {ok20 >= 90 && equivalent,
            std::to_string(ok20) + "/100 inputs at M=20; equivalence " + (equivalent ? "exact" : "BROKEN")};
}

Verdict c9_end_to_end() {
    std::string d;
    bool ok = true;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const auto target = random_network(
            make_architecture(4, {6, 5, 3}, ActivationKind::Sigmoid, ActivationKind::Sigmoid), WeightGrid{}, s);
        SimulatedOracle device(target, LeakageConfig::for_preset(SnrPreset::AVR, s));
        RecoveryOptions opt;
        opt.budget = 2000;
        opt.input_seed = s;
        const auto r = reverse_engineer(device, opt);
        const double diff = r.layer_sizes() == target.layer_sizes()
                                ? max_output_difference(target, r.network(), uniform_inputs(100, 4, 10000 + s))
                                : INFINITY;
        ok = ok && diff <= 1e-2;
        char b[48];
        std::snprintf(b, sizeof b, "seed %llu: %.3g  ", (unsigned long long)s, diff);
        d += b;
    }
    return {ok, "max |y - y'| " + d};
}

Verdict c10_countermeasures() {
    EvaluationOptions o;
    o.trials = 50;
    o.traces = 1000;
    o.attacks = {AttackKind::CpaWeight};
    CountermeasureConfig mask;
    mask.mask = true;
    mask.seed = 1;
    const auto m = evaluate(mask, o).at(AttackKind::CpaWeight);

    o.attacks = {AttackKind::CpaWindow};
    CountermeasureConfig shuffle;
    shuffle.shuffle = true;
    shuffle.seed = 2;
    const auto s = evaluate(shuffle, o).at(AttackKind::CpaWindow);

    Rng rng = derive_rng(3, 0, kMaskStream);
    const StorageBytes fixed = to_storage_bytes(2.43f);
    const int n = 10000;
    bool binom = true;
    for (unsigned b = 0; b < 4; ++b) {
        double sum = 0, sq = 0;
        for (int i = 0; i < n; ++i) {
            const double h = hamming_weight(masked_store_leakage(fixed, rng)[b]);
            sum += h;
            sq += h * h;
        }
        const double mean = sum / n, var = sq / n - mean * mean;
        binom = binom && std::abs(mean - 4) <= 3 * std::sqrt(2.0 / n) && std::abs(var - 2) <= 3 * std::sqrt(7.0 / n);
    }

    bool functional = true;
    const CountermeasureConfig all{true, true, true, 5};
    for (std::uint64_t k = 0; k < 100; ++k) {
        const auto net = random_network(
            make_architecture(4, {6, 5, 3}, ActivationKind::Tanh, ActivationKind::Softmax), WeightGrid{}, k);
        const auto x = uniform_inputs(1, 4, k)[0];
        const auto ref = forward(net, x).output;
        Rng r = derive_rng(all.seed, k, kShuffleStream);
        const auto got = shuffled_forward(net, x, r).output;
        for (std::size_t i = 0; i < ref.size(); ++i)
            functional = functional && float_word(ref[i]) == float_word(got[i]);
        (void)simulate_trace(net, x, sigma(1), k, all);
    }

    const bool ok = m.baseline.success_rate == 1.0 && m.protected_.success_rate <= 0.10 &&
                    s.protected_.success_rate < 0.5 && binom && functional;
    char b[200];
    std::snprintf(b, sizeof b,
                  "masking %.0f%% -> %.0f%%; shuffled window %.0f%% -> %.0f%%; binomial %s; outputs %s",
                  100 * m.baseline.success_rate, 100 * m.protected_.success_rate, 100 * s.baseline.success_rate,
                  100 * s.protected_.success_rate, binom ? "ok" : "OFF", functional ? "bit-exact" : "DIFFER");
    return {ok, b};
}

Verdict c11_scaling() {
    // Two sigmoid layers [n - 5, 5] on 4 inputs, n = 10..200. Deep random
    // stacks saturate after a few layers and stop being identifiable, so the
    // size grows in width. Every recovery must also be right.
    std::vector<double> xs, ys;
    double worst = 0;
    for (std::size_t n = 10; n <= 200; n += 10) {
        const auto net = random_network(
            make_architecture(4, {n - 5, 5}, ActivationKind::Sigmoid, ActivationKind::Sigmoid), WeightGrid{}, n);
        SimulatedOracle device(net, sigma(0, n));
        RecoveryOptions opt;
        opt.budget = 100;
        opt.input_seed = n;
        const auto r = reverse_engineer(device, opt);
        const double d = r.layer_sizes() == net.layer_sizes()
                             ? max_output_difference(net, r.network(), uniform_inputs(50, 4, n + 1))
                             : std::numeric_limits<double>::infinity();
        worst = std::max(worst, d);
        xs.push_back(double(net.neuron_count()));
        ys.push_back(double(r.hypothesis_evaluations));
    }
    const double n = double(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
    char b[200];
    std::snprintf(b, sizeof b,
                  "R^2 %.5f over %zu networks (%.0f..%.0f neurons, %.3g..%.3g evaluations), worst |y - y'| %.2g", r2,
                  xs.size(), xs.front(), xs.back(), ys.front(), ys.back(), worst);
    return {r2 >= 0.99 && worst <= 1e-2, b};
}

} // namespace

int main(int argc, char **argv) {
    const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria{
        {"1 float codec", c1_codec},
        {"2 timing calibration", c2_timing},
        {"3 activation classification", c3_classification},
        {"4 weight recovery", c4_weights},
        {"5 noiseless oracle", c5_oracle},
        {"6 arm preset", c6_arm},
        {"7 structure recovery", c7_structure},
        {"8 hpa input recovery", c8_hpa},
        {"9 end to end", c9_end_to_end},
        {"10 countermeasures", c10_countermeasures},
        {"11 linear scaling", c11_scaling},
    };
    // Optional argument: run only criteria whose label starts with it.
    const char *only = argc > 1 ? argv[1] : nullptr;
    int failed = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto &[name, fn] : criteria) {
        if (only && std::strncmp(name, only, std::strlen(only)) != 0)
            continue;
        const auto t = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
        std::printf("%s  criterion %-30s %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), sec);
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::printf("total %.1fs, %d failed\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), failed);
    return failed ? 1 : 0;
}
