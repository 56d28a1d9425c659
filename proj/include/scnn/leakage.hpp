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

// Synthetic side-channel traces under a Hamming weight model.
//
// Trace layout, in execution order:
//   MulStore     4 byte windows, samples_per_byte samples each, least
//                significant byte first, level mul_amplitude + HW(byte)
//   ActEval      round(duration / time_unit_ns) samples at act_amplitude plus
//                a fixed ripple
//   SoftmaxEval  one window whose duration scales with the output count
// Gaussian noise N(0, noise_sigma^2) is added to every sample.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "scnn/countermeasures.hpp"
#include "scnn/error.hpp"
#include "scnn/float_codec.hpp"
#include "scnn/mlp.hpp"
#include "scnn/parallel.hpp"
#include "scnn/rng.hpp"
#include "scnn/timing.hpp"

namespace scnn {

enum class SnrPreset { AVR, ARM };

constexpr std::string_view to_string(SnrPreset p) noexcept { return p == SnrPreset::AVR ? "avr" : "arm"; }

inline SnrPreset parse_preset(std::string_view s) {
    if (s == "avr")
        return SnrPreset::AVR;
    if (s == "arm")
        return SnrPreset::ARM;
    throw UsageError("unknown preset '" + std::string(s) + "'");
}

struct LeakageConfig {
    double noise_sigma = 1.0; // Hamming weight units
    std::size_t samples_per_byte = 4;
    double mul_amplitude = 10.0;
    double act_amplitude = 30.0;
    double time_unit_ns = 250.0;
    SnrPreset preset = SnrPreset::AVR;
    std::uint64_t seed = 0;

    static constexpr double kAvrNoise = 1.0;
    static constexpr double kArmNoise = 10.0;

    static LeakageConfig for_preset(SnrPreset p, std::uint64_t seed = 0) {
        LeakageConfig c;
        c.preset = p;
        c.noise_sigma = p == SnrPreset::AVR ? kAvrNoise : kArmNoise;
        c.seed = seed;
        return c;
    }

    /// Traces recommended for a weight attack; the low-SNR preset needs twice
    /// as many.
    std::size_t recommended_traces() const { return preset == SnrPreset::AVR ? 1000 : 2000; }

    std::size_t product_samples() const { return 4 * samples_per_byte; }

    void validate() const {
        if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
            throw UsageError("leakage config: noise_sigma must be >= 0");
        if (samples_per_byte == 0)
            throw UsageError("leakage config: samples_per_byte must be positive");
        if (!(time_unit_ns > 0.0))
            throw UsageError("leakage config: time_unit_ns must be positive");
        if (mul_amplitude == act_amplitude)
            throw UsageError("leakage config: mul and act amplitudes must differ");
    }

    friend bool operator==(const LeakageConfig &, const LeakageConfig &) = default;
};

enum class RegionKind { Mul, Act, Softmax };

constexpr std::string_view to_string(RegionKind k) noexcept {
    return k == RegionKind::Mul ? "mul" : (k == RegionKind::Act ? "act" : "softmax");
}

/// Ground-truth region [start, end) in samples.
struct Annotation {
    RegionKind kind;
    std::size_t layer, neuron;
    std::size_t start, end;
    friend bool operator==(const Annotation &, const Annotation &) = default;
};

struct Trace {
    std::vector<float> samples;
    std::vector<Annotation> annotations; // empty when served to an attacker
};

struct TraceSet {
    std::vector<Trace> traces;
    std::vector<std::vector<float>> inputs; // known input per trace
    LeakageConfig config;
    CountermeasureConfig countermeasures;

    std::size_t size() const { return traces.size(); }
    bool empty() const { return traces.empty(); }
};

/// Number of samples an activation window occupies, clamped to the
/// quantized envelope so region lengths never leave [min, max].
inline std::size_t activation_samples(double ns, const TimingStats &env, double time_unit_ns) {
    const double lo = std::ceil(env.min_ns / time_unit_ns), hi = std::floor(env.max_ns / time_unit_ns);
    double n = std::round(ns / time_unit_ns);
    n = std::clamp(n, lo, std::max(lo, hi));
    return std::size_t(std::max(1.0, n));
}

inline double act_ripple(std::size_t k) { return 0.5 * std::sin(2.0 * std::numbers::pi * double(k % 8) / 8.0); }

namespace detail {

class TraceWriter {
  public:
    TraceWriter(const LeakageConfig &cfg, Rng &noise) : cfg_(cfg), noise_(noise), gauss_(0.0, cfg.noise_sigma) {}

    void emit(double level) {
        double v = level;
        if (cfg_.noise_sigma > 0.0)
            v += gauss_(noise_);
        trace.samples.push_back(float(v));
    }
    std::size_t position() const { return trace.samples.size(); }

    Trace trace;

  private:
    const LeakageConfig &cfg_;
    Rng &noise_;
    std::normal_distribution<double> gauss_;
};

} // namespace detail

/// Converts an execution log into one trace. `mask_rng` is only drawn from
/// when masking is enabled.
inline Trace render_trace(const ExecutionLog &log, const LeakageConfig &cfg, const TimingProfiles &timing, Rng &noise,
                          Rng *mask_rng) {
    detail::TraceWriter w(cfg, noise);
    // Open mul region for the neuron currently being processed.
    bool open = false;
    Annotation cur{RegionKind::Mul, 0, 0, 0, 0};
    auto close = [&] {
        if (open) {
            cur.end = w.position();
            w.trace.annotations.push_back(cur);
            open = false;
        }
    };
    for (const auto &ev : log.events) {
        if (const auto *m = std::get_if<MulStore>(&ev)) {
            if (!open || cur.layer != m->layer || cur.neuron != m->neuron) {
                close();
                cur = Annotation{RegionKind::Mul, m->layer, m->neuron, w.position(), 0};
                open = true;
            }
            StorageBytes bytes = word_bytes(float_word(m->product));
            if (mask_rng)
                bytes = masked_store_leakage(bytes, *mask_rng);
            for (auto b : bytes)
                for (std::size_t s = 0; s < cfg.samples_per_byte; ++s)
                    w.emit(cfg.mul_amplitude + hamming_weight(b));
        } else if (const auto *a = std::get_if<ActEval>(&ev)) {
            close();
            const auto n = activation_samples(timing.duration(a->kind, a->input), timing.envelope(a->kind),
                                              cfg.time_unit_ns);
            const std::size_t start = w.position();
            for (std::size_t k = 0; k < n; ++k)
                w.emit(cfg.act_amplitude + act_ripple(k));
            w.trace.annotations.push_back({RegionKind::Act, a->layer, a->neuron, start, w.position()});
        } else if (const auto *s = std::get_if<SoftmaxEval>(&ev)) {
            close();
            const std::size_t k_out = s->inputs.size();
            double mean = 0.0;
            for (float v : s->inputs)
                mean += v;
            mean /= double(k_out);
            const auto n = activation_samples(timing.duration(ActivationKind::Softmax, float(mean), k_out),
                                              timing.envelope(ActivationKind::Softmax, k_out), cfg.time_unit_ns);
            const std::size_t start = w.position();
            for (std::size_t k = 0; k < n; ++k)
                w.emit(cfg.act_amplitude + act_ripple(k));
            w.trace.annotations.push_back({RegionKind::Softmax, s->layer, 0, start, w.position()});
        }
    }
    close();
    return std::move(w.trace);
}

/// One inference of `net` on `input`; deterministic per (cfg.seed, trace_seed)
/// and, for countermeasures, cm.seed.
inline Trace simulate_trace(const NetworkDescription &net, std::span<const float> input, const LeakageConfig &cfg,
                            std::uint64_t trace_seed, const CountermeasureConfig &cm = {},
                            const TimingProfiles &timing = reference_timing_profiles()) {
    cfg.validate();
    ForwardResult fr;
    if (cm.shuffle) {
        Rng shuffle_rng = derive_rng(cm.seed, trace_seed, kShuffleStream);
        fr = shuffled_forward(net, input, shuffle_rng);
    } else {
        fr = forward(net, input);
    }
    const TimingProfiles t = cm.constant_time_activation ? constant_time_profile(timing) : timing;
    Rng noise = derive_rng(cfg.seed, trace_seed, kNoiseStream);
    if (cm.mask) {
        Rng mask = derive_rng(cm.seed, trace_seed, kMaskStream);
        return render_trace(fr.log, cfg, t, noise, &mask);
    }
    return render_trace(fr.log, cfg, t, noise, nullptr);
}

/// One trace per input row, trace_seed = row index.
inline TraceSet simulate_batch(const NetworkDescription &net, const std::vector<std::vector<float>> &inputs,
                               const LeakageConfig &cfg, const CountermeasureConfig &cm = {},
                               const TimingProfiles &timing = reference_timing_profiles(), std::size_t threads = 1) {
    net.validate();
    cfg.validate();
    TraceSet ts;
    ts.config = cfg;
    ts.countermeasures = cm;
    ts.inputs = inputs;
    ts.traces.resize(inputs.size());
    parallel_for(inputs.size(), threads,
                 [&](std::size_t i) { ts.traces[i] = simulate_trace(net, inputs[i], cfg, i, cm, timing); });
    return ts;
}

/// Rows of independent uniform inputs in [lo, hi).
inline std::vector<std::vector<float>> uniform_inputs(std::size_t rows, std::size_t dim, std::uint64_t seed,
                                                      double lo = -1.0, double hi = 1.0) {
    Rng rng = derive_rng(seed, 0, kInputStream);
    std::vector<std::vector<float>> x(rows, std::vector<float>(dim));
    for (auto &row : x)
        for (auto &v : row)
            v = float(uniform(rng, lo, hi));
    return x;
}

} // namespace scnn
