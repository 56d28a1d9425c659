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

// Baseline vs protected success rates of the individual attacks.
//
// cpa-weight          one weight of a single-neuron layer, rank-1 recovery
//                     from `traces` aligned traces
// cpa-window          weight 0 of neuron 0 in a 6-neuron layer, attacked at
//                     the window where neuron 0 runs in unshuffled order
// activation-pattern  activation kind of a 4-neuron layer from its timing
// hpa-input           input component 0 from one trace of a 20-neuron layer
//
// Every trial draws its network and inputs from (seed, trial) only, so the
// baseline and protected runs see identical targets.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scnn/attack/activation_classifier.hpp"
#include "scnn/attack/cpa.hpp"
#include "scnn/attack/hpa.hpp"
#include "scnn/attack/weight_recovery.hpp"
#include "scnn/countermeasures.hpp"
#include "scnn/leakage.hpp"
#include "scnn/mlp.hpp"
#include "scnn/parallel.hpp"
#include "scnn/rng.hpp"

namespace scnn {

enum class AttackKind { CpaWeight, CpaWindow, ActivationPattern, HpaInput };

inline constexpr AttackKind kAllAttacks[] = {AttackKind::CpaWeight, AttackKind::CpaWindow,
                                             AttackKind::ActivationPattern, AttackKind::HpaInput};

constexpr std::string_view to_string(AttackKind a) noexcept {
    switch (a) {
    case AttackKind::CpaWeight:
        return "cpa-weight";
    case AttackKind::CpaWindow:
        return "cpa-window";
    case AttackKind::ActivationPattern:
        return "activation-pattern";
    case AttackKind::HpaInput:
        break;
    }
    return "hpa-input";
}

inline AttackKind parse_attack(std::string_view s) {
    for (auto a : kAllAttacks)
        if (to_string(a) == s)
            return a;
    throw UsageError("unknown attack '" + std::string(s) + "'");
}

struct EvaluationOptions {
    std::size_t trials = 20;
    std::size_t traces = 1000; // per trial, CPA attacks
    std::size_t hpa_neurons = 20;
    LeakageConfig leakage = noiseless();
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::vector<AttackKind> attacks{std::begin(kAllAttacks), std::end(kAllAttacks)};

    static LeakageConfig noiseless() {
        LeakageConfig c;
        c.noise_sigma = 0.0;
        return c;
    }
};

struct AttackOutcome {
    std::size_t trials = 0, successes = 0;
    double success_rate = 0;
    double samples_per_trace = 0; // mean over all simulated traces
    std::optional<double> traces_to_success; // median over successful trials

    friend bool operator==(const AttackOutcome &, const AttackOutcome &) = default;
};

struct DegradationEntry {
    AttackKind attack;
    AttackOutcome baseline, protected_;
    double overhead_samples() const { return protected_.samples_per_trace - baseline.samples_per_trace; }
};

struct DegradationReport {
    CountermeasureConfig countermeasures;
    EvaluationOptions options;
    std::vector<DegradationEntry> entries;

    const DegradationEntry &at(AttackKind a) const {
        for (const auto &e : entries)
            if (e.attack == a)
                return e;
        throw UsageError("attack not evaluated: " + std::string(to_string(a)));
    }
};

namespace detail {

struct TrialResult {
    bool success = false;
    double samples = 0; // summed trace lengths
    std::size_t traces = 0;
    std::optional<double> to_success;
};

inline NetworkDescription trial_network(std::size_t inputs, std::size_t neurons, ActivationKind kind,
                                        std::uint64_t seed) {
    auto net = random_network(make_architecture(inputs, {neurons}, kind, kind), WeightGrid{}, seed);
    // Zero weights leave nothing to correlate with; the attack targets
    // product 0 of every neuron.
    for (auto &row : net.layers[0].weights)
        if (row[0] == 0.0f)
            row[0] = 0.01f;
    return net;
}

inline void add_lengths(TrialResult &r, const TraceSet &ts) {
    for (const auto &t : ts.traces)
        r.samples += double(t.samples.size());
    r.traces += ts.size();
}

/// Weight 0 of the neuron whose products start at sample 0.
inline bool weight_hit(const TraceSet &ts, std::size_t rows, float truth, const LeakageConfig &cfg) {
    std::vector<std::size_t> idx(rows), off(rows, 0);
    std::vector<float> known(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        idx[i] = i;
        known[i] = ts.inputs[i][0];
    }
    WeightRecoveryOptions wo;
    wo.mul_amplitude = cfg.mul_amplitude;
    wo.samples_per_byte = cfg.samples_per_byte;
    const auto e = recover_weight(extract_windows(ts, idx, off, cfg.product_samples()), known, wo);
    return !e.zero_flag && e.value == truth;
}

inline TrialResult cpa_weight_trial(const EvaluationOptions &o, const CountermeasureConfig &cm, std::size_t trial,
                                    bool ladder) {
    const std::uint64_t s = mix64(o.seed ^ mix64(trial + 1));
    const auto net = trial_network(2, 1, ActivationKind::Sigmoid, s);
    LeakageConfig cfg = o.leakage;
    cfg.seed = s;
    CountermeasureConfig c = cm;
    c.seed = mix64(s ^ cm.seed);
    const auto ts = simulate_batch(net, uniform_inputs(o.traces, 2, s), cfg, c);
    TrialResult r;
    add_lengths(r, ts);
    const float truth = net.layers[0].weights[0][0];
    r.success = weight_hit(ts, ts.size(), truth, cfg);
    if (r.success && ladder) {
        for (std::size_t n = 25; n < o.traces; n *= 2)
            if (weight_hit(ts, n, truth, cfg)) {
                r.to_success = double(n);
                return r;
            }
        r.to_success = double(o.traces);
    }
    return r;
}

inline TrialResult cpa_window_trial(const EvaluationOptions &o, const CountermeasureConfig &cm, std::size_t trial) {
    const std::uint64_t s = mix64(o.seed ^ mix64(trial + 1001));
    const auto net = trial_network(2, 6, ActivationKind::Sigmoid, s);
    LeakageConfig cfg = o.leakage;
    cfg.seed = s;
    CountermeasureConfig c = cm;
    c.seed = mix64(s ^ cm.seed);
    const auto ts = simulate_batch(net, uniform_inputs(o.traces, 2, s), cfg, c);
    TrialResult r;
    add_lengths(r, ts);
    r.success = weight_hit(ts, ts.size(), net.layers[0].weights[0][0], cfg);
    return r;
}

inline TrialResult activation_trial(const EvaluationOptions &o, const CountermeasureConfig &cm, std::size_t trial) {
    static constexpr ActivationKind kKinds[] = {ActivationKind::ReLU, ActivationKind::Sigmoid, ActivationKind::Tanh};
    const std::uint64_t s = mix64(o.seed ^ mix64(trial + 2001));
    const ActivationKind kind = kKinds[trial % 3];
    const auto net = trial_network(2, 4, kind, s);
    LeakageConfig cfg = o.leakage;
    cfg.seed = s;
    CountermeasureConfig c = cm;
    c.seed = mix64(s ^ cm.seed);
    const std::size_t n = std::min<std::size_t>(o.traces, 200);
    const auto ts = simulate_batch(net, uniform_inputs(n, 2, s, -2.0, 2.0), cfg, c);
    TrialResult r;
    add_lengths(r, ts);
    // The timing channel in isolation: activation windows are taken from the
    // ground-truth regions and matched to neurons by the annotation.
    std::vector<double> d;
    std::vector<float> pre;
    for (std::size_t t = 0; t < ts.size(); ++t)
        for (const auto &a : ts.traces[t].annotations)
            if (a.kind == RegionKind::Act) {
                d.push_back(double(a.end - a.start) * cfg.time_unit_ns);
                const auto &w = net.layers[0].weights[a.neuron];
                pre.push_back(ts.inputs[t][0] * w[0] + ts.inputs[t][1] * w[1]);
            }
    ClassifierOptions co;
    co.allowed[std::size_t(ActivationKind::Softmax)] = false;
    r.success = classify_activation(d, pre, reference_timing_profiles(), 0, co).kind == kind;
    return r;
}

inline TrialResult hpa_trial(const EvaluationOptions &o, const CountermeasureConfig &cm, std::size_t trial) {
    const std::uint64_t s = mix64(o.seed ^ mix64(trial + 3001));
    const auto net = trial_network(2, o.hpa_neurons, ActivationKind::ReLU, s);
    LeakageConfig cfg = o.leakage;
    cfg.seed = s;
    CountermeasureConfig c = cm;
    c.seed = mix64(s ^ cm.seed);
    const auto x = uniform_inputs(1, 2, s);
    const auto ts = simulate_batch(net, x, cfg, c);
    TrialResult r;
    add_lengths(r, ts);
    // Regions in the order they appear; the attacker assumes neuron n runs nth.
    std::vector<std::size_t> off;
    for (const auto &a : ts.traces[0].annotations)
        if (a.kind == RegionKind::Mul && a.layer == 0)
            off.push_back(a.start);
    std::vector<float> w;
    for (std::size_t n = 0; n < o.hpa_neurons; ++n)
        w.push_back(net.layers[0].weights[n][0]);
    HpaOptions ho;
    ho.samples_per_byte = cfg.samples_per_byte;
    ho.mul_amplitude = cfg.mul_amplitude;
    const auto est = hpa_input_recovery(cut_subtraces(ts.traces[0].samples, off, cfg.product_samples()), w, ho);
    r.success = hpa_success(est.value, x[0][0]);
    return r;
}

inline AttackOutcome run_attack(AttackKind a, const EvaluationOptions &o, const CountermeasureConfig &cm) {
    std::vector<TrialResult> res(o.trials);
    parallel_for(o.trials, o.threads, [&](std::size_t t) {
        switch (a) {
        case AttackKind::CpaWeight:
            res[t] = cpa_weight_trial(o, cm, t, true);
            break;
        case AttackKind::CpaWindow:
            res[t] = cpa_window_trial(o, cm, t);
            break;
        case AttackKind::ActivationPattern:
            res[t] = activation_trial(o, cm, t);
            break;
        case AttackKind::HpaInput:
            res[t] = hpa_trial(o, cm, t);
            break;
        }
    });
    AttackOutcome out;
    out.trials = o.trials;
    double samples = 0;
    std::size_t traces = 0;
    std::vector<double> tts;
    for (const auto &r : res) {
        out.successes += r.success;
        samples += r.samples;
        traces += r.traces;
        if (r.to_success)
            tts.push_back(*r.to_success);
    }
    out.success_rate = o.trials ? double(out.successes) / double(o.trials) : 0.0;
    out.samples_per_trace = traces ? samples / double(traces) : 0.0;
    if (!tts.empty()) {
        std::sort(tts.begin(), tts.end());
        out.traces_to_success = tts[tts.size() / 2];
    }
    return out;
}

} // namespace detail

/// Runs every selected attack with countermeasures off and with `cm`.
inline DegradationReport evaluate(const CountermeasureConfig &cm, const EvaluationOptions &opt = {}) {
    if (opt.trials == 0)
        throw UsageError("evaluate: trials must be at least 1");
    if (opt.traces < 2)
        throw UsageError("evaluate: at least two traces per trial required");
    if (opt.hpa_neurons < 2)
        throw UsageError("evaluate: hpa needs at least two neurons");
    opt.leakage.validate();
    DegradationReport rep;
    rep.countermeasures = cm;
    rep.options = opt;
    const CountermeasureConfig off{false, false, false, cm.seed};
    for (auto a : opt.attacks) {
        DegradationEntry e{a, detail::run_attack(a, opt, off), {}};
        e.protected_ = detail::run_attack(a, opt, cm);
        rep.entries.push_back(e);
    }
    return rep;
}

} // namespace scnn
