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

// Layer-by-layer recovery of an unknown network from an oracle that returns
// traces for chosen inputs.
//
// Every trace is split into (mul, act) regions. Regions are consumed in
// order; each one is a neuron whose product count is its fan-in, except a
// region whose activation window is longer than any scalar activation, which
// holds a whole softmax output layer. Before a neuron is accepted into the
// current layer the boundary test decides whether its products use the
// current layer's inputs or the outputs computed so far. Recovered weights
// turn known inputs into the next layer's known inputs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scnn/attack/activation_classifier.hpp"
#include "scnn/attack/cpa.hpp"
#include "scnn/attack/layer_boundary.hpp"
#include "scnn/attack/spa.hpp"
#include "scnn/attack/weight_recovery.hpp"
#include "scnn/leakage.hpp"
#include "scnn/mlp.hpp"
#include "scnn/parallel.hpp"

namespace scnn {

/// Query access to a device: traces for attacker-chosen inputs.
class Oracle {
  public:
    virtual ~Oracle() = default;
    virtual std::size_t input_dim() const = 0;
    virtual TraceSet query(const std::vector<std::vector<float>> &inputs) = 0;
};

struct OracleQuery {
    std::size_t first_trace = 0, count = 0;
};

/// Simulator-backed oracle. Annotations are stripped before traces are
/// returned and every query is logged.
class SimulatedOracle : public Oracle {
  public:
    SimulatedOracle(NetworkDescription net, LeakageConfig cfg, CountermeasureConfig cm = {}, std::size_t threads = 1,
                    TimingProfiles timing = reference_timing_profiles())
        : net_(std::move(net)), cfg_(cfg), cm_(cm), threads_(threads), timing_(timing) {
        net_.validate();
        cfg_.validate();
    }

    std::size_t input_dim() const override { return net_.input_dim; }

    TraceSet query(const std::vector<std::vector<float>> &inputs) override {
        TraceSet ts;
        ts.config = cfg_;
        ts.countermeasures = cm_;
        ts.inputs = inputs;
        ts.traces.resize(inputs.size());
        const std::size_t first = issued_;
        parallel_for(inputs.size(), threads_, [&](std::size_t i) {
            ts.traces[i] = simulate_trace(net_, inputs[i], cfg_, first + i, cm_, timing_);
            ts.traces[i].annotations.clear();
        });
        audit_.push_back({first, inputs.size()});
        issued_ += inputs.size();
        return ts;
    }

    const std::vector<OracleQuery> &audit() const { return audit_; }

  private:
    NetworkDescription net_;
    LeakageConfig cfg_;
    CountermeasureConfig cm_;
    std::size_t threads_;
    TimingProfiles timing_;
    std::size_t issued_ = 0;
    std::vector<OracleQuery> audit_;
};

// ---------------------------------------------------------------------------

struct RecoveryOptions {
    std::size_t budget = 1000; // traces queried
    std::uint64_t input_seed = 1;
    double input_lo = -1.0, input_hi = 1.0;
    /// Each query row is scaled by 2^-k, k uniform in [0, input_octaves].
    /// Spreading input magnitudes keeps hidden activations from saturating,
    /// which would otherwise leave HW-equivalent weight aliases unresolved.
    unsigned input_octaves = 0;
    WeightGrid grid;
    double margin = 0.05;
    std::size_t boundary_probes = 3; // product indices tried by the boundary test
    TimingProfiles timing = reference_timing_profiles();
    ClassifierOptions classifier;
    std::size_t threads = 1;
};

struct RecoveredWeight {
    float value = 0;
    WeightPrecision precision = WeightPrecision::Full;
    bool conclusive = false;
    bool zero_flag = false;
    double peak = 0, margin = 0;
    std::vector<float> alternatives; // equally good for the stored bytes
    bool timing_resolved = false;    // picked among alternatives by activation timing
};

struct LayerReport {
    std::size_t neurons = 0;
    ActivationKind activation = ActivationKind::ReLU;
    ActivationClassification classification;
    std::vector<std::vector<RecoveredWeight>> weights; // [neuron][input]
    std::size_t first_region = 0;
};

struct BoundaryStep {
    std::size_t region = 0;
    BoundaryDecision decision = BoundaryDecision::Inconclusive;
    std::string method; // "cpa", "fan-in", "softmax"
    double peak_same = 0, peak_next = 0, margin = 0;
    std::size_t probe = 0; // product index used by the cpa test
};

struct RecoveryReport {
    std::size_t input_dim = 0;
    std::size_t traces_queried = 0, traces_used = 0;
    LeakageConfig config;
    std::vector<LayerReport> layers;
    std::vector<BoundaryStep> boundaries;
    std::uint64_t hypothesis_evaluations = 0;
    std::size_t inconclusive_weights = 0, inconclusive_boundaries = 0;
    std::size_t zero_weights = 0; // products always zero: value 0, flagged
    bool aborted = false;
    std::vector<std::string> notes;

    std::vector<std::size_t> layer_sizes() const {
        std::vector<std::size_t> s;
        for (const auto &l : layers)
            s.push_back(l.neurons);
        return s;
    }

    /// Recovered network with zero biases.
    NetworkDescription network() const {
        NetworkDescription net;
        net.input_dim = input_dim;
        for (const auto &l : layers) {
            LayerSpec s;
            s.neurons = l.neurons;
            s.activation = l.activation;
            for (const auto &row : l.weights) {
                std::vector<float> w;
                for (const auto &x : row)
                    w.push_back(x.value);
                s.weights.push_back(std::move(w));
            }
            s.bias.assign(l.neurons, 0.0f);
            net.layers.push_back(std::move(s));
        }
        return net;
    }

    bool conclusive() const { return !aborted && inconclusive_weights == 0 && inconclusive_boundaries == 0; }
};

/// Largest absolute output difference over `inputs`.
inline double max_output_difference(const NetworkDescription &a, const NetworkDescription &b,
                                    const std::vector<std::vector<float>> &inputs) {
    double d = 0;
    for (const auto &x : inputs) {
        const auto ya = infer(a, x), yb = infer(b, x);
        if (ya.size() != yb.size())
            return std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ya.size(); ++i)
            d = std::max(d, double(std::abs(ya[i] - yb[i])));
    }
    return d;
}

namespace detail {

using Column = std::vector<float>; // one value per kept trace

inline bool varies(const Column &c) {
    return std::any_of(c.begin(), c.end(), [&](float v) { return v != c.front(); });
}

struct NeuronState {
    std::vector<float> w;
    std::vector<RecoveredWeight> rec;
    std::size_t region = 0;
};

struct LayerState {
    std::vector<Column> x; // known inputs, one column per input component
    std::vector<NeuronState> neurons;
    std::size_t first_region = 0;
    std::size_t fanin() const { return x.size(); }
};

/// Pre-activation of one neuron for every trace, accumulated like forward().
inline Column pre_activation(const LayerState &L, const std::vector<float> &w) {
    const std::size_t rows = L.x.empty() ? 0 : L.x.front().size();
    Column pre(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        float acc = 0.0f;
        for (std::size_t i = 0; i < w.size(); ++i)
            acc += L.x[i][r] * w[i];
        pre[r] = acc + 0.0f;
    }
    return pre;
}

inline RecoveredWeight to_recovered(const WeightEstimate &e) {
    return {e.value, e.precision, e.conclusive, e.zero_flag, e.peak, e.margin, e.alternatives, false};
}

} // namespace detail

class NetworkRecovery {
  public:
    NetworkRecovery(const TraceSet &ts, const RecoveryOptions &opt, HypothesisCounter &counter)
        : ts_(ts), opt_(opt), counter_(counter), spb_(ts.config.samples_per_byte),
          product_len_(ts.config.product_samples()) {
        wopt_.grid = opt.grid;
        wopt_.margin = opt.margin;
        wopt_.mul_amplitude = ts.config.mul_amplitude;
        wopt_.samples_per_byte = spb_;
        wopt_.threads = opt.threads;
        wopt_.counter = &counter_;
    }

    RecoveryReport run(std::size_t input_dim) {
        report_.input_dim = input_dim;
        report_.config = ts_.config;
        report_.traces_queried = ts_.size();
        segment();
        report_.traces_used = rows_.size();
        if (rows_.empty()) {
            abort("no trace could be segmented");
            return finish();
        }

        LayerState layer;
        layer.x.resize(input_dim);
        for (std::size_t i = 0; i < input_dim; ++i)
            for (auto r : rows_)
                layer.x[i].push_back(ts_.inputs[r][i]);

        for (std::size_t k = 0; k < products_.size() && !report_.aborted; ++k) {
            const std::size_t P = products_[k];
            if (softmax_like_[k]) {
                if (!layer.neurons.empty()) {
                    auto y = finalize(layer);
                    layer = next_layer(std::move(y), k);
                }
                report_.boundaries.push_back({k, BoundaryDecision::NextLayer, "softmax", 0, 0, 0, 0});
                softmax_layer(layer, k, P);
                if (k + 1 != products_.size())
                    abort("regions follow a softmax output layer");
                return finish();
            }
            if (layer.neurons.empty()) {
                if (P != layer.fanin()) {
                    abort("region " + std::to_string(k) + " has " + std::to_string(P) + " products, expected " +
                          std::to_string(layer.fanin()));
                    break;
                }
                layer.first_region = k;
                add_neuron(layer, k, {});
                continue;
            }
            const bool same_ok = P == layer.fanin(), next_ok = P == layer.neurons.size();
            bool next = false;
            std::map<std::size_t, WeightEstimate> reuse;
            if (same_ok && next_ok) {
                next = cpa_boundary(layer, k, reuse);
            } else if (same_ok || next_ok) {
                next = next_ok;
                report_.boundaries.push_back(
                    {k, next ? BoundaryDecision::NextLayer : BoundaryDecision::SameLayer, "fan-in", 0, 0, 0, 0});
            } else {
                abort("region " + std::to_string(k) + " has " + std::to_string(P) +
                      " products, consistent with neither the current nor a new layer");
                break;
            }
            if (next) {
                auto y = finalize(layer);
                layer = next_layer(std::move(y), k);
            }
            add_neuron(layer, k, reuse);
        }
        if (!layer.neurons.empty())
            finalize(layer);
        return finish();
    }

  private:
    using LayerState = detail::LayerState;
    using Column = detail::Column;

    void abort(std::string why) {
        report_.aborted = true;
        report_.notes.push_back(std::move(why));
    }

    RecoveryReport finish() {
        report_.hypothesis_evaluations = counter_.value();
        for (const auto &l : report_.layers)
            for (const auto &row : l.weights)
                for (const auto &w : row) {
                    report_.zero_weights += w.zero_flag;
                    report_.inconclusive_weights += !w.conclusive && !w.zero_flag;
                }
        for (const auto &b : report_.boundaries)
            report_.inconclusive_boundaries += b.decision == BoundaryDecision::Inconclusive;
        return std::move(report_);
    }

    /// SPA on every trace; keeps traces whose region layout (product count
    /// per region, softmax marks) matches the most common one.
    void segment() {
        const SpaParams sp = SpaParams::from_config(ts_.config);
        const double scalar_max = std::max({opt_.timing.envelope(ActivationKind::ReLU).max_ns,
                                            opt_.timing.envelope(ActivationKind::Sigmoid).max_ns,
                                            opt_.timing.envelope(ActivationKind::Tanh).max_ns});
        std::vector<std::vector<SpaPair>> all(ts_.size());
        std::vector<std::vector<std::size_t>> sig(ts_.size());
        parallel_for(ts_.size(), opt_.threads, [&](std::size_t t) {
            all[t] = spa_segment(ts_.traces[t].samples, sp);
            for (const auto &p : all[t]) {
                const std::size_t n = (p.mul.size() + product_len_ / 2) / product_len_;
                const bool soft = double(p.act.size()) * ts_.config.time_unit_ns > 1.05 * scalar_max;
                sig[t].push_back(2 * n + soft);
            }
        });
        std::map<std::vector<std::size_t>, std::size_t> votes;
        for (const auto &s : sig)
            if (!s.empty())
                ++votes[s];
        if (votes.empty())
            return;
        const auto best = std::max_element(votes.begin(), votes.end(),
                                           [](const auto &a, const auto &b) { return a.second < b.second; });
        for (auto v : best->first) {
            products_.push_back(v / 2);
            softmax_like_.push_back(v % 2 == 1);
        }
        for (std::size_t t = 0; t < ts_.size(); ++t)
            if (sig[t] == best->first) {
                rows_.push_back(t);
                pairs_.push_back(std::move(all[t]));
            }
        if (rows_.size() < ts_.size())
            report_.notes.push_back(std::to_string(ts_.size() - rows_.size()) +
                                    " traces dropped with a non-majority region layout");
    }

    LeakageMatrix leak(std::size_t region, std::size_t product) const {
        std::vector<std::size_t> offs(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i)
            offs[i] = pairs_[i][region].mul.start + product * product_len_;
        return extract_windows(ts_, rows_, offs, product_len_);
    }

    std::vector<double> durations(std::size_t region) const {
        std::vector<double> d;
        for (const auto &p : pairs_)
            d.push_back(double(p[region].act.size()) * ts_.config.time_unit_ns);
        return d;
    }

    ActivationClassification classify(const LayerState &L) const {
        std::vector<double> d;
        std::vector<float> in;
        for (const auto &n : L.neurons) {
            auto dn = durations(n.region);
            d.insert(d.end(), dn.begin(), dn.end());
            auto pre = detail::pre_activation(L, n.w);
            in.insert(in.end(), pre.begin(), pre.end());
        }
        ClassifierOptions co = opt_.classifier;
        co.allowed[std::size_t(ActivationKind::Softmax)] = false;
        return classify_activation(d, in, opt_.timing, 0, co);
    }

    std::vector<Column> outputs(const LayerState &L, ActivationKind kind) const {
        std::vector<Column> y;
        for (const auto &n : L.neurons) {
            auto pre = detail::pre_activation(L, n.w);
            for (auto &v : pre)
                v = activate(kind, v);
            y.push_back(std::move(pre));
        }
        return y;
    }

    void add_neuron(LayerState &L, std::size_t region, const std::map<std::size_t, WeightEstimate> &reuse) {
        detail::NeuronState n;
        n.region = region;
        for (std::size_t j = 0; j < L.fanin(); ++j) {
            const auto it = reuse.find(j);
            const WeightEstimate e = it != reuse.end() ? it->second : recover_weight(leak(region, j), L.x[j], wopt_);
            n.w.push_back(e.value);
            n.rec.push_back(detail::to_recovered(e));
        }
        L.neurons.push_back(std::move(n));
    }

    /// Returns true for "next layer". Estimates computed for the winning
    /// hypothesis are handed back through `reuse`.
    bool cpa_boundary(const LayerState &L, std::size_t region, std::map<std::size_t, WeightEstimate> &reuse) {
        const auto cls = classify(L);
        const auto y = outputs(L, cls.kind);
        BoundaryStep best{region, BoundaryDecision::Inconclusive, "cpa", 0, 0, -1, 0};
        BoundaryResult best_r;
        std::size_t tried = 0;
        for (std::size_t j = 0; j < L.fanin() && tried < opt_.boundary_probes; ++j) {
            if (!detail::varies(L.x[j]) || !detail::varies(y[j]))
                continue;
            ++tried;
            auto r = layer_boundary_test(leak(region, j), L.x[j], y[j], wopt_, opt_.margin);
            if (r.margin > best.margin) {
                best = {region, r.decision, "cpa", r.peak_same, r.peak_next, r.margin, j};
                best_r = r;
            }
            if (r.decision != BoundaryDecision::Inconclusive)
                break;
        }
        if (tried == 0) {
            best.margin = 0;
            report_.notes.push_back("region " + std::to_string(region) + ": no product index usable for the boundary test");
            report_.boundaries.push_back(best);
            return false;
        }
        report_.boundaries.push_back(best);
        const bool next = best_r.leaning == BoundaryDecision::NextLayer;
        reuse[best.probe] = next ? best_r.next : best_r.same;
        return next;
    }

    /// Activation window length in samples the timing model predicts for
    /// every kept trace.
    std::vector<std::size_t> predicted_lengths(ActivationKind kind, const Column &z, std::size_t outputs = 0) const {
        const auto env = opt_.timing.envelope(kind, outputs);
        std::vector<std::size_t> n(z.size());
        for (std::size_t r = 0; r < z.size(); ++r)
            n[r] = activation_samples(opt_.timing.duration(kind, z[r], outputs), env, ts_.config.time_unit_ns);
        return n;
    }

    double timing_cost(std::size_t region, const std::vector<std::size_t> &pred) const {
        double c = 0;
        for (std::size_t r = 0; r < pred.size(); ++r) {
            const double d = double(pairs_[r][region].act.size()) - double(pred[r]);
            c += std::min(d * d, 16.0); // a few samples of SPA error per trace at most
        }
        return c;
    }

    /// Search over the level-model alternatives: the weights move to another
    /// combination only when that clearly improves the match between observed
    /// and predicted activation durations. `cost` maps the current weights to
    /// that mismatch. Small combination counts are searched exhaustively,
    /// larger ones coordinate-wise.
    template <class Cost> void resolve_aliases(std::vector<std::vector<RecoveredWeight> *> rows, Cost &&cost) {
        std::vector<RecoveredWeight *> vars;
        std::size_t combos = 1;
        for (auto *row : rows)
            for (auto &w : *row)
                if (!w.alternatives.empty()) {
                    vars.push_back(&w);
                    combos = combos > kExhaustiveLimit ? combos : combos * (w.alternatives.size() + 1);
                }
        if (vars.empty())
            return;
        const double base = cost();
        // Choice 0 is the current value, choice k > 0 alternative k - 1.
        auto set = [&](RecoveredWeight &w, std::size_t from, std::size_t to) {
            if (from != to) {
                if (from)
                    std::swap(w.value, w.alternatives[from - 1]);
                if (to)
                    std::swap(w.value, w.alternatives[to - 1]);
            }
        };
        std::vector<std::size_t> cur(vars.size(), 0), best_choice(vars.size(), 0);
        double best = base;
        if (combos <= kExhaustiveLimit) {
            for (std::size_t code = 1; code < combos; ++code) {
                std::size_t c = code;
                for (std::size_t v = 0; v < vars.size(); ++v) {
                    const std::size_t k = vars[v]->alternatives.size() + 1, next = c % k;
                    c /= k;
                    set(*vars[v], cur[v], next);
                    cur[v] = next;
                }
                const double e = cost();
                if (e < best) {
                    best = e;
                    best_choice = cur;
                }
            }
            if (!(best < 0.8 * base))
                best_choice.assign(vars.size(), 0);
            for (std::size_t v = 0; v < vars.size(); ++v) {
                set(*vars[v], cur[v], best_choice[v]);
                vars[v]->timing_resolved = best_choice[v] != 0;
            }
            return;
        }
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t v = 0; v < vars.size(); ++v)
                for (std::size_t k = 0; k <= vars[v]->alternatives.size(); ++k) {
                    if (k == cur[v])
                        continue;
                    const std::size_t was = cur[v];
                    set(*vars[v], was, k);
                    const double e = cost();
                    if (e < 0.8 * best) {
                        best = e;
                        cur[v] = k;
                    } else {
                        set(*vars[v], k, was);
                    }
                }
        for (std::size_t v = 0; v < vars.size(); ++v)
            vars[v]->timing_resolved = cur[v] != 0;
    }

    /// Aliases of a scalar-activation layer, neuron by neuron.
    void resolve_layer_aliases(LayerState &L, ActivationKind kind) {
        if (kind == ActivationKind::ReLU && !opt_.timing[kind].constant_time)
            return; // no modelled input dependence
        for (auto &n : L.neurons) {
            auto weights = [&] {
                std::vector<float> w;
                for (const auto &x : n.rec)
                    w.push_back(x.value);
                return w;
            };
            resolve_aliases({&n.rec}, [&] {
                return timing_cost(n.region, predicted_lengths(kind, detail::pre_activation(L, weights())));
            });
            n.w = weights();
        }
    }

    /// Weight aliases bend the duration pattern, so each kind that the
    /// statistics allow is scored after resolving aliases under that kind.
    void choose_kind_with_aliases(LayerState &L, LayerReport &lr) {
        const auto &c = lr.classification;
        if (!c.pattern_used) {
            resolve_layer_aliases(L, lr.activation);
            return;
        }
        const std::size_t first = std::size_t(lr.activation);
        std::array<double, 4> score;
        score.fill(-std::numeric_limits<double>::infinity());
        std::array<std::optional<LayerState>, 4> trial;
        std::array<ActivationClassification, 4> cls;
        for (std::size_t k = 0; k < 4; ++k) {
            const auto kind = kAllActivations[k];
            if (kind == ActivationKind::Softmax || !opt_.classifier.allowed[k] ||
                c.stats_distance[k] > c.stats_distance[first] + opt_.classifier.pattern_band)
                continue;
            trial[k] = L;
            resolve_layer_aliases(*trial[k], kind);
            cls[k] = classify(*trial[k]);
            score[k] = cls[k].pattern_score[k];
        }
        std::size_t top = first;
        for (std::size_t k = 0; k < 4; ++k)
            if (score[k] > score[top])
                top = k;
        if (top != first && score[top] - score[first] < opt_.classifier.tie_epsilon)
            top = first; // tie: the statistics winner stands
        L = std::move(*trial[top]);
        lr.classification = cls[top];
        lr.classification.kind = kAllActivations[top];
        lr.classification.distance = c.stats_distance[top];
        lr.activation = kAllActivations[top];
    }

    /// Closes the layer: classifies its activation and returns its outputs.
    std::vector<Column> finalize(LayerState &L) {
        LayerReport lr;
        lr.neurons = L.neurons.size();
        lr.first_region = L.first_region;
        lr.classification = classify(L);
        lr.activation = lr.classification.kind;
        choose_kind_with_aliases(L, lr);
        for (auto &n : L.neurons)
            lr.weights.push_back(n.rec);
        auto y = outputs(L, lr.activation);
        report_.layers.push_back(std::move(lr));
        return y;
    }

    LayerState next_layer(std::vector<Column> y, std::size_t region) const {
        LayerState n;
        n.x = std::move(y);
        n.first_region = region;
        return n;
    }

    void softmax_layer(LayerState &L, std::size_t region, std::size_t P) {
        const std::size_t f = L.fanin();
        if (f == 0 || P % f != 0) {
            abort("softmax region " + std::to_string(region) + " product count is not a multiple of the fan-in");
            return;
        }
        const std::size_t K = P / f;
        LayerReport lr;
        lr.neurons = K;
        lr.first_region = region;
        lr.activation = ActivationKind::Softmax;
        for (std::size_t n = 0; n < K; ++n) {
            std::vector<RecoveredWeight> row;
            std::vector<float> w;
            for (std::size_t j = 0; j < f; ++j) {
                const auto e = recover_weight(leak(region, n * f + j), L.x[j], wopt_);
                w.push_back(e.value);
                row.push_back(detail::to_recovered(e));
            }
            lr.weights.push_back(std::move(row));
        }
        auto mean_pre = [&] {
            std::vector<Column> p;
            for (const auto &row : lr.weights) {
                std::vector<float> w;
                for (const auto &x : row)
                    w.push_back(x.value);
                p.push_back(detail::pre_activation(L, w));
            }
            Column mean(rows_.size(), 0.0f);
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                double s = 0;
                for (std::size_t n = 0; n < K; ++n)
                    s += p[n][r];
                mean[r] = float(s / double(K));
            }
            return mean;
        };
        std::vector<std::vector<RecoveredWeight> *> rows;
        for (auto &row : lr.weights)
            rows.push_back(&row);
        resolve_aliases(rows, [&] {
            return timing_cost(region, predicted_lengths(ActivationKind::Softmax, mean_pre(), K));
        });
        const auto mean = mean_pre();
        lr.classification = classify_activation(durations(region), mean, opt_.timing, K, opt_.classifier);
        if (lr.classification.kind != ActivationKind::Softmax)
            report_.notes.push_back("output region timing classified as " +
                                    std::string(to_string(lr.classification.kind)) + ", layout implies softmax");
        report_.layers.push_back(std::move(lr));
    }

    static constexpr std::size_t kExhaustiveLimit = 4096;

    const TraceSet &ts_;
    RecoveryOptions opt_;
    HypothesisCounter &counter_;
    WeightRecoveryOptions wopt_;
    std::size_t spb_, product_len_;
    std::vector<std::size_t> rows_;             // kept trace indices
    std::vector<std::vector<SpaPair>> pairs_;   // per kept trace
    std::vector<std::size_t> products_;         // per region
    std::vector<bool> softmax_like_;            // per region
    RecoveryReport report_;
};

/// Recovery from an already captured trace set.
inline RecoveryReport recover_from_traces(const TraceSet &ts, std::size_t input_dim, const RecoveryOptions &opt = {}) {
    if (ts.inputs.size() != ts.size())
        throw UsageError("recover: one known input per trace required");
    for (const auto &x : ts.inputs)
        if (x.size() != input_dim)
            throw UsageError("recover: input rows must have input_dim components");
    HypothesisCounter counter;
    return NetworkRecovery(ts, opt, counter).run(input_dim);
}

/// Queries `opt.budget` traces for uniform random inputs and recovers the
/// network behind the oracle.
inline RecoveryReport reverse_engineer(Oracle &oracle, const RecoveryOptions &opt = {}) {
    if (opt.budget < 2)
        throw UsageError("reverse_engineer: budget must be at least 2 traces");
    auto inputs = uniform_inputs(opt.budget, oracle.input_dim(), opt.input_seed, opt.input_lo, opt.input_hi);
    if (opt.input_octaves > 0) {
        Rng rng = derive_rng(opt.input_seed, 1, kInputStream);
        std::uniform_int_distribution<unsigned> k(0, opt.input_octaves);
        for (auto &row : inputs) {
            const float s = std::ldexp(1.0f, -int(k(rng)));
            for (auto &v : row)
                v *= s;
        }
    }
    const TraceSet ts = oracle.query(inputs);
    return recover_from_traces(ts, oracle.input_dim(), opt);
}

} // namespace scnn
