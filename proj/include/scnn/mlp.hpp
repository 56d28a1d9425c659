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

// Multilayer perceptron description and an instrumented forward pass that
// records every elementary operation a leakage model needs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scnn/error.hpp"
#include "scnn/grid.hpp"
#include "scnn/rng.hpp"

namespace scnn {

enum class ActivationKind { ReLU, Sigmoid, Tanh, Softmax };

inline constexpr ActivationKind kAllActivations[] = {ActivationKind::ReLU, ActivationKind::Sigmoid,
                                                     ActivationKind::Tanh, ActivationKind::Softmax};

constexpr std::string_view to_string(ActivationKind k) noexcept {
    switch (k) {
    case ActivationKind::ReLU:
        return "relu";
    case ActivationKind::Sigmoid:
        return "sigmoid";
    case ActivationKind::Tanh:
        return "tanh";
    case ActivationKind::Softmax:
        return "softmax";
    }
    return "?";
}

inline ActivationKind parse_activation(std::string_view s) {
    for (auto k : kAllActivations)
        if (to_string(k) == s)
            return k;
    throw UsageError("unknown activation '" + std::string(s) + "'");
}

struct LayerSpec {
    std::size_t neurons = 0;
    ActivationKind activation = ActivationKind::ReLU;
    std::vector<std::vector<float>> weights; // [neurons][inputs]
    std::vector<float> bias;                 // [neurons]

    std::size_t inputs() const { return weights.empty() ? 0 : weights.front().size(); }

    friend bool operator==(const LayerSpec &, const LayerSpec &) = default;
};

struct NetworkDescription {
    std::size_t input_dim = 0;
    std::vector<LayerSpec> layers; // L1 ... L(N-1); the input layer L0 is implicit

    std::vector<std::size_t> layer_sizes() const {
        std::vector<std::size_t> s;
        for (const auto &l : layers)
            s.push_back(l.neurons);
        return s;
    }
    std::size_t neuron_count() const {
        std::size_t n = 0;
        for (const auto &l : layers)
            n += l.neurons;
        return n;
    }
    std::size_t connection_count() const {
        std::size_t n = 0, prev = input_dim;
        for (const auto &l : layers) {
            n += prev * l.neurons;
            prev = l.neurons;
        }
        return n;
    }

    /// Throws ValidationError naming the first inconsistent field.
    void validate() const {
        if (input_dim == 0)
            throw ValidationError("input_dim", "must be positive");
        if (layers.empty())
            throw ValidationError("layers", "at least one layer is required");
        std::size_t prev = input_dim;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto &layer = layers[l];
            const std::string at = "layers[" + std::to_string(l) + "]";
            if (layer.neurons == 0)
                throw ValidationError(at + ".neurons", "must be positive");
            if (layer.activation == ActivationKind::Softmax && l + 1 != layers.size())
                throw ValidationError(at + ".activation", "softmax is only valid on the output layer");
            if (layer.weights.size() != layer.neurons)
                throw ValidationError(at + ".weights", "expected " + std::to_string(layer.neurons) + " rows");
            for (std::size_t n = 0; n < layer.neurons; ++n) {
                const std::string row = at + ".weights[" + std::to_string(n) + "]";
                if (layer.weights[n].size() != prev)
                    throw ValidationError(row, "expected " + std::to_string(prev) + " columns");
                for (float w : layer.weights[n])
                    if (!std::isfinite(w))
                        throw ValidationError(row, "non-finite weight");
            }
            if (layer.bias.size() != layer.neurons)
                throw ValidationError(at + ".bias", "expected " + std::to_string(layer.neurons) + " entries");
            for (float b : layer.bias)
                if (!std::isfinite(b))
                    throw ValidationError(at + ".bias", "non-finite bias");
            prev = layer.neurons;
        }
    }

    friend bool operator==(const NetworkDescription &, const NetworkDescription &) = default;
};

// ---------------------------------------------------------------------------
// Execution log

struct MulStore {
    std::size_t layer, neuron, input_index;
    float input, weight, product;
};

struct ActEval {
    std::size_t layer, neuron;
    float input; // pre-activation
    ActivationKind kind;
    float output;
};

struct SoftmaxEval {
    std::size_t layer;
    std::vector<float> inputs, outputs;
};

using ExecutionEvent = std::variant<MulStore, ActEval, SoftmaxEval>;

struct ExecutionLog {
    std::vector<ExecutionEvent> events;

    std::size_t mul_count() const {
        return std::size_t(std::count_if(events.begin(), events.end(),
                                         [](const auto &e) { return std::holds_alternative<MulStore>(e); }));
    }
};

struct ForwardResult {
    std::vector<float> output;
    ExecutionLog log;
};

// ---------------------------------------------------------------------------
// Activations. Evaluated in double and rounded once to binary32.

inline float activate(ActivationKind kind, float x) {
    const double v = x;
    switch (kind) {
    case ActivationKind::ReLU:
        return x > 0.0f ? x : 0.0f;
    case ActivationKind::Sigmoid:
        return float(1.0 / (1.0 + std::exp(-v)));
    case ActivationKind::Tanh:
        return float(2.0 / (1.0 + std::exp(-2.0 * v)) - 1.0);
    case ActivationKind::Softmax:
        break;
    }
    throw UsageError("activate: softmax is vector-valued, use softmax()");
}

inline std::vector<float> softmax(std::span<const float> x) {
    if (x.empty())
        throw UsageError("softmax: empty input");
    const double hi = *std::max_element(x.begin(), x.end());
    std::vector<double> e(x.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        e[i] = std::exp(double(x[i]) - hi);
        sum += e[i];
    }
    std::vector<float> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = float(e[i] / sum);
    return out;
}

/// Forward pass with a caller-chosen neuron processing order per layer.
/// order(layer, n) must return a permutation of [0, n).
template <class OrderFn>
ForwardResult forward_ordered(const NetworkDescription &net, std::span<const float> input, OrderFn &&order) {
    if (input.size() != net.input_dim)
        throw UsageError("forward: input has " + std::to_string(input.size()) + " components, network expects " +
                         std::to_string(net.input_dim));
    for (float v : input)
        if (!std::isfinite(v))
            throw UsageError("forward: non-finite input");

    ForwardResult r;
    r.log.events.reserve(net.connection_count() + net.neuron_count());
    std::vector<float> cur(input.begin(), input.end());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto &layer = net.layers[l];
        if (layer.inputs() != cur.size())
            throw UsageError("forward: layer " + std::to_string(l) + " dimension mismatch");
        const std::vector<std::size_t> perm = order(l, layer.neurons);
        std::vector<float> pre(layer.neurons), out(layer.neurons);
        for (std::size_t n : perm) {
            float acc = 0.0f;
            for (std::size_t i = 0; i < cur.size(); ++i) {
                const float w = layer.weights[n][i];
                const float m = cur[i] * w;
                r.log.events.emplace_back(MulStore{l, n, i, cur[i], w, m});
                acc += m;
            }
            pre[n] = acc + layer.bias[n];
            if (layer.activation != ActivationKind::Softmax) {
                out[n] = activate(layer.activation, pre[n]);
                r.log.events.emplace_back(ActEval{l, n, pre[n], layer.activation, out[n]});
            }
        }
        if (layer.activation == ActivationKind::Softmax) {
            out = softmax(pre);
            r.log.events.emplace_back(SoftmaxEval{l, pre, out});
        }
        cur = std::move(out);
    }
    r.output = std::move(cur);
    return r;
}

inline std::vector<std::size_t> identity_order(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return p;
}

inline ForwardResult forward(const NetworkDescription &net, std::span<const float> input) {
    return forward_ordered(net, input, [](std::size_t, std::size_t n) { return identity_order(n); });
}

/// Outputs only; skips building the log.
inline std::vector<float> infer(const NetworkDescription &net, std::span<const float> input) {
    return forward(net, input).output;
}

// ---------------------------------------------------------------------------
// Network generation

struct ArchitectureSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> sizes;
    std::vector<ActivationKind> activations; // one per layer
};

/// Weights uniform over the grid {-N, ..., N} step p; biases zero.
inline NetworkDescription random_network(const ArchitectureSpec &spec, const WeightGrid &grid, std::uint64_t seed) {
    grid.validate();
    if (spec.sizes.size() != spec.activations.size())
        throw UsageError("random_network: one activation per layer required");
    NetworkDescription net;
    net.input_dim = spec.input_dim;
    Rng rng = derive_rng(seed, 0, kNetworkStream);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    std::size_t prev = spec.input_dim;
    for (std::size_t l = 0; l < spec.sizes.size(); ++l) {
        LayerSpec layer;
        layer.neurons = spec.sizes[l];
        layer.activation = spec.activations[l];
        layer.weights.assign(layer.neurons, std::vector<float>(prev));
        for (auto &row : layer.weights)
            for (auto &w : row)
                w = grid.value(pick(rng));
        layer.bias.assign(layer.neurons, 0.0f);
        net.layers.push_back(std::move(layer));
        prev = spec.sizes[l];
    }
    net.validate();
    return net;
}

/// Convenience: all hidden layers use `hidden`, the last layer uses `output`.
inline ArchitectureSpec make_architecture(std::size_t input_dim, std::vector<std::size_t> sizes, ActivationKind hidden,
                                          ActivationKind output) {
    ArchitectureSpec spec{input_dim, std::move(sizes), {}};
    for (std::size_t i = 0; i < spec.sizes.size(); ++i)
        spec.activations.push_back(i + 1 == spec.sizes.size() ? output : hidden);
    return spec;
}

} // namespace scnn
