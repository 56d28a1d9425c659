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

// Network JSON schema:
//   { "input_dim": n,
//     "layers": [ { "neurons": k, "activation": "relu"|"sigmoid"|"tanh"|"softmax",
//                   "weights": [[...], ...],   // k rows of previous-layer width
//                   "bias": [...] }, ... ] }

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "scnn/error.hpp"
#include "scnn/leakage.hpp"
#include "scnn/mlp.hpp"

namespace scnn {

using json = nlohmann::json;

namespace detail {

inline const json &require(const json &obj, const std::string &key, const std::string &path) {
    if (!obj.is_object() || !obj.contains(key))
        throw ValidationError(path.empty() ? key : path + "." + key, "missing field");
    return obj.at(key);
}

inline std::size_t require_count(const json &v, const std::string &path, bool allow_zero = false) {
    if (!v.is_number_integer() || v.get<long long>() < (allow_zero ? 0 : 1))
        throw ValidationError(path, allow_zero ? "expected a non-negative integer" : "expected a positive integer");
    return v.get<std::size_t>();
}

inline float require_float(const json &v, const std::string &path) {
    if (!v.is_number())
        throw ValidationError(path, "expected a number");
    return v.get<float>();
}

inline std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path.string(), "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError(path.string(), "cannot open for writing");
    out << text;
    if (!out)
        throw IoError(path.string(), "write failed");
}

} // namespace detail

inline json network_to_json(const NetworkDescription &net) {
    json j;
    j["input_dim"] = net.input_dim;
    j["layers"] = json::array();
    for (const auto &l : net.layers) {
        j["layers"].push_back({{"neurons", l.neurons},
                               {"activation", std::string(to_string(l.activation))},
                               {"weights", l.weights},
                               {"bias", l.bias}});
    }
    return j;
}

/// Parses and validates; ValidationError::field() names the offending field.
inline NetworkDescription network_from_json(const json &j) {
    NetworkDescription net;
    net.input_dim = detail::require_count(detail::require(j, "input_dim", ""), "input_dim");
    const json &layers = detail::require(j, "layers", "");
    if (!layers.is_array())
        throw ValidationError("layers", "expected an array");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string at = "layers[" + std::to_string(l) + "]";
        const json &lj = layers[l];
        LayerSpec layer;
        layer.neurons = detail::require_count(detail::require(lj, "neurons", at), at + ".neurons");
        const json &act = detail::require(lj, "activation", at);
        if (!act.is_string())
            throw ValidationError(at + ".activation", "expected a string");
        try {
            layer.activation = parse_activation(act.get<std::string>());
        } catch (const UsageError &e) {
            throw ValidationError(at + ".activation", e.what());
        }
        const json &w = detail::require(lj, "weights", at);
        if (!w.is_array())
            throw ValidationError(at + ".weights", "expected an array of rows");
        for (std::size_t r = 0; r < w.size(); ++r) {
            const std::string row = at + ".weights[" + std::to_string(r) + "]";
            if (!w[r].is_array())
                throw ValidationError(row, "expected an array");
            std::vector<float> values;
            for (std::size_t c = 0; c < w[r].size(); ++c)
                values.push_back(detail::require_float(w[r][c], row + "[" + std::to_string(c) + "]"));
            layer.weights.push_back(std::move(values));
        }
        if (lj.contains("bias")) {
            const json &b = lj.at("bias");
            if (!b.is_array())
                throw ValidationError(at + ".bias", "expected an array");
            for (std::size_t i = 0; i < b.size(); ++i)
                layer.bias.push_back(detail::require_float(b[i], at + ".bias[" + std::to_string(i) + "]"));
        } else {
            layer.bias.assign(layer.neurons, 0.0f);
        }
        net.layers.push_back(std::move(layer));
    }
    net.validate();
    return net;
}

inline void save_network(const NetworkDescription &net, const std::filesystem::path &path) {
    net.validate();
    detail::write_text(path, network_to_json(net).dump(2) + "\n");
}

inline NetworkDescription load_network(const std::filesystem::path &path) {
    json j;
    try {
        j = json::parse(detail::read_text(path));
    } catch (const json::parse_error &e) {
        throw CorruptFileError(path.string(), std::string("invalid JSON: ") + e.what());
    }
    return network_from_json(j);
}

// ---------------------------------------------------------------------------
// Config echoes

inline json config_to_json(const LeakageConfig &c) {
    return {{"noise_sigma", c.noise_sigma},     {"samples_per_byte", c.samples_per_byte},
            {"mul_amplitude", c.mul_amplitude}, {"act_amplitude", c.act_amplitude},
            {"time_unit_ns", c.time_unit_ns},   {"preset", std::string(to_string(c.preset))},
            {"seed", c.seed},                   {"recommended_traces", c.recommended_traces()}};
}

inline LeakageConfig config_from_json(const json &j) {
    LeakageConfig c;
    auto num = [&](const char *k) {
        const json &v = detail::require(j, k, "config");
        if (!v.is_number())
            throw ValidationError(std::string("config.") + k, "expected a number");
        return v.get<double>();
    };
    c.noise_sigma = num("noise_sigma");
    c.samples_per_byte = detail::require_count(detail::require(j, "samples_per_byte", "config"), "config.samples_per_byte");
    c.mul_amplitude = num("mul_amplitude");
    c.act_amplitude = num("act_amplitude");
    c.time_unit_ns = num("time_unit_ns");
    const json &p = detail::require(j, "preset", "config");
    if (!p.is_string())
        throw ValidationError("config.preset", "expected a string");
    c.preset = parse_preset(p.get<std::string>());
    const json &s = detail::require(j, "seed", "config");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
        throw ValidationError("config.seed", "expected an unsigned integer");
    c.seed = s.get<std::uint64_t>();
    c.validate();
    return c;
}

inline json countermeasures_to_json(const CountermeasureConfig &c) {
    return {{"shuffle", c.shuffle},
            {"mask", c.mask},
            {"constant_time_activation", c.constant_time_activation},
            {"seed", c.seed}};
}

inline CountermeasureConfig countermeasures_from_json(const json &j) {
    CountermeasureConfig c;
    if (!j.is_object())
        throw ValidationError("countermeasures", "expected an object");
    c.shuffle = j.value("shuffle", false);
    c.mask = j.value("mask", false);
    c.constant_time_activation = j.value("constant_time_activation", false);
    c.seed = j.value("seed", std::uint64_t{0});
    return c;
}

} // namespace scnn
