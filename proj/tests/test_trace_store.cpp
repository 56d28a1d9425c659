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
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "scnn/network_io.hpp"
#include "scnn/trace_store.hpp"

using namespace scnn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const auto dir = fs::temp_directory_path() / ("scnn_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

TraceSet small_set(std::size_t n) {
    const auto net =
        random_network(make_architecture(3, {4, 2}, ActivationKind::Sigmoid, ActivationKind::Softmax), WeightGrid{}, 2);
    return simulate_batch(net, uniform_inputs(n, 3, 1), LeakageConfig::for_preset(SnrPreset::AVR, 3));
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST(TraceStore, Roundtrip) {
    const auto ts = small_set(25);
    const auto p = scratch("rt.scnn");
    save_traceset(ts, p, json{{"tool", "test"}});
    const auto back = load_traceset(p);
    ASSERT_EQ(back.size(), ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        EXPECT_EQ(back.traces[i].samples, ts.traces[i].samples);
        EXPECT_EQ(back.traces[i].annotations, ts.traces[i].annotations);
        EXPECT_EQ(back.inputs[i], ts.inputs[i]);
    }
    EXPECT_EQ(back.config, ts.config);
    EXPECT_EQ(back.countermeasures, ts.countermeasures);
}

TEST(TraceStore, EmptySet) {
    TraceSet ts;
    const auto p = scratch("empty.scnn");
    save_traceset(ts, p);
    EXPECT_TRUE(load_traceset(p).empty());
    EXPECT_EQ(slurp(p).substr(0, 4), "SCNN");
}

TEST(TraceStore, TruncatedFileIsCorrupt) {
    const auto p = scratch("trunc.scnn");
    save_traceset(small_set(5), p);
    const auto blob = slurp(p);
    for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(9), std::size_t(40), blob.size() - 1}) {
        std::ofstream(p, std::ios::binary | std::ios::trunc).write(blob.data(), std::streamsize(cut));
        EXPECT_THROW(load_traceset(p), CorruptFileError) << "cut at " << cut;
    }
}

TEST(TraceStore, RandomCorruptionNeverCrashes) {
    const auto p = scratch("fuzz.scnn");
    save_traceset(small_set(3), p);
    const auto blob = slurp(p);
    Rng rng = derive_rng(99, 0);
    for (int i = 0; i < 300; ++i) {
        std::string b = blob;
        for (int k = 0; k < 4; ++k)
            b[rng() % std::min<std::size_t>(b.size(), 200)] = char(rng());
        std::ofstream(p, std::ios::binary | std::ios::trunc).write(b.data(), std::streamsize(b.size()));
        try {
            (void)load_traceset(p);
        } catch (const IoError &) {
        } catch (const UsageError &) {
        }
    }
}

TEST(TraceStore, MissingFile) { EXPECT_THROW(load_traceset(scratch("nope.scnn")), IoError); }

TEST(NetworkIo, Roundtrip665) {
    const auto net =
        random_network(make_architecture(4, {6, 5, 5}, ActivationKind::Sigmoid, ActivationKind::Sigmoid), WeightGrid{}, 6);
    const auto p = scratch("net.json");
    save_network(net, p);
    const auto back = load_network(p);
    EXPECT_EQ(back.input_dim, net.input_dim);
    ASSERT_EQ(back.layers.size(), 3u);
    for (std::size_t l = 0; l < 3; ++l) {
        EXPECT_EQ(back.layers[l].weights, net.layers[l].weights);
        EXPECT_EQ(back.layers[l].bias, net.layers[l].bias);
        EXPECT_EQ(back.layers[l].activation, net.layers[l].activation);
    }
}

TEST(NetworkIo, ValidationErrors) {
    json j = network_to_json(
        random_network(make_architecture(2, {2, 2}, ActivationKind::ReLU, ActivationKind::ReLU), WeightGrid{}, 1));
    json hidden = j;
    hidden["layers"][0]["activation"] = "softmax";
    EXPECT_THROW(network_from_json(hidden), ValidationError);
    json row = j;
    row["layers"][1]["weights"][0].push_back(1.0);
    EXPECT_THROW(network_from_json(row), ValidationError);
    json missing = j;
    missing.erase("layers");
    EXPECT_THROW(network_from_json(missing), ValidationError);
    const auto p = scratch("bad.json");
    detail::write_text(p, "{not json");
    EXPECT_THROW(load_network(p), CorruptFileError);
}
