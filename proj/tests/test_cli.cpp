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
// Runs the built scnn binary.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "scnn/network_io.hpp"
#include "scnn/trace_store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string &args, const std::string &env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + SCNN_CLI_PATH + " " + args + " 2>/dev/null";
    FILE *p = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 512> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p))
        out.append(buf.data(), n);
    const int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("scnn_cli_" + std::to_string(::getpid()) + "_" +
               ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string at(const std::string &name) const { return (dir / name).string(); }
    json report(const std::string &name) const {
        json j = json::parse(scnn::detail::read_text(dir / name));
        j.erase("run_info");
        return j;
    }
    fs::path dir;
};

} // namespace

TEST_F(Cli, HelpAndVersion) {
    const auto h = run("--help");
    EXPECT_EQ(h.code, 0);
    for (const char *sub : {"net-gen", "simulate", "attack-weights", "attack-activation", "attack-structure",
                            "attack-input", "recover-all", "evaluate-cm", "plot"})
        EXPECT_NE(h.out.find(sub), std::string::npos) << sub;
    EXPECT_EQ(run("--version").code, 0);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("simulate --bogus").code, 2);
    EXPECT_EQ(run("net-gen --layers 4").code, 2);
    EXPECT_EQ(run("net-gen --layers 4,x -o " + at("n.json")).code, 2);
    EXPECT_EQ(run("simulate --net " + at("missing.json") + " -o " + at("t.scnn")).code, 3);
    const auto j = run("--json-errors simulate --net " + at("missing.json"));
    EXPECT_EQ(j.code, 3);
    const auto e = json::parse(j.out);
    EXPECT_EQ(e["error"]["code"], 3);
}

TEST_F(Cli, NetGenSimulateAttack) {
    ASSERT_EQ(run("net-gen --layers 3,4 --act sigmoid --seed 1 -o " + at("net.json")).code, 0);
    const auto net = scnn::load_network(at("net.json"));
    EXPECT_EQ(net.layer_sizes(), std::vector<std::size_t>{4});
    ASSERT_EQ(run("simulate --net " + at("net.json") + " --traces 1000 --preset avr --seed 7 -o " + at("ts.scnn")).code,
              0);
    EXPECT_EQ(scnn::load_traceset(at("ts.scnn")).size(), 1000u);
    ASSERT_EQ(run("attack-weights --traces " + at("ts.scnn") + " --neuron 1 --curves " + at("c.csv") + " --truth " +
                  at("net.json") + " -o " + at("w.json"))
                  .code,
              0);
    const auto w = report("w.json");
    EXPECT_EQ(w["command"], "attack-weights");
    EXPECT_TRUE(fs::exists(at("c.csv")));
    ASSERT_EQ(run("plot --csv " + at("c.csv") + " --title t -o " + at("c.svg")).code, 0);
    EXPECT_EQ(scnn::detail::read_text(at("c.svg")).rfind("<svg", 0), 0u);
}

TEST_F(Cli, ReportsAreReproducible) {
    ASSERT_EQ(run("net-gen --layers 2,3 --seed 3 -o " + at("net.json")).code, 0);
    for (const char *name : {"a.scnn", "b.scnn"})
        ASSERT_EQ(run("simulate --net " + at("net.json") + " --traces 300 --seed 2 -o " + at(name)).code, 0);
    const auto a = scnn::load_traceset(at("a.scnn")), b = scnn::load_traceset(at("b.scnn"));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        ASSERT_TRUE(a.traces[i].samples == b.traces[i].samples && a.inputs[i] == b.inputs[i]) << "trace " << i;
    for (const char *name : {"s1.json", "s2.json"})
        ASSERT_EQ(run("attack-structure --traces " + at("a.scnn") + " -o " + at(name)).code, 0);
    EXPECT_EQ(report("s1.json"), report("s2.json"));
    EXPECT_EQ(report("s1.json")["layer_sizes"], json::array({3}));
}

TEST_F(Cli, OutDirEnvironment) {
    ASSERT_EQ(run("net-gen --layers 2,2 -o " + at("net.json")).code, 0);
    ASSERT_EQ(run("evaluate-cm --mask --trials 2 --traces 50 --attacks cpa-weight", "SCNN_OUT_DIR=" + dir.string()).code,
              0);
    const auto j = report("degradation.json");
    EXPECT_EQ(j["command"], "evaluate-cm");
    EXPECT_EQ(j["attacks"][0]["attack"], "cpa-weight");
}

TEST_F(Cli, RecoverAll) {
    ASSERT_EQ(run("net-gen --layers 2,3,2 --act sigmoid --seed 5 -o " + at("net.json")).code, 0);
    const auto r = run("recover-all --oracle " + at("net.json") + " --budget 1000 --prove-blind -o " + at("r.json"));
    EXPECT_EQ(r.code, 0);
    const auto j = report("r.json");
    EXPECT_TRUE(j["functional_check"]["pass"].get<bool>());
    EXPECT_EQ(j["oracle_audit"].size(), 1u);
}
