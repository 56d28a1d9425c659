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

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scnn/error.hpp"
#include "scnn/network_io.hpp"

namespace scnn::cli {

inline constexpr const char *kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kInconclusive = 1, kUsage = 2, kIo = 3 };

/// Raised by a subcommand whose attack ran but did not reach a decision.
/// The report has already been written.
class Inconclusive : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// `given` if set, else <SCNN_OUT_DIR or .>/<fallback>.
inline std::filesystem::path output_path(const std::string &given, const std::string &fallback) {
    if (!given.empty())
        return given;
    const char *dir = std::getenv("SCNN_OUT_DIR");
    return std::filesystem::path(dir && *dir ? dir : ".") / fallback;
}

inline void ensure_parent(const std::filesystem::path &p) {
    const auto parent = p.parent_path();
    if (parent.empty())
        return;
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec)
        throw IoError(parent.string(), "cannot create directory: " + ec.message());
}

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Everything except "run_info" is a pure function of the flags.
inline json make_report(const std::string &command, json config) {
    json r;
    r["command"] = command;
    r["config"] = std::move(config);
    return r;
}

inline void write_report(json report, const std::filesystem::path &path) {
    report["run_info"] = {{"timestamp", utc_timestamp()}, {"tool_version", kVersion}};
    ensure_parent(path);
    detail::write_text(path, report.dump(2) + "\n");
}

inline std::vector<std::size_t> parse_sizes(const std::string &s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw UsageError("expected a comma separated list of positive integers, got '" + s + "'");
        const auto v = std::stoull(tok);
        if (v == 0)
            throw UsageError("layer sizes must be positive");
        out.push_back(std::size_t(v));
    }
    if (out.empty())
        throw UsageError("empty size list");
    return out;
}

} // namespace scnn::cli
