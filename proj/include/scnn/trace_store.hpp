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

// SCNN trace files.
//
//   offset  size  field
//   0       4     magic "SCNN"
//   4       2     version, uint16 little-endian (currently 1)
//   6       4     header_json_len, uint32 little-endian
//   10      len   header JSON, UTF-8:
//                   { "n_traces": n, "samples_per_trace": [..n counts..],
//                     "config": {...}, "countermeasures": {...},
//                     "inputs_ref": "<sidecar file name>",
//                     "provenance": {...} (optional) }
//   10+len  ...   samples, binary32 little-endian, trace after trace
//
// Known inputs (and optional ground-truth annotations) go to the sidecar
// "<file>.inputs.json". Trace lengths differ because activation timing is
// data dependent.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "scnn/error.hpp"
#include "scnn/leakage.hpp"
#include "scnn/network_io.hpp"

namespace scnn {

inline constexpr std::array<char, 4> kTraceMagic{'S', 'C', 'N', 'N'};
inline constexpr std::uint16_t kTraceVersion = 1;
inline constexpr std::size_t kTraceFixedHeader = 10;

inline std::filesystem::path inputs_sidecar_path(const std::filesystem::path &path) {
    return std::filesystem::path(path.string() + ".inputs.json");
}

namespace detail {

template <class T> void put_le(std::string &out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(char((std::uint64_t(v) >> (8 * i)) & 0xFFu));
}

template <class T> T get_le(const unsigned char *p) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= std::uint64_t(p[i]) << (8 * i);
    return T(v);
}

inline json annotations_to_json(const std::vector<Annotation> &anns) {
    json a = json::array();
    for (const auto &x : anns)
        a.push_back({std::string(to_string(x.kind)), x.layer, x.neuron, x.start, x.end});
    return a;
}

inline RegionKind parse_region(const std::string &s) {
    if (s == "mul")
        return RegionKind::Mul;
    if (s == "act")
        return RegionKind::Act;
    if (s == "softmax")
        return RegionKind::Softmax;
    throw ValidationError("annotations", "unknown region kind '" + s + "'");
}

} // namespace detail

/// `provenance`, when not null, is stored verbatim in the header.
inline void save_traceset(const TraceSet &ts, const std::filesystem::path &path, const json &provenance = nullptr) {
    if (ts.inputs.size() != ts.traces.size())
        throw UsageError("save_traceset: inputs/traces count mismatch");
    json header;
    header["n_traces"] = ts.traces.size();
    json counts = json::array();
    for (const auto &t : ts.traces)
        counts.push_back(t.samples.size());
    header["samples_per_trace"] = std::move(counts);
    header["config"] = config_to_json(ts.config);
    header["countermeasures"] = countermeasures_to_json(ts.countermeasures);
    header["inputs_ref"] = inputs_sidecar_path(path).filename().string();
    if (!provenance.is_null())
        header["provenance"] = provenance;
    const std::string hj = header.dump();
    if (hj.size() > std::numeric_limits<std::uint32_t>::max())
        throw UsageError("save_traceset: header too large");

    std::string blob;
    std::size_t total = 0;
    for (const auto &t : ts.traces)
        total += t.samples.size();
    blob.reserve(kTraceFixedHeader + hj.size() + 4 * total);
    blob.append(kTraceMagic.data(), kTraceMagic.size());
    detail::put_le<std::uint16_t>(blob, kTraceVersion);
    detail::put_le<std::uint32_t>(blob, std::uint32_t(hj.size()));
    blob += hj;
    for (const auto &t : ts.traces)
        for (float s : t.samples)
            detail::put_le<std::uint32_t>(blob, std::bit_cast<std::uint32_t>(s));
    detail::write_text(path, blob);

    json side;
    side["inputs"] = ts.inputs;
    bool any_ann = false;
    for (const auto &t : ts.traces)
        any_ann = any_ann || !t.annotations.empty();
    if (any_ann) {
        json anns = json::array();
        for (const auto &t : ts.traces)
            anns.push_back(detail::annotations_to_json(t.annotations));
        side["annotations"] = std::move(anns);
    }
    detail::write_text(inputs_sidecar_path(path), side.dump() + "\n");
}

/// Every length read from the file is checked against the bytes actually
/// present before it is used.
inline TraceSet load_traceset(const std::filesystem::path &path) {
    const std::string blob = detail::read_text(path);
    const std::string where = path.string();
    if (blob.size() < kTraceFixedHeader)
        throw CorruptFileError(where, "truncated fixed header");
    if (std::memcmp(blob.data(), kTraceMagic.data(), 4) != 0)
        throw CorruptFileError(where, "bad magic");
    const auto *p = reinterpret_cast<const unsigned char *>(blob.data());
    const auto version = detail::get_le<std::uint16_t>(p + 4);
    if (version != kTraceVersion)
        throw CorruptFileError(where, "unsupported version " + std::to_string(version));
    const std::size_t hlen = detail::get_le<std::uint32_t>(p + 6);
    if (hlen > blob.size() - kTraceFixedHeader)
        throw CorruptFileError(where, "header length exceeds file size");

    json header;
    try {
        header = json::parse(blob.substr(kTraceFixedHeader, hlen));
    } catch (const json::parse_error &e) {
        throw CorruptFileError(where, std::string("header JSON: ") + e.what());
    }

    TraceSet ts;
    const std::size_t payload = blob.size() - kTraceFixedHeader - hlen;
    std::vector<std::size_t> counts;
    try {
        const std::size_t n = detail::require_count(detail::require(header, "n_traces", ""), "n_traces", true);
        const json &spt = detail::require(header, "samples_per_trace", "");
        if (!spt.is_array() || spt.size() != n)
            throw CorruptFileError(where, "samples_per_trace does not list n_traces counts");
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = detail::require_count(spt[i], "samples_per_trace", true);
            if (c > payload / 4 || total + c > payload / 4)
                throw CorruptFileError(where, "sample counts exceed payload (truncated file?)");
            total += c;
            counts.push_back(c);
        }
        if (total * 4 != payload)
            throw CorruptFileError(where, "payload size does not match sample counts");
        ts.config = config_from_json(detail::require(header, "config", ""));
        if (header.contains("countermeasures"))
            ts.countermeasures = countermeasures_from_json(header.at("countermeasures"));
    } catch (const ValidationError &e) {
        throw CorruptFileError(where, e.what());
    } catch (const json::exception &e) {
        throw CorruptFileError(where, e.what());
    }

    const unsigned char *s = p + kTraceFixedHeader + hlen;
    ts.traces.resize(counts.size());
    for (std::size_t t = 0; t < counts.size(); ++t) {
        auto &samples = ts.traces[t].samples;
        samples.resize(counts[t]);
        for (auto &v : samples) {
            v = std::bit_cast<float>(detail::get_le<std::uint32_t>(s));
            s += 4;
        }
    }

    const auto side_path = inputs_sidecar_path(path);
    json side;
    try {
        side = json::parse(detail::read_text(side_path));
    } catch (const json::parse_error &e) {
        throw CorruptFileError(side_path.string(), std::string("invalid JSON: ") + e.what());
    }
    try {
        const json &in = detail::require(side, "inputs", "");
        if (!in.is_array() || in.size() != ts.traces.size())
            throw CorruptFileError(side_path.string(), "inputs must have one row per trace");
        for (const auto &row : in) {
            if (!row.is_array())
                throw CorruptFileError(side_path.string(), "input row is not an array");
            std::vector<float> r;
            for (const auto &v : row)
                r.push_back(detail::require_float(v, "inputs"));
            ts.inputs.push_back(std::move(r));
        }
        if (side.contains("annotations")) {
            const json &anns = side.at("annotations");
            if (!anns.is_array() || anns.size() != ts.traces.size())
                throw CorruptFileError(side_path.string(), "annotations must have one list per trace");
            for (std::size_t t = 0; t < anns.size(); ++t) {
                for (const auto &a : anns[t]) {
                    Annotation x{detail::parse_region(a.at(0).get<std::string>()), a.at(1).get<std::size_t>(),
                                 a.at(2).get<std::size_t>(), a.at(3).get<std::size_t>(), a.at(4).get<std::size_t>()};
                    if (x.start > x.end || x.end > ts.traces[t].samples.size())
                        throw CorruptFileError(side_path.string(), "annotation outside trace bounds");
                    ts.traces[t].annotations.push_back(x);
                }
            }
        }
    } catch (const ValidationError &e) {
        throw CorruptFileError(side_path.string(), e.what());
    } catch (const json::exception &e) {
        throw CorruptFileError(side_path.string(), e.what());
    }
    return ts;
}

} // namespace scnn
