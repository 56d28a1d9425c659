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

// JSON and CSV forms of attack results.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scnn/attack/activation_classifier.hpp"
#include "scnn/attack/cpa.hpp"
#include "scnn/attack/hpa.hpp"
#include "scnn/attack/layer_boundary.hpp"
#include "scnn/attack/reverse_engineer.hpp"
#include "scnn/attack/weight_recovery.hpp"
#include "scnn/evaluation.hpp"
#include "scnn/network_io.hpp"

namespace scnn {

inline json candidates_to_json(const std::vector<Candidate> &c) {
    json a = json::array();
    for (const auto &x : c)
        a.push_back({{"hypothesis", x.hypothesis}, {"peak", x.peak}, {"peak_sample", x.peak_sample}});
    return a;
}

inline json ranking_to_json(const CandidateRanking &r, std::size_t keep = 10) {
    std::vector<Candidate> head(r.ranked.begin(), r.ranked.begin() + std::min(keep, r.ranked.size()));
    return {{"candidates", candidates_to_json(head)}, {"margin", r.empty() ? 0.0 : r.margin()}};
}

inline json weight_estimate_to_json(const WeightEstimate &e) {
    return {{"value", e.value},
            {"precision", std::string(to_string(e.precision))},
            {"conclusive", e.conclusive},
            {"zero", e.zero_flag},
            {"peak", e.peak},
            {"margin", e.margin},
            {"sign", e.sign},
            {"exponent", e.exponent},
            {"mantissa7", e.mantissa7},
            {"stage1", candidates_to_json(e.stage1)},
            {"stage2", candidates_to_json(e.stage2)},
            {"stage3", candidates_to_json(e.stage3)}};
}

inline json classification_to_json(const ActivationClassification &c) {
    json d = json::object(), p = json::object();
    for (std::size_t k = 0; k < 4; ++k) {
        const std::string name(to_string(kAllActivations[k]));
        d[name] = std::isfinite(c.stats_distance[k]) ? json(c.stats_distance[k]) : json(nullptr);
        p[name] = c.pattern_score[k];
    }
    return {{"kind", std::string(to_string(c.kind))},
            {"distance", c.distance},
            {"stats_distance", d},
            {"pattern_score", p},
            {"pattern_used", c.pattern_used},
            {"pattern_tie", c.pattern_tie}};
}

inline json boundary_to_json(const BoundaryResult &b) {
    return {{"decision", std::string(to_string(b.decision))},
            {"leaning", std::string(to_string(b.leaning))},
            {"peak_same", b.peak_same},
            {"peak_next", b.peak_next},
            {"margin", b.margin},
            {"same", weight_estimate_to_json(b.same)},
            {"next", weight_estimate_to_json(b.next)}};
}

inline json hpa_to_json(const HpaEstimate &e) {
    return {{"value", e.value},
            {"byte3", e.byte3},
            {"byte2", e.byte2},
            {"peak", e.peak},
            {"margin", e.margin},
            {"observations", e.observations},
            {"low_confidence", e.low_confidence},
            {"stage_a", candidates_to_json(e.stage_a)}};
}

inline json recovery_report_to_json(const RecoveryReport &r) {
    json layers = json::array();
    for (const auto &l : r.layers) {
        json rows = json::array();
        for (const auto &row : l.weights) {
            json ws = json::array();
            for (const auto &w : row)
                ws.push_back({{"value", w.value},
                              {"precision", std::string(to_string(w.precision))},
                              {"conclusive", w.conclusive},
                              {"zero", w.zero_flag},
                              {"peak", w.peak},
                              {"margin", w.margin}});
            rows.push_back(std::move(ws));
        }
        layers.push_back({{"neurons", l.neurons},
                          {"activation", std::string(to_string(l.activation))},
                          {"first_region", l.first_region},
                          {"classification", classification_to_json(l.classification)},
                          {"weights", std::move(rows)}});
    }
    json bounds = json::array();
    for (const auto &b : r.boundaries)
        bounds.push_back({{"region", b.region},
                          {"decision", std::string(to_string(b.decision))},
                          {"method", b.method},
                          {"peak_same", b.peak_same},
                          {"peak_next", b.peak_next},
                          {"margin", b.margin},
                          {"probe", b.probe}});
    return {{"input_dim", r.input_dim},
            {"layer_sizes", r.layer_sizes()},
            {"traces_queried", r.traces_queried},
            {"traces_used", r.traces_used},
            {"config", config_to_json(r.config)},
            {"layers", std::move(layers)},
            {"boundaries", std::move(bounds)},
            {"hypothesis_evaluations", r.hypothesis_evaluations},
            {"inconclusive_weights", r.inconclusive_weights},
            {"inconclusive_boundaries", r.inconclusive_boundaries},
            {"zero_weights", r.zero_weights},
            {"aborted", r.aborted},
            {"conclusive", r.conclusive()},
            {"notes", r.notes},
            {"network", network_to_json(r.network())}};
}

inline json outcome_to_json(const AttackOutcome &o) {
    return {{"trials", o.trials},
            {"successes", o.successes},
            {"success_rate", o.success_rate},
            {"samples_per_trace", o.samples_per_trace},
            {"traces_to_success", o.traces_to_success ? json(*o.traces_to_success) : json(nullptr)}};
}

inline json degradation_to_json(const DegradationReport &r) {
    json attacks = json::array();
    for (const auto &e : r.entries)
        attacks.push_back({{"attack", std::string(to_string(e.attack))},
                           {"baseline", outcome_to_json(e.baseline)},
                           {"protected", outcome_to_json(e.protected_)},
                           {"overhead_samples", e.overhead_samples()}});
    json names = json::array();
    for (auto a : r.options.attacks)
        names.push_back(std::string(to_string(a)));
    return {{"countermeasures", countermeasures_to_json(r.countermeasures)},
            {"options",
             {{"trials", r.options.trials},
              {"traces", r.options.traces},
              {"hpa_neurons", r.options.hpa_neurons},
              {"seed", r.options.seed},
              {"attacks", names},
              {"leakage", config_to_json(r.options.leakage)}}},
            {"attacks", std::move(attacks)}};
}

// ---------------------------------------------------------------------------
// Correlation curves: one CSV row per (hypothesis, sample).

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string curves_to_csv(const std::vector<CorrelationCurve> &curves, std::size_t first_sample = 0) {
    std::string out = "hypothesis,sample,rho\n";
    for (const auto &c : curves)
        for (std::size_t k = 0; k < c.rho.size(); ++k)
            out += format_number(c.hypothesis) + "," + std::to_string(first_sample + k) + "," +
                   format_number(c.rho[k]) + "\n";
    return out;
}

/// Inverse of curves_to_csv; sample numbers are taken as given.
inline std::vector<CorrelationCurve> curves_from_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("hypothesis,sample,rho", 0) != 0)
        throw ValidationError("csv", "expected header 'hypothesis,sample,rho'");
    std::vector<CorrelationCurve> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        double h = 0, s = 0, rho = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &h, &s, &rho) != 3)
            throw ValidationError("csv line " + std::to_string(lineno), "expected three numbers");
        if (out.empty() || out.back().hypothesis != h)
            out.push_back({h, {}, 0, 0.0});
        auto &c = out.back();
        if (std::abs(rho) > c.peak) {
            c.peak = std::abs(rho);
            c.peak_sample = std::size_t(s);
        }
        c.rho.push_back(rho);
    }
    return out;
}

} // namespace scnn
