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
// scnn: command line front-end.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "scnn/attack/activation_classifier.hpp"
#include "scnn/attack/cpa.hpp"
#include "scnn/attack/hpa.hpp"
#include "scnn/attack/reverse_engineer.hpp"
#include "scnn/attack/spa.hpp"
#include "scnn/attack/weight_recovery.hpp"
#include "scnn/evaluation.hpp"
#include "scnn/leakage.hpp"
#include "scnn/mlp.hpp"
#include "scnn/network_io.hpp"
#include "scnn/plot.hpp"
#include "scnn/report_io.hpp"
#include "scnn/trace_store.hpp"

namespace scnn::cli {
namespace {

struct Common {
    bool json_errors = false;
    std::size_t threads = 1;
};

// Leakage flags shared by simulate, recover-all and evaluate-cm.
struct LeakFlags {
    std::string preset = "avr";
    double sigma = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;

    void add(CLI::App *c, const std::string &sigma_help) {
        c->add_option("--preset", preset, "SNR preset")->check(CLI::IsMember({"avr", "arm"}))->capture_default_str();
        c->add_option("--sigma", sigma, sigma_help);
        c->add_option("--seed", seed, "Leakage noise seed")->capture_default_str();
    }
    LeakageConfig config() const {
        LeakageConfig c = LeakageConfig::for_preset(parse_preset(preset), seed);
        if (!std::isnan(sigma))
            c.noise_sigma = sigma;
        c.validate();
        return c;
    }
};

struct GridFlags {
    double bound = 5.0, step = 0.01, margin = 0.05;
    void add(CLI::App *c) {
        c->add_option("--bound", bound, "Weight grid bound N (grid -N..N)")->capture_default_str();
        c->add_option("--step", step, "Weight grid step")->capture_default_str();
        c->add_option("--margin", margin, "Relative margin for a conclusive rank 1")->capture_default_str();
    }
    WeightGrid grid() const {
        WeightGrid g{bound, step};
        g.validate();
        return g;
    }
    json to_json() const { return {{"bound", bound}, {"step", step}, {"margin", margin}}; }
};

std::vector<std::vector<SpaPair>> segment_all(const TraceSet &ts, std::size_t threads) {
    const SpaParams sp = SpaParams::from_config(ts.config);
    std::vector<std::vector<SpaPair>> out(ts.size());
    parallel_for(ts.size(), threads, [&](std::size_t t) { out[t] = spa_segment(ts.traces[t].samples, sp); });
    return out;
}

// ---------------------------------------------------------------------------

struct NetGen {
    std::string layers, act = "sigmoid", out_act, out;
    std::uint64_t seed = 1;
    double bound = 5.0, step = 0.01;
};

int run_net_gen(const NetGen &o) {
    const auto sizes = parse_sizes(o.layers);
    if (sizes.size() < 2)
        throw UsageError("--layers needs the input size followed by at least one layer size");
    const ActivationKind hidden = parse_activation(o.act);
    const ActivationKind output = o.out_act.empty() ? hidden : parse_activation(o.out_act);
    const auto arch = make_architecture(sizes.front(), {sizes.begin() + 1, sizes.end()}, hidden, output);
    const auto net = random_network(arch, WeightGrid{o.bound, o.step}, o.seed);
    json j = network_to_json(net);
    j["generator"] = {{"layers", o.layers}, {"act", o.act},     {"out_act", std::string(to_string(output))},
                      {"seed", o.seed},     {"bound", o.bound}, {"step", o.step}};
    const auto path = output_path(o.out, "net.json");
    ensure_parent(path);
    detail::write_text(path, j.dump(2) + "\n");
    std::cout << "wrote " << path.string() << " (" << net.neuron_count() << " neurons, " << net.connection_count()
              << " weights)\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct Simulate {
    std::string net, out;
    std::size_t traces = 1000;
    LeakFlags leak;
    std::optional<std::uint64_t> input_seed;
    double lo = -1.0, hi = 1.0;
    bool shuffle = false, mask = false, constant_time = false, annotate = false;
    std::uint64_t cm_seed = 0;
};

int run_simulate(const Simulate &o, const Common &c) {
    const auto net = load_network(o.net);
    if (o.traces == 0)
        throw UsageError("--traces must be positive");
    if (!(o.lo < o.hi))
        throw UsageError("--lo must be below --hi");
    const LeakageConfig cfg = o.leak.config();
    const CountermeasureConfig cm{o.shuffle, o.mask, o.constant_time, o.cm_seed};
    const std::uint64_t iseed = o.input_seed.value_or(o.leak.seed);
    auto ts = simulate_batch(net, uniform_inputs(o.traces, net.input_dim, iseed, o.lo, o.hi), cfg, cm,
                             reference_timing_profiles(), c.threads);
    if (!o.annotate)
        for (auto &t : ts.traces)
            t.annotations.clear();
    const auto path = output_path(o.out, "traces.scnn");
    ensure_parent(path);
    const json prov = {{"command", "simulate"}, {"net", o.net},     {"traces", o.traces},
                       {"input_seed", iseed},   {"input_lo", o.lo}, {"input_hi", o.hi}};
    save_traceset(ts, path, prov);
    std::cout << "wrote " << path.string() << " (" << ts.size() << " traces)\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct AttackWeights {
    std::string traces, out, curves, truth, inputs;
    std::size_t neuron = 0;
    unsigned curve_byte = 2;
    GridFlags grid;
};

int run_attack_weights(const AttackWeights &o, const Common &c) {
    const auto ts = load_traceset(o.traces);
    if (ts.empty())
        throw UsageError("trace set is empty");
    const std::size_t dim = ts.inputs.front().size();
    std::vector<std::size_t> idx;
    if (o.inputs.empty())
        for (std::size_t i = 0; i < dim; ++i)
            idx.push_back(i);
    else
        for (auto v : parse_sizes(o.inputs))
            idx.push_back(v - 1); // 1-based on the command line
    for (auto i : idx)
        if (i >= dim)
            throw UsageError("--inputs index out of range (input_dim " + std::to_string(dim) + ")");
    if (o.curve_byte > 3)
        throw UsageError("--curve-byte must be 0..3");

    // Attacker view: neuron n of the first layer is the nth region.
    const auto pairs = segment_all(ts, c.threads);
    const std::size_t plen = ts.config.product_samples();
    std::vector<std::size_t> rows;
    for (std::size_t t = 0; t < ts.size(); ++t)
        if (pairs[t].size() > o.neuron && pairs[t][o.neuron].mul.size() + plen / 2 >= dim * plen)
            rows.push_back(t);
    if (rows.size() < 2)
        throw Inconclusive("fewer than two traces contain region " + std::to_string(o.neuron));

    std::optional<NetworkDescription> truth;
    if (!o.truth.empty())
        truth = load_network(o.truth);

    WeightRecoveryOptions wo;
    wo.grid = o.grid.grid();
    wo.margin = o.grid.margin;
    wo.mul_amplitude = ts.config.mul_amplitude;
    wo.samples_per_byte = ts.config.samples_per_byte;
    wo.threads = c.threads;
    HypothesisCounter counter;
    wo.counter = &counter;

    json results = json::array();
    bool all_conclusive = true;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const std::size_t i = idx[k];
        std::vector<std::size_t> offs;
        std::vector<float> known;
        for (auto t : rows) {
            offs.push_back(pairs[t][o.neuron].mul.start + i * plen);
            known.push_back(ts.inputs[t][i]);
        }
        const auto leak = extract_windows(ts, rows, offs, plen);
        const auto e = recover_weight(leak, known, wo);
        all_conclusive = all_conclusive && (e.conclusive || e.zero_flag);
        json r = weight_estimate_to_json(e);
        r["input"] = i + 1;
        if (truth) {
            const auto &w = truth->layers.at(0).weights.at(o.neuron).at(i);
            r["truth"] = w;
            r["exact"] = e.value == w;
        }
        results.push_back(std::move(r));

        if (k == 0 && !o.curves.empty()) {
            std::vector<CorrelationCurve> curves;
            const unsigned b = o.curve_byte;
            cpa_scores(
                leak, known, HypothesisSpace::grid(wo.grid),
                [b](double h, float x) { return double(predicted_product_hw(x, float(h), b)); }, {0, plen},
                CpaOptions{c.threads, &curves, nullptr});
            const std::filesystem::path cp = o.curves;
            ensure_parent(cp);
            detail::write_text(cp, curves_to_csv(curves));
        }
    }

    json cfg = {{"traces", o.traces},         {"neuron", o.neuron}, {"inputs", idx},
                {"curve_byte", o.curve_byte}, {"grid", o.grid.to_json()}};
    for (auto &v : cfg["inputs"])
        v = v.get<std::size_t>() + 1;
    json rep = make_report("attack-weights", cfg);
    rep["traces_used"] = rows.size();
    rep["hypothesis_evaluations"] = counter.value();
    rep["weights"] = std::move(results);
    rep["conclusive"] = all_conclusive;
    const auto path = output_path(o.out, "weights.json");
    write_report(rep, path);
    std::cout << "wrote " << path.string() << "\n";
    if (!all_conclusive)
        throw Inconclusive("at least one weight is inconclusive");
    return kOk;
}

// ---------------------------------------------------------------------------

struct AttackActivation {
    std::string traces, out, net, durations_csv;
    std::size_t first = 0, count = 1, layer = 0, outputs = 0;
};

int run_attack_activation(const AttackActivation &o, const Common &c) {
    const auto ts = load_traceset(o.traces);
    if (o.count == 0)
        throw UsageError("--count must be positive");
    std::optional<NetworkDescription> net;
    if (!o.net.empty()) {
        net = load_network(o.net);
        if (o.layer >= net->layers.size())
            throw UsageError("--layer out of range");
        if (o.count > net->layers[o.layer].neurons)
            throw UsageError("--count exceeds the neurons of --layer");
    }
    const auto pairs = segment_all(ts, c.threads);
    std::vector<double> d;
    std::vector<float> in;
    for (std::size_t t = 0; t < ts.size(); ++t) {
        if (pairs[t].size() < o.first + o.count)
            continue;
        std::vector<float> x = ts.inputs[t];
        if (net && o.layer > 0)
            x = infer(NetworkDescription{net->input_dim, {net->layers.begin(), net->layers.begin() + o.layer}}, x);
        for (std::size_t n = 0; n < o.count; ++n) {
            d.push_back(double(pairs[t][o.first + n].act.size()) * ts.config.time_unit_ns);
            if (net) {
                const auto &w = net->layers[o.layer].weights[n];
                float acc = 0.0f;
                for (std::size_t i = 0; i < w.size(); ++i)
                    acc += x[i] * w[i];
                in.push_back(acc + net->layers[o.layer].bias[n]);
            }
        }
    }
    if (d.empty())
        throw Inconclusive("no trace contains the requested regions");
    const auto cls = classify_activation(d, in, reference_timing_profiles(), o.outputs);
    if (!o.durations_csv.empty()) {
        std::string csv = "duration_ns\n";
        for (double v : d)
            csv += format_number(v) + "\n";
        const std::filesystem::path p = o.durations_csv;
        ensure_parent(p);
        detail::write_text(p, csv);
    }
    json rep = make_report("attack-activation", {{"traces", o.traces},
                                                 {"first_region", o.first},
                                                 {"count", o.count},
                                                 {"net", o.net},
                                                 {"layer", o.layer},
                                                 {"outputs", o.outputs}});
    const auto st = observed_stats(d);
    rep["observed"] = {{"min_ns", st.min_ns}, {"mean_ns", st.mean_ns}, {"max_ns", st.max_ns}, {"count", d.size()}};
    rep["classification"] = classification_to_json(cls);
    const auto path = output_path(o.out, "activation.json");
    write_report(rep, path);
    std::cout << "activation: " << to_string(cls.kind) << " (wrote " << path.string() << ")\n";
    if (cls.pattern_tie)
        throw Inconclusive("timing pattern tie between candidate activations");
    return kOk;
}

// ---------------------------------------------------------------------------

struct AttackStructure {
    std::string traces, out;
    GridFlags grid;
};

RecoveryOptions recovery_options(const GridFlags &g, std::size_t threads) {
    RecoveryOptions ro;
    ro.grid = g.grid();
    ro.margin = g.margin;
    ro.threads = threads;
    return ro;
}

int run_attack_structure(const AttackStructure &o, const Common &c) {
    const auto ts = load_traceset(o.traces);
    if (ts.empty())
        throw UsageError("trace set is empty");
    const auto r = recover_from_traces(ts, ts.inputs.front().size(), recovery_options(o.grid, c.threads));
    json rep = make_report("attack-structure", {{"traces", o.traces}, {"grid", o.grid.to_json()}});
    json full = recovery_report_to_json(r);
    for (const char *k : {"layer_sizes", "boundaries", "traces_used", "aborted", "notes", "inconclusive_boundaries"})
        rep[k] = full[k];
    json acts = json::array();
    for (const auto &l : r.layers)
        acts.push_back(std::string(to_string(l.activation)));
    rep["activations"] = acts;
    const auto path = output_path(o.out, "structure.json");
    write_report(rep, path);
    std::cout << "layers:";
    for (auto n : r.layer_sizes())
        std::cout << ' ' << n;
    std::cout << " (wrote " << path.string() << ")\n";
    if (r.aborted || r.inconclusive_boundaries)
        throw Inconclusive("structure recovery incomplete");
    return kOk;
}

// ---------------------------------------------------------------------------

struct AttackInput {
    std::string traces, net, out;
    std::size_t trace = 0, component = 1, neurons = 0, floor = 20;
};

int run_attack_input(const AttackInput &o, const Common &) {
    const auto ts = load_traceset(o.traces);
    const auto net = load_network(o.net);
    if (o.trace >= ts.size())
        throw UsageError("--trace out of range");
    if (o.component == 0 || o.component > net.input_dim)
        throw UsageError("--component must be 1.." + std::to_string(net.input_dim));
    const std::size_t M = o.neurons ? o.neurons : net.layers[0].neurons;
    if (M > net.layers[0].neurons)
        throw UsageError("--neurons exceeds the first layer");
    const auto pairs = spa_segment(ts.traces[o.trace].samples, SpaParams::from_config(ts.config));
    const auto off = hpa_offsets(pairs, M, o.component - 1, ts.config.samples_per_byte);
    std::vector<float> w;
    for (std::size_t n = 0; n < M; ++n)
        w.push_back(net.layers[0].weights[n][o.component - 1]);
    HpaOptions ho;
    ho.samples_per_byte = ts.config.samples_per_byte;
    ho.mul_amplitude = ts.config.mul_amplitude;
    ho.reliability_floor = o.floor;
    const auto est =
        hpa_input_recovery(cut_subtraces(ts.traces[o.trace].samples, off, ts.config.product_samples()), w, ho);
    json rep = make_report("attack-input", {{"traces", o.traces},
                                            {"net", o.net},
                                            {"trace", o.trace},
                                            {"component", o.component},
                                            {"neurons", M},
                                            {"reliability_floor", o.floor}});
    rep["estimate"] = hpa_to_json(est);
    const float truth = ts.inputs[o.trace][o.component - 1];
    rep["truth"] = truth;
    rep["success"] = hpa_success(est.value, truth);
    if (est.low_confidence)
        std::cerr << "warning: " << M << " observations is below the reliability floor of " << o.floor << "\n";
    const auto path = output_path(o.out, "input.json");
    write_report(rep, path);
    std::cout << "x[" << o.component << "] ~ " << est.value << " (wrote " << path.string() << ")\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct RecoverAll {
    std::string oracle, out;
    std::size_t budget = 1000, check_inputs = 100;
    LeakFlags leak;
    std::uint64_t input_seed = 1;
    unsigned octaves = 0;
    double tolerance = 1e-2;
    bool prove_blind = false;
    GridFlags grid;
};

int run_recover_all(const RecoverAll &o, const Common &c) {
    // The network file only builds the simulated device. The attack sees the
    // oracle interface; the target is read again afterwards for the check.
    SimulatedOracle oracle(load_network(o.oracle), o.leak.config(), {}, c.threads);
    RecoveryOptions ro = recovery_options(o.grid, c.threads);
    ro.budget = o.budget;
    ro.input_seed = o.input_seed;
    ro.input_octaves = o.octaves;
    const auto r = reverse_engineer(oracle, ro);

    json rep = make_report("recover-all", {{"oracle", o.oracle},
                                           {"budget", o.budget},
                                           {"leakage", config_to_json(o.leak.config())},
                                           {"input_seed", o.input_seed},
                                           {"octaves", o.octaves},
                                           {"check_inputs", o.check_inputs},
                                           {"tolerance", o.tolerance},
                                           {"grid", o.grid.to_json()}});
    rep["recovery"] = recovery_report_to_json(r);
    if (o.prove_blind) {
        json audit = json::array();
        for (const auto &q : oracle.audit()) {
            audit.push_back({{"first_trace", q.first_trace}, {"count", q.count}});
            std::cerr << "oracle query: traces " << q.first_trace << ".." << q.first_trace + q.count - 1 << "\n";
        }
        rep["oracle_audit"] = audit;
    }

    const auto target = load_network(o.oracle);
    bool ok = !r.aborted;
    if (ok && r.layer_sizes() == target.layer_sizes()) {
        const auto fresh = uniform_inputs(o.check_inputs, target.input_dim, o.input_seed ^ 0x9e3779b97f4a7c15ULL);
        const double diff = max_output_difference(target, r.network(), fresh);
        ok = diff <= o.tolerance;
        rep["functional_check"] = {
            {"inputs", o.check_inputs}, {"max_abs_diff", diff}, {"tolerance", o.tolerance}, {"pass", ok}};
    } else {
        ok = false;
        rep["functional_check"] = {{"inputs", o.check_inputs},
                                   {"max_abs_diff", nullptr},
                                   {"tolerance", o.tolerance},
                                   {"pass", false},
                                   {"reason", "recovered layout differs from the target"}};
    }
    const auto path = output_path(o.out, "report.json");
    write_report(rep, path);
    std::cout << "recovered layers:";
    for (auto n : r.layer_sizes())
        std::cout << ' ' << n;
    std::cout << ", functional check " << (ok ? "pass" : "FAIL") << " (wrote " << path.string() << ")\n";
    if (!ok || r.inconclusive_boundaries)
        throw Inconclusive("recovered network failed the functional check or left boundaries undecided");
    return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateCm {
    std::string out, attacks;
    bool shuffle = false, mask = false, constant_time = false;
    std::uint64_t cm_seed = 0, seed = 1;
    std::size_t trials = 20, traces = 1000;
    double sigma = 0.0;
};

int run_evaluate_cm(const EvaluateCm &o, const Common &c) {
    EvaluationOptions eo;
    eo.trials = o.trials;
    eo.traces = o.traces;
    eo.seed = o.seed;
    eo.threads = c.threads;
    eo.leakage.noise_sigma = o.sigma;
    if (!o.attacks.empty()) {
        eo.attacks.clear();
        std::stringstream ss(o.attacks);
        std::string tok;
        while (std::getline(ss, tok, ','))
            eo.attacks.push_back(parse_attack(tok));
    }
    const CountermeasureConfig cm{o.shuffle, o.mask, o.constant_time, o.cm_seed};
    const auto rep = evaluate(cm, eo);
    json j = make_report("evaluate-cm", degradation_to_json(rep));
    j["attacks"] = j["config"]["attacks"];
    j["config"].erase("attacks");
    const auto path = output_path(o.out, "degradation.json");
    write_report(j, path);
    for (const auto &e : rep.entries)
        std::printf("%-20s baseline %5.1f%%  protected %5.1f%%\n", std::string(to_string(e.attack)).c_str(),
                    100 * e.baseline.success_rate, 100 * e.protected_.success_rate);
    std::cout << "wrote " << path.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct Plot {
    std::string csv, histogram, trace_file, out, title;
    std::size_t index = 0, highlight = 1, bins = 40;
    bool peaks = false;
};

std::vector<double> read_column(const std::string &path) {
    std::istringstream in(detail::read_text(path));
    std::string line;
    std::getline(in, line); // header
    std::vector<double> v;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        char *end = nullptr;
        const double x = std::strtod(line.c_str(), &end);
        if (end == line.c_str())
            throw CorruptFileError(path, "not a number: '" + line + "'");
        v.push_back(x);
    }
    return v;
}

int run_plot(const Plot &o) {
    const int sources = !o.csv.empty() + !o.histogram.empty() + !o.trace_file.empty();
    if (sources != 1)
        throw UsageError("plot: give exactly one of --csv, --histogram, --trace");
    std::string svg;
    ChartOptions co;
    co.title = o.title;
    if (!o.csv.empty()) {
        const auto curves = curves_from_csv(detail::read_text(o.csv));
        if (o.peaks) {
            co.x_label = "hypothesis";
            co.y_label = "peak |rho|";
            svg = peak_svg(curves, co);
        } else {
            co.x_label = "sample";
            co.y_label = "rho";
            svg = correlation_svg(curves, co, o.highlight);
        }
    } else if (!o.histogram.empty()) {
        co.x_label = "duration (ns)";
        co.y_label = "count";
        svg = histogram_svg(read_column(o.histogram), o.bins, co);
    } else {
        const auto ts = load_traceset(o.trace_file);
        if (o.index >= ts.size())
            throw UsageError("--index out of range");
        Series s{"trace " + std::to_string(o.index), {}, {}, true};
        const auto &t = ts.traces[o.index].samples;
        for (std::size_t i = 0; i < t.size(); ++i) {
            s.x.push_back(double(i) * ts.config.time_unit_ns * 1e-3);
            s.y.push_back(t[i]);
        }
        co.x_label = "time (us)";
        co.y_label = "leakage";
        svg = line_chart_svg({s}, co);
    }
    const auto path = output_path(o.out, "plot.svg");
    ensure_parent(path);
    detail::write_text(path, svg);
    std::cout << "wrote " << path.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

void print_error(const Common &c, int code, const std::string &kind, const std::string &msg) {
    std::cerr << "error: " << msg << "\n";
    if (c.json_errors)
        std::cout << json{{"error", {{"code", code}, {"kind", kind}, {"message", msg}}}}.dump() << "\n";
}

int main_impl(int argc, char **argv) {
    CLI::App app{"Side-channel reverse engineering of simulated neural networks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Common common;
    app.add_flag("--json-errors", common.json_errors, "Also print errors as one JSON object on stdout");
    app.add_option("--threads", common.threads, "Worker threads (0: all cores)")->capture_default_str();

    std::function<int()> action;

    NetGen ng;
    auto *c_ng = app.add_subcommand("net-gen", "Generate a random network JSON");
    c_ng->add_option("--layers", ng.layers, "Input size and layer sizes, e.g. 4,6,5,3")->required();
    c_ng->add_option("--act", ng.act, "Hidden activation")->capture_default_str();
    c_ng->add_option("--out-act", ng.out_act, "Output activation (default: --act)");
    c_ng->add_option("--seed", ng.seed, "Weight seed")->capture_default_str();
    c_ng->add_option("--bound", ng.bound, "Weight grid bound")->capture_default_str();
    c_ng->add_option("--step", ng.step, "Weight grid step")->capture_default_str();
    c_ng->add_option("-o,--out", ng.out, "Output file");
    c_ng->callback([&] { action = [&] { return run_net_gen(ng); }; });

    Simulate sim;
    auto *c_sim = app.add_subcommand("simulate", "Simulate a trace set");
    c_sim->add_option("--net", sim.net, "Network JSON")->required();
    c_sim->add_option("--traces", sim.traces, "Number of traces")->capture_default_str();
    sim.leak.add(c_sim, "Noise sigma, overrides the preset");
    c_sim->add_option("--input-seed", sim.input_seed, "Input seed (default: --seed)");
    c_sim->add_option("--lo", sim.lo, "Input lower bound")->capture_default_str();
    c_sim->add_option("--hi", sim.hi, "Input upper bound")->capture_default_str();
    c_sim->add_flag("--shuffle", sim.shuffle, "Shuffle neuron order");
    c_sim->add_flag("--mask", sim.mask, "Mask stored bytes");
    c_sim->add_flag("--constant-time", sim.constant_time, "Constant-time activations");
    c_sim->add_option("--cm-seed", sim.cm_seed, "Countermeasure seed")->capture_default_str();
    c_sim->add_flag("--annotate", sim.annotate, "Keep ground-truth region annotations");
    c_sim->add_option("-o,--out", sim.out, "Output SCNN file");
    c_sim->callback([&] { action = [&] { return run_simulate(sim, common); }; });

    AttackWeights aw;
    auto *c_aw = app.add_subcommand("attack-weights", "CPA on the weights of one first-layer neuron");
    c_aw->add_option("--traces", aw.traces, "SCNN trace file")->required();
    c_aw->add_option("--neuron", aw.neuron, "Neuron index (0-based region order)")->capture_default_str();
    c_aw->add_option("--inputs", aw.inputs, "1-based input indices, comma separated (default: all)");
    aw.grid.add(c_aw);
    c_aw->add_option("--curves", aw.curves, "Write correlation curves of the first weight as CSV");
    c_aw->add_option("--curve-byte", aw.curve_byte, "Product byte predicted for --curves")->capture_default_str();
    c_aw->add_option("--truth", aw.truth, "Network JSON to compare against");
    c_aw->add_option("-o,--out", aw.out, "Report JSON");
    c_aw->callback([&] { action = [&] { return run_attack_weights(aw, common); }; });

    AttackActivation aa;
    auto *c_aa = app.add_subcommand("attack-activation", "Classify activations from timing");
    c_aa->add_option("--traces", aa.traces, "SCNN trace file")->required();
    c_aa->add_option("--first-region", aa.first, "First region (0-based)")->capture_default_str();
    c_aa->add_option("--count", aa.count, "Regions to pool")->capture_default_str();
    c_aa->add_option("--net", aa.net, "Known or recovered network, enables pattern refinement");
    c_aa->add_option("--layer", aa.layer, "Layer of the regions in --net")->capture_default_str();
    c_aa->add_option("--outputs", aa.outputs, "Output count assumed for softmax")->capture_default_str();
    c_aa->add_option("--durations-csv", aa.durations_csv, "Write observed durations as CSV");
    c_aa->add_option("-o,--out", aa.out, "Report JSON");
    c_aa->callback([&] { action = [&] { return run_attack_activation(aa, common); }; });

    AttackStructure as;
    auto *c_as = app.add_subcommand("attack-structure", "Recover layer sizes and boundaries from a trace set");
    c_as->add_option("--traces", as.traces, "SCNN trace file")->required();
    as.grid.add(c_as);
    c_as->add_option("-o,--out", as.out, "Report JSON");
    c_as->callback([&] { action = [&] { return run_attack_structure(as, common); }; });

    AttackInput ai;
    auto *c_ai = app.add_subcommand("attack-input", "Recover one input component from a single trace");
    c_ai->add_option("--traces", ai.traces, "SCNN trace file")->required();
    c_ai->add_option("--net", ai.net, "Network JSON with the first-layer weights")->required();
    c_ai->add_option("--trace", ai.trace, "Trace index")->capture_default_str();
    c_ai->add_option("--component", ai.component, "1-based input component")->capture_default_str();
    c_ai->add_option("--neurons", ai.neurons, "Multiplications used (default: whole first layer)");
    c_ai->add_option("--floor", ai.floor, "Reliability floor")->capture_default_str();
    c_ai->add_option("-o,--out", ai.out, "Report JSON");
    c_ai->callback([&] { action = [&] { return run_attack_input(ai, common); }; });

    RecoverAll ra;
    auto *c_ra = app.add_subcommand("recover-all", "Reverse engineer a whole network through a simulated oracle");
    c_ra->add_option("--oracle", ra.oracle, "Network JSON of the simulated device")->required();
    c_ra->add_option("--budget", ra.budget, "Traces queried")->capture_default_str();
    ra.leak.add(c_ra, "Noise sigma, overrides the preset");
    c_ra->add_option("--input-seed", ra.input_seed, "Seed of the chosen inputs")->capture_default_str();
    c_ra->add_option("--octaves", ra.octaves, "Scale query rows by 2^-k, k up to this")->capture_default_str();
    c_ra->add_option("--check-inputs", ra.check_inputs, "Fresh inputs for the functional check")
        ->capture_default_str();
    c_ra->add_option("--tolerance", ra.tolerance, "Max-abs output tolerance")->capture_default_str();
    ra.grid.add(c_ra);
    c_ra->add_flag("--prove-blind", ra.prove_blind, "Log every oracle query");
    c_ra->add_option("-o,--out", ra.out, "Report JSON");
    c_ra->callback([&] { action = [&] { return run_recover_all(ra, common); }; });

    EvaluateCm ev;
    auto *c_ev = app.add_subcommand("evaluate-cm", "Attack success with and without countermeasures");
    c_ev->add_flag("--shuffle", ev.shuffle, "Shuffle neuron order");
    c_ev->add_flag("--mask", ev.mask, "Mask stored bytes");
    c_ev->add_flag("--constant-time", ev.constant_time, "Constant-time activations");
    c_ev->add_option("--cm-seed", ev.cm_seed, "Countermeasure seed")->capture_default_str();
    c_ev->add_option("--trials", ev.trials, "Trials per attack")->capture_default_str();
    c_ev->add_option("--traces", ev.traces, "Traces per CPA trial")->capture_default_str();
    c_ev->add_option("--sigma", ev.sigma, "Noise sigma")->capture_default_str();
    c_ev->add_option("--seed", ev.seed, "Trial seed")->capture_default_str();
    c_ev->add_option("--attacks", ev.attacks,
                     "Comma separated subset of cpa-weight,cpa-window,activation-pattern,hpa-input");
    c_ev->add_option("-o,--out", ev.out, "Report JSON");
    c_ev->callback([&] { action = [&] { return run_evaluate_cm(ev, common); }; });

    Plot pl;
    auto *c_pl = app.add_subcommand("plot", "Render curves, histograms or traces to SVG");
    c_pl->add_option("--csv", pl.csv, "Correlation curve CSV");
    c_pl->add_flag("--peaks", pl.peaks, "Plot peak |rho| against hypothesis instead of curves");
    c_pl->add_option("--highlight", pl.highlight, "Curves emphasised")->capture_default_str();
    c_pl->add_option("--histogram", pl.histogram, "Single-column CSV of durations");
    c_pl->add_option("--bins", pl.bins, "Histogram bins")->capture_default_str();
    c_pl->add_option("--trace", pl.trace_file, "SCNN trace file");
    c_pl->add_option("--index", pl.index, "Trace index")->capture_default_str();
    c_pl->add_option("--title", pl.title, "Chart title");
    c_pl->add_option("-o,--out", pl.out, "Output SVG");
    c_pl->callback([&] { action = [&] { return run_plot(pl); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        print_error(common, kUsage, "usage", e.what());
        return kUsage;
    }

    try {
        return action();
    } catch (const Inconclusive &e) {
        print_error(common, kInconclusive, "inconclusive", e.what());
        return kInconclusive;
    } catch (const IoError &e) {
        print_error(common, kIo, "io", e.what());
        return kIo;
    } catch (const std::logic_error &e) {
        print_error(common, kUsage, "usage", e.what());
        return kUsage;
    } catch (const std::exception &e) {
        print_error(common, kIo, "io", e.what());
        return kIo;
    }
}

} // namespace
} // namespace scnn::cli

int main(int argc, char **argv) { return scnn::cli::main_impl(argc, argv); }
