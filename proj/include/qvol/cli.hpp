// Copyright 2026 The qvol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qvol/coupling.hpp"
#include "qvol/model.hpp"
#include "qvol/parallel.hpp"
#include "qvol/pipeline.hpp"
#include "qvol/protocol.hpp"
#include "qvol/qasm.hpp"
#include "qvol/simulator.hpp"
#include "qvol/synthesis.hpp"
#include "qvol/version.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace qvol::cli {

using nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

// ---------------------------------------------------------------- files

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + p.string() + "'");
    out << content;
}

inline json parse_json_file(const fs::path& p) {
    const auto text = read_file(p);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(p.string() + ": " + e.what());
    }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Directory holding graphs/ and noise/; QVOL_DATA_DIR in the environment wins.
inline fs::path data_dir() {
    if (const char* env = std::getenv("QVOL_DATA_DIR")) return env;
#ifdef QVOL_DATA_DIR
    return QVOL_DATA_DIR;
#else
    return "data";
#endif
}

// ---------------------------------------------------------------- config helpers

namespace detail {

inline const json* field(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}
inline std::string at(const std::string& where, const char* key) { return where + "." + key; }

inline int get_int(const json& j, const char* key, const std::string& where, int def) {
    const json* v = field(j, key);
    if (!v) return def;
    if (!v->is_number_integer()) throw InvalidArgument(at(where, key) + ": expected an integer");
    return v->get<int>();
}
inline std::uint64_t get_u64(const json& j, const char* key, const std::string& where, std::uint64_t def) {
    const json* v = field(j, key);
    if (!v) return def;
    if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<std::int64_t>() < 0))
        throw InvalidArgument(at(where, key) + ": expected a non-negative integer");
    return v->get<std::uint64_t>();
}
inline double get_double(const json& j, const char* key, const std::string& where, double def) {
    const json* v = field(j, key);
    if (!v) return def;
    if (!v->is_number()) throw InvalidArgument(at(where, key) + ": expected a number");
    return v->get<double>();
}
inline bool get_bool(const json& j, const char* key, const std::string& where, bool def) {
    const json* v = field(j, key);
    if (!v) return def;
    if (!v->is_boolean()) throw InvalidArgument(at(where, key) + ": expected true or false");
    return v->get<bool>();
}
inline std::string get_string(const json& j, const char* key, const std::string& where, const std::string& def) {
    const json* v = field(j, key);
    if (!v) return def;
    if (!v->is_string()) throw InvalidArgument(at(where, key) + ": expected a string");
    return v->get<std::string>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw InvalidArgument(where + "." + it.key() + ": unknown field");
    }
}

}  // namespace detail

/// A graph argument resolved to either a family or concrete edges, plus any file it came from.
struct ResolvedGraph {
    GraphSpec spec;
    json resolved;  // {"family": ...} or the graph itself
    json input;     // {"path", "sha256"} when read from a file, else null
};

/// Accepts a family name (all-to-all, line, loop, grid: sized to each circuit), a sized
/// preset such as grid(9), a device name shipped in the data directory, or a JSON file path.
inline ResolvedGraph resolve_graph(const std::string& arg, const fs::path& base = {}) {
    ResolvedGraph r;
    for (const char* fam : {"all-to-all", "line", "loop", "grid"})
        if (arg == fam) {
            r.spec.family = parse_topology(arg);
            r.resolved = {{"family", arg}};
            return r;
        }
    CouplingGraph g;
    if (parse_preset(arg, g)) {
        r.spec.fixed = g;
        r.resolved = to_json(g);
        return r;
    }
    fs::path path = data_dir() / "graphs" / (arg + ".json");
    if (arg.find('/') != std::string::npos || arg.ends_with(".json") || !fs::exists(path))
        path = fs::path(arg).is_absolute() || base.empty() ? fs::path(arg) : base / arg;
    if (!fs::exists(path)) throw InvalidArgument("graph '" + arg + "': not a preset, device name or file");
    const auto text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
    g = coupling_graph_from_json(j);
    if (g.name().empty()) g = CouplingGraph(g.size(), {g.edges().begin(), g.edges().end()}, path.stem().string());
    r.spec.fixed = g;
    r.resolved = to_json(g);
    r.input = {{"path", path.string()}, {"sha256", sha256_hex(text)}};
    return r;
}

inline ResolvedGraph resolve_graph_json(const json& j, const std::string& where, const fs::path& base) {
    if (j.is_string()) return resolve_graph(j.get<std::string>(), base);
    if (!j.is_object()) throw InvalidArgument(where + ": expected a string or an object");
    if (j.contains("family")) {
        detail::reject_unknown(j, {"family"}, where);
        return resolve_graph(detail::get_string(j, "family", where, ""), base);
    }
    ResolvedGraph r;
    try {
        r.spec.fixed = coupling_graph_from_json(j);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(where + ": " + e.what());
    }
    r.resolved = to_json(*r.spec.fixed);
    return r;
}

struct ResolvedNoise {
    NoiseModel model;
    json input;
};

inline ResolvedNoise resolve_noise_json(const json& j, const std::string& where, const fs::path& base) {
    ResolvedNoise r;
    if (j.is_string()) {
        const std::string arg = j.get<std::string>();
        fs::path path = data_dir() / "noise" / (arg + ".json");
        if (arg.find('/') != std::string::npos || arg.ends_with(".json") || !fs::exists(path))
            path = fs::path(arg).is_absolute() || base.empty() ? fs::path(arg) : base / arg;
        const auto text = read_file(path);
        json nj;
        try {
            nj = json::parse(text);
        } catch (const json::parse_error& e) {
            throw InvalidArgument(path.string() + ": " + e.what());
        }
        detail::reject_unknown(nj, {"schema_version", "eps1", "eps2", "epsM", "interpretation", "edges", "name"},
                               path.string());
        r.model = noise_model_from_json(nj, path.string());
        r.input = {{"path", path.string()}, {"sha256", sha256_hex(text)}};
        return r;
    }
    detail::reject_unknown(j, {"schema_version", "eps1", "eps2", "epsM", "interpretation", "edges", "name"}, where);
    r.model = noise_model_from_json(j, where);
    return r;
}

inline json pipeline_to_json(const PassPipeline& p, bool loco) {
    return {{"kind", pipeline_kind_name(p.kind)}, {"fb", p.basis_fidelity}, {"trials", p.trials},
            {"loco", loco},  {"mirror", p.mirror},  {"placement", p.densest_placement ? "densest" : "identity"}};
}

inline PassPipeline pipeline_from_json(const json& j, const std::string& where, bool* loco_out = nullptr) {
    if (j.is_string()) return PassPipeline::make(parse_pipeline_kind(j.get<std::string>()));
    if (!j.is_object()) throw InvalidArgument(where + ": expected a string or an object");
    detail::reject_unknown(j, {"kind", "fb", "trials", "loco", "mirror", "placement"}, where);
    PipelineKind kind;
    try {
        kind = parse_pipeline_kind(detail::get_string(j, "kind", where, "standard"));
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(where + ".kind: " + e.what());
    }
    const double fb = detail::get_double(j, "fb", where, kind == PipelineKind::Approx ? 0.99 : 1.0);
    if (!(fb > 0 && fb <= 1)) throw InvalidArgument(where + ".fb: must lie in (0, 1]");
    const bool loco = detail::get_bool(j, "loco", where, false);
    auto p = PassPipeline::make(kind, fb, loco, detail::get_bool(j, "mirror", where, false));
    p.trials = detail::get_int(j, "trials", where, 40);
    if (p.trials < 1) throw InvalidArgument(where + ".trials: must be positive");
    const auto placement = detail::get_string(j, "placement", where, "identity");
    if (placement != "identity" && placement != "densest")
        throw InvalidArgument(where + ".placement: expected \"identity\" or \"densest\"");
    p.densest_placement = placement == "densest";
    if (loco_out) *loco_out = loco;
    return p;
}

// ---------------------------------------------------------------- manifests

inline json make_manifest(const std::string& command, const json& options, const json& inputs) {
    return {{"schema_version", 1},   {"tool", "qvol"},     {"version", kVersion},
            {"command", command},    {"options", options}, {"inputs", inputs.is_null() ? json::array() : inputs}};
}

struct RunContext {
    unsigned jobs = 1;
    std::ostream* log = &std::cout;
};

// ---------------------------------------------------------------- generate

struct GenerateOptions {
    int width = 2;
    int depth = 2;
    int count = 1;
    std::uint64_t seed = 0;
    std::string out = "out";

    json to_json() const { return {{"width", width}, {"depth", depth}, {"count", count}, {"seed", seed}, {"out", out}}; }
    static GenerateOptions from_json(const json& j) {
        GenerateOptions o;
        o.width = detail::get_int(j, "width", "options", 2);
        o.depth = detail::get_int(j, "depth", "options", 2);
        o.count = detail::get_int(j, "count", "options", 1);
        o.seed = detail::get_u64(j, "seed", "options", 0);
        o.out = detail::get_string(j, "out", "options", "out");
        return o;
    }
};

inline std::string bitstring(std::uint64_t x, int width) {
    std::string s(width, '0');
    for (int b = 0; b < width; ++b)
        if ((x >> b) & 1U) s[width - 1 - b] = '1';
    return s;
}

inline json heavy_set_json(const HeavySet& hs) {
    json j{{"schema_version", 1}, {"width", hs.width}, {"median", hs.median},
           {"ideal_heavy_probability", hs.ideal_heavy_probability}};
    j["heavy_outputs"] = hs.members;
    j["heavy_bitstrings"] = json::array();
    for (auto x : hs.members) j["heavy_bitstrings"].push_back(bitstring(x, hs.width));
    return j;
}

inline std::string circuit_file_stem(int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "circuit_%04d", i);
    return buf;
}

/// Writes `count` model circuits as QASM (each SU(4) block expanded to three CX) and
/// their heavy sets as JSON sidecars.
inline int cmd_generate(const GenerateOptions& o, const RunContext& ctx) {
    if (o.width < 2) throw InvalidArgument("--width: must be at least 2");
    if (o.depth < 1) throw InvalidArgument("--depth: must be positive");
    if (o.count < 1) throw InvalidArgument("--count: must be positive");
    const fs::path out = o.out;
    std::vector<std::string> qasm(o.count), heavy(o.count);
    parallel_for(o.count, ctx.jobs, [&](std::size_t i) {
        const auto seed = model_circuit_seed(o.seed, o.width, o.depth, i);
        const auto c = build_model_circuit({o.width, o.depth, seed});
        const auto hs = heavy_set(c);
        std::ostringstream q;
        q << "// model circuit: width " << o.width << ", depth " << o.depth << ", index " << i << ", seed " << seed
          << "\n"
          << emit_qasm(passes::unroll(c));
        qasm[i] = q.str();
        auto hj = heavy_set_json(hs);
        hj["depth"] = o.depth;
        hj["index"] = i;
        hj["seed"] = seed;
        heavy[i] = dump(hj);
    });
    for (int i = 0; i < o.count; ++i) {
        write_file(out / (circuit_file_stem(i) + ".qasm"), qasm[i]);
        write_file(out / (circuit_file_stem(i) + ".heavy.json"), heavy[i]);
    }
    write_file(out / "manifest.json", dump(make_manifest("generate", o.to_json(), nullptr)));
    *ctx.log << "wrote " << o.count << " circuits to " << out.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------- transpile

struct TranspileOptions {
    std::vector<std::string> inputs;
    std::string graph = "all-to-all";
    std::string pipeline = "standard";
    double fb = 0.99;
    int trials = 40;
    bool loco = false;
    bool mirror = false;
    bool densest = false;
    std::uint64_t seed = 0;
    std::string out = "out";

    json to_json() const {
        return {{"inputs", inputs}, {"graph", graph},   {"pipeline", pipeline}, {"fb", fb},
                {"trials", trials}, {"loco", loco},     {"mirror", mirror},     {"placement", densest ? "densest" : "identity"},
                {"seed", seed},     {"out", out}};
    }
    static TranspileOptions from_json(const json& j) {
        TranspileOptions o;
        if (!j.contains("inputs") || !j["inputs"].is_array()) throw InvalidArgument("options.inputs: expected an array");
        o.inputs = j["inputs"].get<std::vector<std::string>>();
        o.graph = detail::get_string(j, "graph", "options", o.graph);
        o.pipeline = detail::get_string(j, "pipeline", "options", o.pipeline);
        o.fb = detail::get_double(j, "fb", "options", o.fb);
        o.trials = detail::get_int(j, "trials", "options", o.trials);
        o.loco = detail::get_bool(j, "loco", "options", false);
        o.mirror = detail::get_bool(j, "mirror", "options", false);
        o.densest = detail::get_string(j, "placement", "options", "identity") == "densest";
        o.seed = detail::get_u64(j, "seed", "options", 0);
        o.out = detail::get_string(j, "out", "options", o.out);
        return o;
    }
};

inline json block_report_json(const passes::BlockReport& b) {
    json j{{"qubits", {b.qubits[0], b.qubits[1]}},
           {"original_cx", b.original_cx},
           {"final_cx", b.final_cx},
           {"replaced", b.replaced},
           {"applications", b.choice.applications},
           {"predicted_fidelity", b.choice.approximation_fidelity}};
    if (b.replaced) j["achieved_fidelity"] = avg_fidelity(b.target, circuit_unitary(b.synthesized));
    return j;
}

/// Compiles QASM files for a coupling graph and records each output permutation.
inline int cmd_transpile(const TranspileOptions& o, const RunContext& ctx, json* inputs_out = nullptr) {
    if (o.inputs.empty()) throw InvalidArgument("--in: at least one QASM file is required");
    const auto rg = resolve_graph(o.graph);
    auto pipe = PassPipeline::make(parse_pipeline_kind(o.pipeline), o.fb, o.loco, o.mirror);
    pipe.trials = o.trials;
    pipe.densest_placement = o.densest;
    pipe.validate();

    const std::size_t n = o.inputs.size();
    std::vector<Circuit> circuits;
    json inputs = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        const auto text = read_file(o.inputs[i]);
        inputs.push_back({{"path", o.inputs[i]}, {"sha256", sha256_hex(text)}});
        try {
            circuits.push_back(parse_qasm(text));
        } catch (const QasmError& e) {
            throw InvalidArgument(o.inputs[i] + ": " + e.what());
        }
    }
    if (!rg.input.is_null()) inputs.push_back(rg.input);

    std::vector<std::string> qasm(n), mapping(n);
    std::vector<std::size_t> before(n), after(n);
    std::vector<int> swaps(n);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        const Circuit& c = circuits[i];
        const auto graph = rg.spec.for_width(c.width());
        auto p = pipe;
        p.seed = derive_seed(o.seed, Stream::Transpile, {i});
        const auto r = run_pipeline(c, graph, p);
        before[i] = cx_count(passes::unroll(c));
        after[i] = cx_count(r.circuit);
        swaps[i] = r.swaps;
        qasm[i] = emit_qasm(r.circuit);
        json m{{"schema_version", 1},
               {"input", o.inputs[i]},
               {"graph", graph.name()},
               {"pipeline", pipeline_to_json(p, o.loco)},
               {"initial_layout", r.initial_layout},
               {"final_layout", r.final_layout},
               {"input_permutation", r.input_permutation()},
               {"output_permutation", r.output_permutation()},
               {"swaps", r.swaps},
               {"cx_before", before[i]},
               {"cx_after", after[i]}};
        m["blocks"] = json::array();
        for (const auto& b : r.blocks) m["blocks"].push_back(block_report_json(b));
        mapping[i] = dump(m);
    });

    const fs::path out = o.out;
    json summary{{"schema_version", 1}, {"graph", rg.resolved}, {"pipeline", pipeline_to_json(pipe, o.loco)}};
    summary["circuits"] = json::array();
    double sb = 0, sa = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto stem = fs::path(o.inputs[i]).stem().string();
        write_file(out / (stem + ".transpiled.qasm"), qasm[i]);
        write_file(out / (stem + ".mapping.json"), mapping[i]);
        summary["circuits"].push_back({{"input", o.inputs[i]}, {"cx_before", before[i]}, {"cx_after", after[i]},
                                       {"swaps", swaps[i]}});
        sb += static_cast<double>(before[i]);
        sa += static_cast<double>(after[i]);
    }
    summary["mean_cx_before"] = sb / n;
    summary["mean_cx_after"] = sa / n;
    write_file(out / "summary.json", dump(summary));
    write_file(out / "manifest.json", dump(make_manifest("transpile", o.to_json(), inputs)));
    if (inputs_out) *inputs_out = inputs;
    char buf[160];
    std::snprintf(buf, sizeof buf, "transpiled %zu circuits: mean CX %.2f -> %.2f\n", n, sb / n, sa / n);
    *ctx.log << buf;
    return kOk;
}

// ---------------------------------------------------------------- run-qv

/// Fully resolved run-qv configuration; its JSON form is accepted back as a config file.
struct RunQvConfig {
    std::vector<int> widths{2, 3, 4};
    bool square_only = true;
    int d_max = 0;
    TrialConfig trial;
    bool loco = false;
    json graph_resolved;
    json inputs = json::array();

    json to_json() const {
        return {{"schema_version", 1},
                {"widths", widths},
                {"mode", square_only ? "square" : "full"},
                {"d_max", d_max},
                {"circuits", trial.n_c},
                {"shots", trial.n_s},
                {"z", trial.z},
                {"seed", trial.seed},
                {"graph", graph_resolved},
                {"noise", qvol::to_json(trial.noise)},
                {"pipeline", pipeline_to_json(trial.pipeline, loco)}};
    }
};

/// Reads a run-qv config; errors name the offending field, e.g. "config.pipeline.fb".
inline RunQvConfig parse_run_config(const json& j, const fs::path& base = {}, const std::string& where = "config") {
    if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
    detail::reject_unknown(j, {"schema_version", "widths", "mode", "d_max", "circuits", "shots", "z", "seed", "graph",
                               "noise", "pipeline"},
                           where);
    RunQvConfig c;
    if (const json* w = detail::field(j, "widths")) {
        if (!w->is_array() || w->empty()) throw InvalidArgument(where + ".widths: expected a non-empty array");
        c.widths.clear();
        for (std::size_t i = 0; i < w->size(); ++i) {
            if (!(*w)[i].is_number_integer() || (*w)[i].get<int>() < 2)
                throw InvalidArgument(where + ".widths[" + std::to_string(i) + "]: expected an integer >= 2");
            c.widths.push_back((*w)[i].get<int>());
        }
    }
    const auto mode = detail::get_string(j, "mode", where, "square");
    if (mode != "square" && mode != "full") throw InvalidArgument(where + ".mode: expected \"square\" or \"full\"");
    c.square_only = mode == "square";
    c.d_max = detail::get_int(j, "d_max", where, 0);
    c.trial.n_c = detail::get_int(j, "circuits", where, 200);
    if (c.trial.n_c < kMinCircuits)
        throw InvalidArgument(where + ".circuits: at least " + std::to_string(kMinCircuits) + " circuits are required");
    c.trial.n_s = detail::get_int(j, "shots", where, 100);
    if (c.trial.n_s < 1) throw InvalidArgument(where + ".shots: must be positive");
    c.trial.z = detail::get_double(j, "z", where, 2.0);
    c.trial.seed = detail::get_u64(j, "seed", where, 0);
    const json graph = j.contains("graph") ? j["graph"] : json("all-to-all");
    auto rg = resolve_graph_json(graph, where + ".graph", base);
    c.trial.graph = rg.spec;
    c.graph_resolved = rg.resolved;
    if (!rg.input.is_null()) c.inputs.push_back(rg.input);
    if (const json* nz = detail::field(j, "noise")) {
        auto rn = resolve_noise_json(*nz, where + ".noise", base);
        c.trial.noise = rn.model;
        if (!rn.input.is_null()) c.inputs.push_back(rn.input);
    }
    if (const json* p = detail::field(j, "pipeline")) c.trial.pipeline = pipeline_from_json(*p, where + ".pipeline", &c.loco);
    return c;
}

inline QVReport run_qv(const RunQvConfig& cfg, unsigned jobs) {
    TrialConfig t = cfg.trial;
    t.jobs = jobs;
    auto rep = run_qv_sweep(t, cfg.widths, cfg.square_only, cfg.d_max);
    rep.metadata = {{"tool", "qvol"},
                    {"version", kVersion},
                    {"seed", cfg.trial.seed},
                    {"config_sha256", sha256_hex(cfg.to_json().dump())},
                    {"graph", cfg.trial.graph.describe()},
                    {"pipeline", pipeline_kind_name(cfg.trial.pipeline.kind)}};
    return rep;
}

inline int cmd_run_qv(const RunQvConfig& cfg, const std::string& out_dir, const RunContext& ctx) {
    const auto rep = run_qv(cfg, ctx.jobs);
    const fs::path out = out_dir;
    write_file(out / "report.json", dump(to_json(rep)));
    write_file(out / "report.csv", to_csv(rep));
    json opts = cfg.to_json();
    opts["out"] = out_dir;
    write_file(out / "manifest.json", dump(make_manifest("run-qv", opts, cfg.inputs)));
    for (const auto& p : rep.points) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "m=%d d=%d  h=%.4f  ci_lower=%.4f  ideal=%.4f  %s\n", p.m, p.d, p.h_hat,
                      p.ci_lower, p.ideal_heavy_mean, p.passed ? "pass" : "fail");
        *ctx.log << buf;
    }
    *ctx.log << "log2 V_Q = " << rep.volume.log2_vq << "\n";
    return kOk;
}

// ---------------------------------------------------------------- approx-stats

struct ApproxOptions {
    double fb = 0.97;
    std::size_t samples = 100000;
    bool mirror = false;
    std::uint64_t seed = 0;
    std::string out = "out";

    json to_json() const {
        return {{"fb", fb}, {"samples", samples}, {"mirror", mirror}, {"seed", seed}, {"out", out}};
    }
    static ApproxOptions from_json(const json& j) {
        ApproxOptions o;
        o.fb = detail::get_double(j, "fb", "options", o.fb);
        o.samples = detail::get_u64(j, "samples", "options", o.samples);
        o.mirror = detail::get_bool(j, "mirror", "options", false);
        o.seed = detail::get_u64(j, "seed", "options", 0);
        o.out = detail::get_string(j, "out", "options", o.out);
        return o;
    }
};

inline json approx_stats_json(const ApproxStats& s) {
    return {{"schema_version", 1},
            {"fb", s.basis_fidelity},
            {"mirror", s.mirror},
            {"samples", s.samples},
            {"fractions", s.fractions},
            {"mean_applications", s.mean_applications},
            {"mean_best_fidelity", s.mean_best_fidelity},
            {"effective_fidelity", s.effective_fidelity},
            {"infidelity_ratio", s.infidelity_ratio}};
}

/// Application-count statistics plus empirical and analytic CDFs of the two-application
/// fidelity with and without mirroring.
inline int cmd_approx_stats(const ApproxOptions& o, const RunContext& ctx) {
    if (!(o.fb > 0 && o.fb <= 1)) throw InvalidArgument("--fb: must lie in (0, 1]");
    if (o.samples < 1) throw InvalidArgument("--samples: must be positive");
    const auto coords = sample_weyl_coords(o.samples, o.seed, ctx.jobs);
    const auto stats = approximation_stats(coords, o.fb, o.mirror);
    std::vector<double> f2, f2m;
    f2.reserve(coords.size());
    f2m.reserve(coords.size());
    for (const auto& w : coords) {
        f2.push_back(expansion_fidelity(2, w));
        f2m.push_back(mirrored_two_fidelity(w));
    }
    std::sort(f2.begin(), f2.end());
    std::sort(f2m.begin(), f2m.end());
    auto ecdf = [](const std::vector<double>& v, double f) {
        return static_cast<double>(std::lower_bound(v.begin(), v.end(), f) - v.begin()) / v.size();
    };
    std::ostringstream csv;
    csv << "F,empirical_F2,analytic_F2,empirical_F2m,analytic_F2m\n";
    for (int k = 0; k <= 160; ++k) {
        const double f = 0.6 + 0.4 * k / 160;
        char buf[200];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", f, ecdf(f2, f), cdf_f2(f), ecdf(f2m, f),
                      cdf_f2m(f));
        csv << buf;
    }
    auto j = approx_stats_json(stats);
    j["seed"] = o.seed;
    j["median_F2"] = f2[f2.size() / 2];
    j["median_F2m"] = f2m[f2m.size() / 2];
    const fs::path out = o.out;
    write_file(out / "approx_stats.json", dump(j));
    write_file(out / "approx_cdf.csv", csv.str());
    write_file(out / "manifest.json", dump(make_manifest("approx-stats", o.to_json(), nullptr)));
    char buf[200];
    std::snprintf(buf, sizeof buf, "fractions %.4f %.4f %.4f %.4f  mean %.3f  F_e %.5f\n", stats.fractions[0],
                  stats.fractions[1], stats.fractions[2], stats.fractions[3], stats.mean_applications,
                  stats.effective_fidelity);
    *ctx.log << buf;
    return kOk;
}

// ---------------------------------------------------------------- estimate

struct EstimateOptions {
    std::vector<double> eps{0.03, 0.015, 0.008, 0.0032};
    std::string topology = "grid";
    int m_max = 64;
    ScalingParams params;
    std::string out = "out";

    json to_json() const {
        return {{"eps", eps},
                {"topology", topology},
                {"m_max", m_max},
                {"params", {{"a", params.a}, {"b", params.b}, {"a_loop", params.a_loop}, {"b_loop", params.b_loop}}},
                {"out", out}};
    }
    static EstimateOptions from_json(const json& j) {
        EstimateOptions o;
        if (j.contains("eps")) o.eps = j["eps"].get<std::vector<double>>();
        o.topology = detail::get_string(j, "topology", "options", o.topology);
        o.m_max = detail::get_int(j, "m_max", "options", o.m_max);
        if (j.contains("params")) {
            const auto& p = j["params"];
            o.params.a = detail::get_double(p, "a", "options.params", o.params.a);
            o.params.b = detail::get_double(p, "b", "options.params", o.params.b);
            o.params.a_loop = detail::get_double(p, "a_loop", "options.params", o.params.a_loop);
            o.params.b_loop = detail::get_double(p, "b_loop", "options.params", o.params.b_loop);
        }
        o.out = detail::get_string(j, "out", "options", o.out);
        return o;
    }
};

inline int cmd_estimate(const EstimateOptions& o, const RunContext& ctx) {
    const auto topo = parse_topology(o.topology);
    if (o.m_max < 2) throw InvalidArgument("--m-max: must be at least 2");
    if (o.eps.empty()) throw InvalidArgument("--eps: at least one value is required");
    json j{{"schema_version", 1}, {"topology", o.topology}, {"m_max", o.m_max}};
    j["params"] = o.to_json()["params"];
    j["estimates"] = json::array();
    std::ostringstream csv;
    csv << "eps,m,eps_eff,depth,volume\n";
    for (double eps : o.eps) {
        const auto est = estimate_volume(eps, topo, o.params, o.m_max);
        json e{{"eps", eps}, {"log2_vq", est.log2_vq}, {"m_star", est.m_star}};
        e["rows"] = json::array();
        for (const auto& r : est.rows) {
            e["rows"].push_back({{"m", r.m}, {"eps_eff", r.eps_eff}, {"depth", std::isinf(r.depth) ? json(nullptr) : json(r.depth)},
                                 {"volume", r.volume}});
            char buf[160];
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%d\n", eps, r.m, r.eps_eff, r.depth, r.volume);
            csv << buf;
        }
        if (eps == 0) {
            e["capped"] = true;
            std::cerr << "warning: eps = 0 gives unbounded depth; estimate capped at m_max = " << o.m_max << "\n";
        }
        j["estimates"].push_back(e);
        char buf[120];
        std::snprintf(buf, sizeof buf, "eps=%-10.4g log2 V_Q ~ %d (m=%d)\n", eps, est.log2_vq, est.m_star);
        *ctx.log << buf;
    }
    j["thresholds"] = json::array();
    for (int t = 2; t <= std::min(o.m_max, 16); ++t)
        j["thresholds"].push_back({{"log2_vq", t}, {"eps", estimate_threshold(t, topo, o.params)}});
    const fs::path out = o.out;
    write_file(out / "estimate.json", dump(j));
    write_file(out / "estimate.csv", csv.str());
    write_file(out / "manifest.json", dump(make_manifest("estimate", o.to_json(), nullptr)));
    return kOk;
}

// ---------------------------------------------------------------- threshold

struct ThresholdCliOptions {
    int target = 4;
    std::string topology = "grid";
    double epsM = 0;
    double eps1_ratio = 0.1;
    int circuits = 200;
    int shots = 100;
    double z = 2;
    std::string criterion = "mean";  // or "confidence"
    std::string pipeline = "standard";
    double rel_tol = 0.1;
    std::uint64_t seed = 0;
    std::string out = "out";

    json to_json() const {
        return {{"target", target},     {"topology", topology}, {"epsM", epsM},         {"eps1_ratio", eps1_ratio},
                {"circuits", circuits}, {"shots", shots},       {"z", z},               {"criterion", criterion},
                {"pipeline", pipeline}, {"rel_tol", rel_tol},   {"seed", seed},         {"out", out}};
    }
    static ThresholdCliOptions from_json(const json& j) {
        ThresholdCliOptions o;
        o.target = detail::get_int(j, "target", "options", o.target);
        o.topology = detail::get_string(j, "topology", "options", o.topology);
        o.epsM = detail::get_double(j, "epsM", "options", o.epsM);
        o.eps1_ratio = detail::get_double(j, "eps1_ratio", "options", o.eps1_ratio);
        o.circuits = detail::get_int(j, "circuits", "options", o.circuits);
        o.shots = detail::get_int(j, "shots", "options", o.shots);
        o.z = detail::get_double(j, "z", "options", o.z);
        o.criterion = detail::get_string(j, "criterion", "options", o.criterion);
        o.pipeline = detail::get_string(j, "pipeline", "options", o.pipeline);
        o.rel_tol = detail::get_double(j, "rel_tol", "options", o.rel_tol);
        o.seed = detail::get_u64(j, "seed", "options", 0);
        o.out = detail::get_string(j, "out", "options", o.out);
        return o;
    }
};

/// Largest two-qubit error rate at which the square point m = d = target passes.
inline int cmd_threshold(const ThresholdCliOptions& o, const RunContext& ctx) {
    if (o.target < 2) throw InvalidArgument("--target: must be at least 2");
    if (o.criterion != "mean" && o.criterion != "confidence")
        throw InvalidArgument("--criterion: expected mean or confidence");
    TrialConfig cfg;
    cfg.n_c = o.circuits;
    cfg.n_s = o.shots;
    cfg.z = o.z;
    cfg.seed = o.seed;
    cfg.jobs = ctx.jobs;
    cfg.noise.epsM = o.epsM;
    cfg.pipeline = PassPipeline::make(parse_pipeline_kind(o.pipeline));
    cfg.validate();
    ThresholdOptions topt;
    topt.eps1_ratio = o.eps1_ratio;
    topt.rel_tol = o.rel_tol;
    topt.criterion = o.criterion == "mean" ? PassCriterion::MeanAboveTwoThirds : PassCriterion::ConfidenceBound;
    const auto topo = parse_topology(o.topology);
    const auto r = find_threshold_eps(o.target, topo, cfg, topt);
    json j{{"schema_version", 1}, {"target", o.target}, {"topology", o.topology}, {"eps", r.eps}, {"fail_eps", r.fail}};
    if (topo != Topology::Line) j["estimate_eps"] = estimate_threshold(o.target, topo);
    j["evaluations"] = json::array();
    for (const auto& [eps, dr] : r.evaluations) {
        auto e = to_json(dr);
        e["eps2"] = eps;
        j["evaluations"].push_back(e);
    }
    const fs::path out = o.out;
    write_file(out / "threshold.json", dump(j));
    write_file(out / "manifest.json", dump(make_manifest("threshold", o.to_json(), nullptr)));
    char buf[160];
    std::snprintf(buf, sizeof buf, "threshold eps2 = %.4g (fails at %.4g)\n", r.eps, r.fail);
    *ctx.log << buf;
    return kOk;
}

// ---------------------------------------------------------------- replay

/// Re-runs the command recorded in a manifest. `out_override` and `jobs` replace the
/// recorded values; input files are checked against their recorded hashes.
inline int cmd_replay(const std::string& manifest_path, const std::string& out_override, const RunContext& ctx) {
    const json m = parse_json_file(manifest_path);
    if (!m.is_object() || !m.contains("command") || !m.contains("options"))
        throw InvalidArgument(manifest_path + ": not a qvol manifest");
    if (m.contains("inputs"))
        for (const auto& in : m["inputs"]) {
            const auto path = in.at("path").get<std::string>();
            if (sha256_hex(read_file(path)) != in.at("sha256").get<std::string>())
                throw InvalidArgument("input '" + path + "' changed since the manifest was written");
        }
    json opts = m["options"];
    if (!out_override.empty()) opts["out"] = out_override;
    const auto cmd = m["command"].get<std::string>();
    if (cmd == "generate") return cmd_generate(GenerateOptions::from_json(opts), ctx);
    if (cmd == "transpile") return cmd_transpile(TranspileOptions::from_json(opts), ctx);
    if (cmd == "approx-stats") return cmd_approx_stats(ApproxOptions::from_json(opts), ctx);
    if (cmd == "estimate") return cmd_estimate(EstimateOptions::from_json(opts), ctx);
    if (cmd == "threshold") return cmd_threshold(ThresholdCliOptions::from_json(opts), ctx);
    if (cmd == "run-qv") {
        const std::string out = detail::get_string(opts, "out", "options", "out");
        opts.erase("out");
        return cmd_run_qv(parse_run_config(opts, {}, "options"), out, ctx);
    }
    throw InvalidArgument(manifest_path + ": unknown command '" + cmd + "'");
}

/// Maps library exceptions to exit codes and prints the message.
template <class Fn>
int guarded(Fn&& fn, std::ostream& err = std::cerr) {
    try {
        return fn();
    } catch (const QasmError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const MappingError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    }
}

}  // namespace qvol::cli
