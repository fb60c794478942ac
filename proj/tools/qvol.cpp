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


#include "qvol/cli.hpp"

#include <CLI11.hpp>

#include <optional>

int main(int argc, char** argv) {
    using namespace qvol;
    namespace c = qvol::cli;

    CLI::App app{"qvol: quantum volume benchmarking toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    unsigned jobs = 1;
    app.add_option("--jobs", jobs, "worker threads (0 = all cores); never changes results")->check(CLI::NonNegativeNumber);

    c::GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "write random model circuits as QASM with heavy-set sidecars");
    g->add_option("--width,-m", gen.width, "circuit width")->required();
    g->add_option("--depth,-d", gen.depth, "number of layers")->required();
    g->add_option("--count,-n", gen.count, "number of circuits");
    g->add_option("--seed", gen.seed, "master seed");
    g->add_option("--out", gen.out, "output directory");
    g->add_option("--jobs", jobs, "worker threads");

    c::TranspileOptions tr;
    auto* t = app.add_subcommand("transpile", "compile QASM circuits for a coupling graph");
    t->add_option("inputs,--in", tr.inputs, "input QASM files")->required()->check(CLI::ExistingFile);
    t->add_option("--graph", tr.graph, "family, preset like grid(9), device name or JSON file");
    t->add_option("--pipeline", tr.pipeline, "standard, kak or approx")
        ->check(CLI::IsMember({"standard", "kak", "approx"}));
    t->add_option("--fb", tr.fb, "basis gate fidelity for the approx pipeline");
    t->add_option("--trials", tr.trials, "randomized swap trials per round");
    t->add_flag("--loco", tr.loco, "relabel qubits to reduce interaction bandwidth");
    t->add_flag("--mirror", tr.mirror, "route with mirrored SU(4) blocks");
    t->add_flag("--densest", tr.densest, "place on the best-connected subset of the graph");
    t->add_option("--seed", tr.seed, "master seed");
    t->add_option("--out", tr.out, "output directory");
    t->add_option("--jobs", jobs, "worker threads");

    std::string config_path, out_dir = "out", graph, noise, pipeline, mode;
    std::optional<double> fb, z;
    std::optional<int> circuits, shots, d_max, trials;
    std::optional<std::uint64_t> seed;
    std::vector<int> widths;
    bool loco = false, mirror = false;
    auto* r = app.add_subcommand("run-qv", "measure quantum volume in simulation");
    r->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    r->add_option("--graph", graph, "family, preset, device name or JSON file");
    r->add_option("--noise", noise, "noise JSON file or device name");
    r->add_option("--pipeline", pipeline, "standard, kak or approx")->check(CLI::IsMember({"standard", "kak", "approx"}));
    r->add_option("--fb", fb, "basis gate fidelity for the approx pipeline");
    r->add_option("--circuits", circuits, "circuits per point (at least 100)");
    r->add_option("--shots", shots, "shots per circuit");
    r->add_option("--z", z, "confidence multiplier");
    r->add_option("--widths", widths, "widths to test")->delimiter(',');
    r->add_option("--mode", mode, "square or full")->check(CLI::IsMember({"square", "full"}));
    r->add_option("--d-max", d_max, "largest depth in full mode");
    r->add_option("--trials", trials, "randomized swap trials per round");
    r->add_flag("--loco", loco, "relabel qubits to reduce interaction bandwidth");
    r->add_flag("--mirror", mirror, "route with mirrored SU(4) blocks");
    r->add_option("--seed", seed, "master seed");
    r->add_option("--out", out_dir, "output directory");
    r->add_option("--jobs", jobs, "worker threads");

    c::ApproxOptions ap;
    auto* a = app.add_subcommand("approx-stats", "statistics of approximate two-qubit synthesis");
    a->add_option("--fb", ap.fb, "basis gate fidelity");
    a->add_option("--samples", ap.samples, "Haar-random targets");
    a->add_flag("--mirror", ap.mirror, "allow mirrored targets");
    a->add_option("--seed", ap.seed, "master seed");
    a->add_option("--out", ap.out, "output directory");
    a->add_option("--jobs", jobs, "worker threads");

    c::EstimateOptions es;
    auto* e = app.add_subcommand("estimate", "closed-form volume estimate from a two-qubit error rate");
    e->add_option("--eps", es.eps, "two-qubit error rates")->delimiter(',');
    e->add_option("--topology", es.topology, "grid, loop or all-to-all")
        ->check(CLI::IsMember({"grid", "loop", "all-to-all"}));
    e->add_option("--m-max", es.m_max, "largest width considered");
    e->add_option("--out", es.out, "output directory");

    c::ThresholdCliOptions th;
    auto* h = app.add_subcommand("threshold", "bisect the largest passing two-qubit error rate");
    h->add_option("--target", th.target, "log2 of the target volume (m = d)");
    h->add_option("--topology", th.topology, "grid, loop, line or all-to-all")
        ->check(CLI::IsMember({"grid", "loop", "line", "all-to-all"}));
    h->add_option("--epsM", th.epsM, "readout flip probability");
    h->add_option("--eps1-ratio", th.eps1_ratio, "single-qubit rate as a fraction of eps2");
    h->add_option("--circuits", th.circuits, "circuits per evaluation");
    h->add_option("--shots", th.shots, "shots per circuit");
    h->add_option("--criterion", th.criterion, "mean (mean h > 2/3) or confidence")
        ->check(CLI::IsMember({"mean", "confidence"}));
    h->add_option("--pipeline", th.pipeline, "standard, kak or approx");
    h->add_option("--rel-tol", th.rel_tol, "relative bracket width at which to stop");
    h->add_option("--seed", th.seed, "master seed");
    h->add_option("--out", th.out, "output directory");
    h->add_option("--jobs", jobs, "worker threads");

    std::string manifest, replay_out;
    auto* p = app.add_subcommand("replay", "re-run a command from its manifest.json");
    p->add_option("manifest", manifest, "manifest file")->required()->check(CLI::ExistingFile);
    p->add_option("--out", replay_out, "output directory (default: the recorded one)");
    p->add_option("--jobs", jobs, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? c::kOk : c::kUsage;
    }

    c::RunContext ctx;
    ctx.jobs = jobs;
    return c::guarded([&]() -> int {
        if (*g) return c::cmd_generate(gen, ctx);
        if (*t) return c::cmd_transpile(tr, ctx);
        if (*a) return c::cmd_approx_stats(ap, ctx);
        if (*e) return c::cmd_estimate(es, ctx);
        if (*h) return c::cmd_threshold(th, ctx);
        if (*p) return c::cmd_replay(manifest, replay_out, ctx);

        nlohmann::json cfg = nlohmann::json::object();
        std::filesystem::path base;
        nlohmann::json inputs = nlohmann::json::array();
        if (!config_path.empty()) {
            cfg = c::parse_json_file(config_path);
            if (!cfg.is_object()) throw InvalidArgument("config: expected an object");
            base = std::filesystem::path(config_path).parent_path();
            inputs.push_back({{"path", config_path}, {"sha256", c::sha256_hex(c::read_file(config_path))}});
        }
        if (!graph.empty()) cfg["graph"] = graph;
        if (!noise.empty()) cfg["noise"] = noise;
        if (!widths.empty()) cfg["widths"] = widths;
        if (!mode.empty()) cfg["mode"] = mode;
        if (d_max) cfg["d_max"] = *d_max;
        if (circuits) cfg["circuits"] = *circuits;
        if (shots) cfg["shots"] = *shots;
        if (z) cfg["z"] = *z;
        if (seed) cfg["seed"] = *seed;
        if (!pipeline.empty() || fb || trials || loco || mirror) {
            nlohmann::json pj = cfg.contains("pipeline") && cfg["pipeline"].is_object() ? cfg["pipeline"]
                                : cfg.contains("pipeline") ? nlohmann::json{{"kind", cfg["pipeline"]}}
                                                           : nlohmann::json::object();
            if (!pipeline.empty()) pj["kind"] = pipeline;
            if (fb) pj["fb"] = *fb;
            if (trials) pj["trials"] = *trials;
            if (loco) pj["loco"] = true;
            if (mirror) pj["mirror"] = true;
            cfg["pipeline"] = pj;
        }
        auto resolved = c::parse_run_config(cfg, base);
        for (auto& in : inputs) resolved.inputs.insert(resolved.inputs.begin(), in);
        return c::cmd_run_qv(resolved, out_dir, ctx);
    });
}
