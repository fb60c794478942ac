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

#include <gtest/gtest.h>

namespace qvol::cli {
namespace {

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qvol_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        ctx_.log = &log_;
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::map<std::string, std::string> files(const std::string& sub) const {
        std::map<std::string, std::string> out;
        for (const auto& e : fs::directory_iterator(dir_ / sub))
            if (e.path().filename() != "manifest.json") out[e.path().filename().string()] = read_file(e.path());
        return out;
    }

    void expect_replay_identical(const std::string& sub) {
        RunContext other{3, &log_};
        ASSERT_EQ(cmd_replay(path(sub + "/manifest.json"), path(sub + "_replay"), other), 0);
        EXPECT_EQ(files(sub), files(sub + "_replay"));
    }

    fs::path dir_;
    std::ostringstream log_;
    RunContext ctx_;
};

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

TEST(Sha256, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Config, FieldPathsInErrors) {
    EXPECT_EQ(error_of([] { parse_run_config({{"widths", {2, 1}}}); }), "config.widths[1]: expected an integer >= 2");
    EXPECT_NE(error_of([] { parse_run_config({{"circuits", "many"}}); }).find("config.circuits"), std::string::npos);
    EXPECT_NE(error_of([] { parse_run_config({{"pipeline", {{"fb", "x"}}}}); }).find("config.pipeline.fb"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_run_config({{"noise", {{"eps2", 2.0}}}}); }).find("eps2"), std::string::npos);
    EXPECT_NE(error_of([] { parse_run_config({{"colour", 1}}); }).find("config.colour"), std::string::npos);
    EXPECT_NE(error_of([] { parse_run_config({{"circuits", 99}}); }).find("config.circuits"), std::string::npos);
}

TEST(Config, ResolvesDevicesAndPresets) {
    const auto c = parse_run_config({{"graph", "tokyo"}, {"noise", "tokyo"}, {"widths", {4}}});
    ASSERT_TRUE(c.trial.graph.fixed.has_value());
    EXPECT_EQ(c.trial.graph.fixed->size(), 20);
    EXPECT_NEAR(c.trial.noise.eps2, 0.021, 1e-12);
    EXPECT_EQ(c.inputs.size(), 2U);
    const auto g = parse_run_config({{"graph", "grid"}});
    EXPECT_FALSE(g.trial.graph.fixed.has_value());
    EXPECT_EQ(g.trial.graph.family, Topology::Grid);
    EXPECT_EQ(parse_run_config({{"graph", "line(6)"}}).trial.graph.fixed->size(), 6);
}

TEST(Config, ShippedDeviceGraphs) {
    for (const auto& [name, n] : std::vector<std::pair<std::string, int>>{
             {"tenerife", 5}, {"melbourne", 14}, {"tokyo", 20}, {"johannesburg", 20}}) {
        const auto g = resolve_graph(name);
        ASSERT_TRUE(g.spec.fixed.has_value()) << name;
        EXPECT_EQ(g.spec.fixed->size(), n);
        EXPECT_TRUE(g.spec.fixed->connected()) << name;
    }
}

TEST(Config, RoundTripsThroughJson) {
    const auto c = parse_run_config({{"graph", "grid"},
                                     {"widths", {2, 3}},
                                     {"noise", {{"eps1", 0.001}, {"eps2", 0.01}, {"epsM", 0.0}}},
                                     {"pipeline", {{"kind", "approx"}, {"fb", 0.97}}}});
    const auto back = parse_run_config(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json());
}

TEST_F(CliTest, GenerateWritesParsableCircuitsAndHeavySets) {
    GenerateOptions o{2, 2, 3, 5, path("gen")};
    ASSERT_EQ(cmd_generate(o, ctx_), 0);
    for (int i = 0; i < 3; ++i) {
        const auto c = parse_qasm(read_file(path("gen/" + circuit_file_stem(i) + ".qasm")));
        const auto model = build_model_circuit({2, 2, model_circuit_seed(5, 2, 2, i)});
        EXPECT_LT(phase_distance(circuit_unitary(c), circuit_unitary(model)), 1e-9);
        const auto hj = parse_json_file(path("gen/" + circuit_file_stem(i) + ".heavy.json"));
        const auto hs = heavy_set(model);
        EXPECT_EQ(hj["heavy_outputs"].get<std::vector<std::uint64_t>>(), hs.members);
        EXPECT_NEAR(hj["ideal_heavy_probability"].get<double>(), hs.ideal_heavy_probability, 1e-12);
    }
    expect_replay_identical("gen");
}

TEST_F(CliTest, TranspileRespectsGraphAndReplays) {
    ASSERT_EQ(cmd_generate({4, 4, 4, 6, path("gen")}, ctx_), 0);
    TranspileOptions o;
    for (int i = 0; i < 4; ++i) o.inputs.push_back(path("gen/" + circuit_file_stem(i) + ".qasm"));
    o.graph = "line(4)";
    o.pipeline = "kak";
    o.out = path("tr");
    ASSERT_EQ(cmd_transpile(o, ctx_), 0);
    const auto g = CouplingGraph::line(4);
    for (int i = 0; i < 4; ++i) {
        const auto c = parse_qasm(read_file(path("tr/" + circuit_file_stem(i) + ".transpiled.qasm")));
        for (const auto& gt : c.gates()) {
            if (gt.kind == GateKind::CX) {
                EXPECT_TRUE(g.has_edge(gt.qubits[0], gt.qubits[1]));
            }
        }
        const auto mj = parse_json_file(path("tr/" + circuit_file_stem(i) + ".mapping.json"));
        const auto perm = mj["input_permutation"].get<std::vector<int>>();
        const auto src = parse_qasm(read_file(o.inputs[i]));
        EXPECT_LT(phase_distance(circuit_unitary(c) * permutation_matrix(perm), circuit_unitary(src)), 1e-8);
    }
    expect_replay_identical("tr");
}

TEST_F(CliTest, TranspileReportsFileOnParseError) {
    write_file(path("bad.qasm"), "OPENQASM 2.0;\nqreg q[2];\ncreg c[2];\nfoo q[0];\n");
    TranspileOptions o;
    o.inputs = {path("bad.qasm")};
    o.out = path("tr");
    const auto msg = error_of([&] { cmd_transpile(o, ctx_); });
    EXPECT_NE(msg.find("bad.qasm: line 4"), std::string::npos) << msg;
}

TEST_F(CliTest, RunQvReplaysWithOtherJobCount) {
    auto cfg = parse_run_config({{"widths", {2, 3}},
                                 {"circuits", 100},
                                 {"shots", 40},
                                 {"seed", 7},
                                 {"graph", "grid"},
                                 {"noise", {{"eps1", 0.002}, {"eps2", 0.02}, {"epsM", 0.01}}}});
    ASSERT_EQ(cmd_run_qv(cfg, path("rq"), ctx_), 0);
    const auto rep = parse_json_file(path("rq/report.json"));
    EXPECT_EQ(rep["schema_version"], 1);
    EXPECT_EQ(rep["points"].size(), 2U);
    expect_replay_identical("rq");
}

TEST_F(CliTest, ReplayRejectsChangedInputs) {
    ASSERT_EQ(cmd_generate({2, 2, 1, 1, path("gen")}, ctx_), 0);
    TranspileOptions o;
    o.inputs = {path("gen/" + circuit_file_stem(0) + ".qasm")};
    o.out = path("tr");
    ASSERT_EQ(cmd_transpile(o, ctx_), 0);
    write_file(o.inputs[0], read_file(o.inputs[0]) + "u1(0.5) q[0];\n");
    EXPECT_THROW(cmd_replay(path("tr/manifest.json"), "", ctx_), InvalidArgument);
}

TEST_F(CliTest, ApproxStatsAndEstimateReplay) {
    ASSERT_EQ(cmd_approx_stats({0.97, 3000, true, 2, path("ap")}, ctx_), 0);
    const auto j = parse_json_file(path("ap/approx_stats.json"));
    EXPECT_NEAR(j["mean_applications"].get<double>(), 2.0, 0.1);
    expect_replay_identical("ap");
    EstimateOptions e;
    e.eps = {0.03, 0.015, 0.008, 0.0032};
    e.topology = "grid";
    e.out = path("est");
    ASSERT_EQ(cmd_estimate(e, ctx_), 0);
    expect_replay_identical("est");
}

TEST(Guarded, ExitCodes) {
    std::ostringstream err;
    EXPECT_EQ(guarded([] { return 0; }, err), kOk);
    EXPECT_EQ(guarded([]() -> int { throw InvalidArgument("x"); }, err), kUsage);
    EXPECT_EQ(guarded([]() -> int { throw QasmError(1, 2, "x"); }, err), kUsage);
    EXPECT_EQ(guarded([]() -> int { throw Error("x"); }, err), kNumerical);
}

}  // namespace
}  // namespace qvol::cli
