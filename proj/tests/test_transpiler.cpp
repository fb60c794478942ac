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


#include "oracles.hpp"
#include "qvol/model.hpp"
#include "qvol/pipeline.hpp"

#include <gtest/gtest.h>

namespace qvol {
namespace {

using namespace passes;
using testing::random_circuit;
using testing::relabel;
using testing::unitary_oracle;

double one_minus_f(const MatX& a, const MatX& b) { return 1 - avg_fidelity(a, b); }

// Routed unitary with inputs relabelled back onto logical wires, against I (x) U.
double routed_error(const Circuit& logical, const Circuit& routed, const std::vector<int>& input_perm) {
    const int extra = routed.width() - logical.width();
    const MatX id = MatX::Identity(std::size_t{1} << extra, std::size_t{1} << extra);
    return one_minus_f(unitary_oracle(routed) * relabel(input_perm), kron(id, circuit_unitary(logical)));
}

bool respects_directed(const Circuit& c, const CouplingGraph& g) {
    for (const auto& gt : c.gates())
        if (gt.kind == GateKind::CX && !g.has_edge(gt.qubits[0], gt.qubits[1])) return false;
    return true;
}

bool respects_undirected(const Circuit& c, const CouplingGraph& g) {
    for (const auto& gt : c.gates())
        if (gt.is_two_qubit_unitary() && !g.adjacent(gt.qubits[0], gt.qubits[1])) return false;
    return true;
}

std::vector<int> brute_bfs_distance(const CouplingGraph& g, int a) {
    std::vector<int> d(g.size(), -1);
    d[a] = 0;
    for (int round = 0; round < g.size(); ++round)
        for (auto [x, y] : g.edges()) {
            if (d[x] >= 0 && (d[y] < 0 || d[y] > d[x] + 1)) d[y] = d[x] + 1;
            if (d[y] >= 0 && (d[x] < 0 || d[x] > d[y] + 1)) d[x] = d[y] + 1;
        }
    return d;
}

TEST(Coupling, Presets) {
    EXPECT_EQ(CouplingGraph::line(4).undirected_edges().size(), 3U);
    EXPECT_EQ(CouplingGraph::loop(5).undirected_edges().size(), 5U);
    EXPECT_EQ(CouplingGraph::all_to_all(5).undirected_edges().size(), 10U);
    // 3x3 square with right column 9, 10, 11
    const auto g = CouplingGraph::grid(12);
    EXPECT_TRUE(g.adjacent(2, 9));
    EXPECT_TRUE(g.adjacent(5, 10));
    EXPECT_TRUE(g.adjacent(9, 10));
    EXPECT_EQ(g.undirected_edges().size(), 17U);
    const auto g10 = CouplingGraph::grid(10);
    EXPECT_TRUE(g10.adjacent(2, 9));
    EXPECT_EQ(g10.undirected_edges().size(), 13U);
}

TEST(Coupling, DistancesMatchRelaxation) {
    for (const auto& g : {CouplingGraph::grid(7), CouplingGraph::loop(6), CouplingGraph::line(5)})
        for (int a = 0; a < g.size(); ++a) {
            const auto d = brute_bfs_distance(g, a);
            for (int b = 0; b < g.size(); ++b) EXPECT_EQ(g.distance(a, b), d[b]);
        }
}

TEST(Coupling, RejectsBadEdges) {
    EXPECT_THROW(CouplingGraph(3, {{0, 0}}), InvalidArgument);
    EXPECT_THROW(CouplingGraph(3, {{0, 3}}), InvalidArgument);
}

TEST(Coupling, JsonRoundTripAndPresetParsing) {
    const auto g = CouplingGraph::grid(6);
    const auto back = coupling_graph_from_json(to_json(g));
    EXPECT_EQ(back.size(), g.size());
    EXPECT_EQ(back.edges(), g.edges());
    CouplingGraph p;
    ASSERT_TRUE(parse_preset("line(4)", p));
    EXPECT_EQ(p.size(), 4);
    EXPECT_FALSE(parse_preset("tokyo", p));
}

TEST(Unroll, SwapBecomesThreeCnots) {
    Circuit c(2);
    c.append(Gate::swap(0, 1));
    const auto u = unroll(c);
    ASSERT_EQ(u.size(), 3U);
    EXPECT_EQ(u.gates()[0], Gate::cx(0, 1));
    EXPECT_EQ(u.gates()[1], Gate::cx(1, 0));
    EXPECT_EQ(u.gates()[2], Gate::cx(0, 1));
}

TEST(Unroll, HadamardBecomesU2) {
    Circuit c(1);
    c.append(Gate::h(0));
    const auto u = unroll(c);
    ASSERT_EQ(u.size(), 1U);
    EXPECT_EQ(u.gates()[0], Gate::u2(0, 0, kPi));
}

TEST(Unroll, Su4BecomesBasisGates) {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        Circuit c(3);
        c.append(Gate::su4(2, 0, haar_su4(rng)));
        const auto u = unroll(c);
        EXPECT_LE(u.count(GateKind::CX), 3U);
        for (const auto& g : u.gates())
            EXPECT_TRUE(g.kind == GateKind::CX || g.kind == GateKind::U1 || g.kind == GateKind::U2 ||
                        g.kind == GateKind::U3);
        EXPECT_LT(phase_distance(circuit_unitary(u), circuit_unitary(c)), 1e-9);
    }
}

TEST(SwapMap, AllToAllNeedsNoSwaps) {
    const auto c = unroll(build_model_circuit({4, 4, 2}));
    const auto r = swap_map(c, CouplingGraph::all_to_all(4));
    EXPECT_EQ(r.swaps, 0);
    EXPECT_EQ(r.output_permutation(), identity_permutation(4));
    EXPECT_EQ(r.initial_layout, identity_permutation(4));
}

TEST(SwapMap, DistantCnotOnLine) {
    Circuit c(3);
    c.append(Gate::cx(0, 2));
    const auto g = CouplingGraph::line(3);
    const auto r = swap_map(c, g);
    EXPECT_GE(r.swaps, 1);
    EXPECT_TRUE(respects_undirected(r.circuit, g));
    EXPECT_LT(routed_error(c, r.circuit, r.initial_layout), 1e-12);
}

TEST(SwapMap, ModelCircuitsOnLine) {
    const auto g = CouplingGraph::line(4);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto c = unroll(build_model_circuit({4, 4, s}));
        const auto r = swap_map(c, g, {s});
        ASSERT_TRUE(respects_undirected(r.circuit, g)) << s;
        EXPECT_LT(routed_error(c, r.circuit, r.initial_layout), 1e-9) << s;
    }
}

TEST(SwapMap, SmallerCircuitOnLargerGraph) {
    const auto g = CouplingGraph::grid(5);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto c = unroll(build_model_circuit({3, 3, s}));
        for (bool dense : {false, true}) {
            const auto r = swap_map(c, g, {s, 40, false, dense});
            EXPECT_EQ(r.circuit.width(), 5);
            EXPECT_LT(routed_error(c, r.circuit, r.initial_layout), 1e-9);
        }
    }
}

TEST(SwapMap, MirroredRoutingKeepsSemantics) {
    const auto g = CouplingGraph::line(5);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto c = build_model_circuit({5, 5, s});
        const auto r = swap_map(c, g, {s, 40, true});
        EXPECT_TRUE(respects_undirected(r.circuit, g));
        EXPECT_LT(one_minus_f(circuit_unitary(r.circuit) * relabel(r.initial_layout), circuit_unitary(c)), 1e-9);
    }
}

TEST(SwapMap, DisconnectedGraphFails) {
    Circuit c(2);
    c.append(Gate::cx(0, 1));
    EXPECT_THROW(swap_map(c, CouplingGraph(2, {})), MappingError);
}

TEST(DensestPlacement, PicksCoupledRegion) {
    const CouplingGraph g(6, {{0, 1}, {2, 3}, {3, 4}, {4, 2}, {4, 5}});
    auto p = densest_placement(g, 3);
    std::sort(p.begin(), p.end());
    EXPECT_EQ(p, (std::vector<int>{2, 3, 4}));
}

TEST(Reorient, FlipsAgainstEdge) {
    const CouplingGraph g(2, {{0, 1}});
    Circuit c(2);
    c.append(Gate::cx(1, 0));
    const auto r = cnot_reorient(c, g);
    EXPECT_EQ(r.count(GateKind::H), 4U);
    EXPECT_TRUE(respects_directed(r, g));
    EXPECT_LT((circuit_unitary(r) - circuit_unitary(c)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Reorient, KeepsAlignedCnot) {
    const CouplingGraph g(2, {{0, 1}});
    Circuit c(2);
    c.append(Gate::cx(0, 1));
    EXPECT_EQ(cnot_reorient(c, g), c);
}

TEST(Reorient, MissingEdgeIsAnError) {
    Circuit c(3);
    c.append(Gate::cx(0, 2));
    EXPECT_THROW(cnot_reorient(c, CouplingGraph::line(3)), MappingError);
}

TEST(Cancel, EvenAndOddRuns) {
    Circuit two(2), three(2);
    two.append(Gate::cx(0, 1)).append(Gate::cx(0, 1));
    three.append(Gate::cx(0, 1)).append(Gate::cx(0, 1)).append(Gate::cx(0, 1));
    EXPECT_TRUE(cnot_cancel(two).empty());
    const auto r = cnot_cancel(three);
    ASSERT_EQ(r.size(), 1U);
    EXPECT_EQ(r.gates()[0], Gate::cx(0, 1));
}

TEST(Cancel, DisjointGateDoesNotBlock) {
    Circuit c(3);
    c.append(Gate::cx(0, 1)).append(Gate::u1(2, 0.4)).append(Gate::cx(0, 1));
    const auto r = cnot_cancel(c);
    EXPECT_EQ(r.count(GateKind::CX), 0U);
    EXPECT_LT((circuit_unitary(r) - circuit_unitary(c)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cancel, BlockedByGatesOnThePair) {
    Circuit c(2), rev(2), bar(2);
    c.append(Gate::cx(0, 1)).append(Gate::u1(1, 0.4)).append(Gate::cx(0, 1));
    rev.append(Gate::cx(0, 1)).append(Gate::cx(1, 0));
    bar.append(Gate::cx(0, 1)).append(Gate::barrier({0, 1})).append(Gate::cx(0, 1));
    EXPECT_EQ(cnot_cancel(c).count(GateKind::CX), 2U);
    EXPECT_EQ(cnot_cancel(rev).count(GateKind::CX), 2U);
    EXPECT_EQ(cnot_cancel(bar).count(GateKind::CX), 2U);
}

TEST(Optimize1q, MergesPhases) {
    Circuit c(1);
    c.append(Gate::u1(0, 0.3)).append(Gate::u1(0, 0.5));
    const auto r = optimize_1q(c);
    ASSERT_EQ(r.size(), 1U);
    EXPECT_EQ(r.gates()[0].kind, GateKind::U1);
    EXPECT_NEAR(r.gates()[0].params[0], 0.8, 1e-12);
}

TEST(Optimize1q, U2PairWithCancellingAngles) {
    Circuit c(1);
    c.append(Gate::u2(0, 0.3, 0.7)).append(Gate::u2(0, -0.7, 1.1));
    const auto r = optimize_1q(c);
    ASSERT_EQ(r.size(), 1U);
    EXPECT_LE(pulse_count(r.gates()[0]), 2);
    EXPECT_LT(phase_distance(circuit_unitary(r), circuit_unitary(c)), 1e-9);
}

TEST(Optimize1q, InverseGatesVanish) {
    Circuit c(1);
    c.append(Gate::u3(0, 0.4, 0.2, 0.1)).append(Gate::u3(0, -0.4, -0.1, -0.2));
    EXPECT_TRUE(optimize_1q(c).empty());
}

TEST(Optimize1q, LoneU3IsKept) {
    Circuit c(1);
    c.append(Gate::u3(0, 0.4, 0.2, 0.1));
    EXPECT_EQ(optimize_1q(c), c);
}

TEST(Optimize1q, PreservesUnitaryAndPulseBudget) {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto c = unroll(random_circuit(3, 30, rng));
        const auto r = optimize_1q(c);
        EXPECT_LT(phase_distance(circuit_unitary(r), circuit_unitary(c)), 1e-9);
        int before = 0, after = 0;
        for (const auto& g : c.gates()) before += g.is_single_qubit_unitary() ? pulse_count(g) : 0;
        for (const auto& g : r.gates()) after += g.is_single_qubit_unitary() ? pulse_count(g) : 0;
        EXPECT_LE(after, before);
    }
}

TEST(Passes, CancelAndOptimizeAreIdempotent) {
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        const auto c = unroll(random_circuit(4, 40, rng));
        const auto once = cnot_cancel(c);
        EXPECT_EQ(cnot_cancel(once), once);
        const auto o1 = optimize_1q(c);
        const auto o2 = optimize_1q(o1);
        ASSERT_EQ(o2.size(), o1.size());
        EXPECT_LT(phase_distance(circuit_unitary(o2), circuit_unitary(o1)), 1e-9);
    }
}

TEST(Blocks, SamePairRunIsOneBlock) {
    Circuit c(2);
    c.append(Gate::cx(0, 1)).append(Gate::u1(0, 0.2)).append(Gate::cx(0, 1)).append(Gate::u2(1, 0.1, 0.3));
    c.append(Gate::cx(0, 1));
    const auto items = block_collect(c);
    ASSERT_EQ(items.size(), 1U);
    EXPECT_EQ(std::get<Block>(items[0]).gates.size(), 5U);
}

TEST(Blocks, DifferentPairsSplit) {
    Circuit c(3);
    c.append(Gate::cx(0, 1)).append(Gate::cx(1, 2));
    EXPECT_EQ(block_collect(c).size(), 2U);
}

TEST(Blocks, ReassemblyReproducesCircuit) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto c = run_pipeline(build_model_circuit({4, 4, s}), CouplingGraph::line(4), PassPipeline::standard())
                           .circuit;
        const auto items = block_collect(c);
        std::size_t gates = 0;
        for (const auto& it : items) {
            if (const auto* b = std::get_if<Block>(&it)) {
                gates += b->gates.size();
                for (const auto& g : b->gates)
                    for (int q : g.qubits) EXPECT_TRUE(q == b->qubits[0] || q == b->qubits[1]);
            } else {
                ++gates;
            }
        }
        EXPECT_EQ(gates, c.size());
        EXPECT_LT((circuit_unitary(reassemble(c, items)) - circuit_unitary(c)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(BlockOptimize, IdentityBlockLosesAllCnots) {
    Circuit c(2);
    c.append(Gate::cx(0, 1)).append(Gate::u1(1, 0.5)).append(Gate::u1(1, -0.5)).append(Gate::cx(0, 1));
    const auto r = block_optimize(c);
    EXPECT_EQ(r.count(GateKind::CX), 0U);
    EXPECT_LT(phase_distance(circuit_unitary(r), circuit_unitary(c)), 1e-9);
}

TEST(BlockOptimize, TripleCnotBecomesOne) {
    Circuit c(2);
    c.append(Gate::cx(0, 1)).append(Gate::cx(0, 1)).append(Gate::cx(0, 1));
    const auto r = block_optimize(c);
    EXPECT_EQ(r.count(GateKind::CX), 1U);
    EXPECT_LT(phase_distance(circuit_unitary(r), circuit_unitary(c)), 1e-9);
}

TEST(BlockOptimize, ExactNeverExceedsThreePerBlock) {
    Rng rng(5);
    for (int i = 0; i < 30; ++i) {
        const auto c = unroll(random_circuit(3, 40, rng));
        std::vector<BlockReport> rep;
        const auto r = block_optimize(c, {}, &rep);
        for (const auto& b : rep) EXPECT_LE(b.final_cx, std::min<std::size_t>(3, b.original_cx));
        EXPECT_LT(phase_distance(circuit_unitary(r), circuit_unitary(c)), 1e-9);
    }
}

TEST(BlockOptimize, ApproximateBlocksMeetPrediction) {
    Rng rng(6);
    for (int i = 0; i < 20; ++i) {
        const auto c = unroll(build_model_circuit({3, 3, 100 + static_cast<std::uint64_t>(i)}));
        std::vector<BlockReport> rep;
        block_optimize(c, {0.97}, &rep);
        for (const auto& b : rep) {
            if (!b.replaced) continue;
            const double got = avg_fidelity(Mat4(circuit_unitary(b.synthesized)), b.target);
            EXPECT_NEAR(got, b.choice.approximation_fidelity, 1e-9);
        }
    }
}

TEST(Loco, BandwidthOneLineIsUnchanged) {
    Circuit c(4);
    c.append(Gate::cx(0, 1)).append(Gate::cx(1, 2)).append(Gate::cx(2, 3));
    std::vector<int> label;
    EXPECT_EQ(loco(c, &label), c);
    EXPECT_EQ(label, identity_permutation(4));
}

TEST(Loco, ReachesOptimalBandwidth) {
    Circuit c(4);
    c.append(Gate::cx(0, 3)).append(Gate::cx(3, 1)).append(Gate::cx(1, 2));
    std::vector<int> label;
    const auto r = loco(c, &label);
    const auto a = interaction_matrix(c);
    std::vector<int> p = identity_permutation(4);
    int best = 99;
    do best = std::min(best, bandwidth(a, p));
    while (std::next_permutation(p.begin(), p.end()));
    EXPECT_EQ(best, 1);
    EXPECT_EQ(bandwidth(a, label), best);
    EXPECT_EQ(bandwidth(interaction_matrix(r), identity_permutation(4)), best);
}

TEST(Loco, RelabelingContract) {
    Rng rng(7);
    for (int i = 0; i < 30; ++i) {
        const auto c = random_circuit(5, 20, rng);
        std::vector<int> label;
        const auto r = loco(c, &label);
        EXPECT_LT((unitary_oracle(r) * relabel(label) - unitary_oracle(c)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Pipeline, ValidatesOrdering) {
    PassPipeline p;
    p.passes = {PassId::Unroll, PassId::Reorient};
    EXPECT_THROW(p.validate(), InvalidArgument);
    p.passes = {PassId::SwapMap, PassId::Loco};
    EXPECT_THROW(p.validate(), InvalidArgument);
    EXPECT_NO_THROW(PassPipeline::make(PipelineKind::Approx, 0.97, true, true).validate());
}

TEST(Pipeline, EmptyCircuit) {
    const auto r = run_pipeline(Circuit(3), CouplingGraph::line(3), PassPipeline::standard());
    EXPECT_TRUE(r.circuit.empty());
    EXPECT_EQ(r.output_permutation(), identity_permutation(3));
}

TEST(Pipeline, WidthTwoAllToAll) {
    const auto c = build_model_circuit({2, 2, 5});
    const auto g = CouplingGraph::all_to_all(2);
    const auto r = run_pipeline(c, g, PassPipeline::standard());
    for (const auto& gt : r.circuit.gates())
        EXPECT_TRUE(gt.kind == GateKind::CX || gt.kind == GateKind::U1 || gt.kind == GateKind::U2 ||
                    gt.kind == GateKind::U3);
    EXPECT_TRUE(respects_directed(r.circuit, g));
    EXPECT_LT(routed_error(c, r.circuit, r.input_permutation()), 1e-6);
}

TEST(Pipeline, ExactModesPreserveSemantics) {
    struct Case {
        CouplingGraph g;
        PassPipeline p;
    };
    std::vector<Case> cases{{CouplingGraph::line(4), PassPipeline::standard()},
                            {CouplingGraph::line(4), PassPipeline::kak()},
                            {CouplingGraph::grid(5), PassPipeline::make(PipelineKind::Kak, 1.0, true, true)},
                            {load_coupling_graph(std::string(QVOL_DATA_DIR) + "/graphs/tenerife.json"),
                             PassPipeline::make(PipelineKind::Standard, 1.0, true)}};
    for (auto& cs : cases)
        for (std::uint64_t s = 0; s < 10; ++s) {
            cs.p.seed = s;
            const int m = std::min(cs.g.size(), 3 + static_cast<int>(s % 3));
            const auto c = build_model_circuit({m, m, 300 + s});
            const auto r = run_pipeline(c, cs.g, cs.p);
            EXPECT_TRUE(respects_directed(r.circuit, cs.g)) << cs.g.name();
            EXPECT_LT(routed_error(c, r.circuit, r.input_permutation()), 1e-6) << cs.g.name() << ' ' << s;
        }
}

TEST(Pipeline, KakNeverUsesMoreCnotsThanStandard) {
    const auto g = CouplingGraph::line(4);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto c = build_model_circuit({4, 4, s});
        auto ps = PassPipeline::standard(), pk = PassPipeline::kak();
        ps.seed = pk.seed = s;
        EXPECT_LE(cx_count(run_pipeline(c, g, pk).circuit), cx_count(run_pipeline(c, g, ps).circuit));
    }
}

TEST(Pipeline, RejectsOversizedCircuit) {
    EXPECT_THROW(run_pipeline(Circuit(5), CouplingGraph::line(4), PassPipeline::standard()), MappingError);
}

}  // namespace
}  // namespace qvol
