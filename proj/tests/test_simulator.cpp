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
#include "qvol/simulator.hpp"

#include <gtest/gtest.h>

namespace qvol {
namespace {

using testing::random_circuit;
using testing::unitary_oracle;

double binomial_sigma(double p, double n) { return std::sqrt(p * (1 - p) / n); }

Circuit compiled(const Circuit& c) {
    return run_pipeline(c, CouplingGraph::all_to_all(c.width()), PassPipeline::standard()).circuit;
}

TEST(IdealProbabilities, EmptyAndHadamard) {
    EXPECT_EQ(ideal_probabilities(Circuit(2)), (std::vector<double>{1, 0, 0, 0}));
    Circuit h(1);
    h.append(Gate::h(0));
    const auto p = ideal_probabilities(h);
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(IdealProbabilities, MatchDenseFirstColumn) {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        auto c = random_circuit(3, 15, rng);
        c.set_output_permutation({1, 2, 0});
        const auto p = ideal_probabilities(c);
        const MatX u = unitary_oracle(c);
        double sum = 0;
        for (std::size_t x = 0; x < 8; ++x) {
            EXPECT_NEAR(p[x], std::norm(u(x, 0)), 1e-10);
            sum += p[x];
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(IdealProbabilities, WidthGuard) {
    EXPECT_THROW(Statevector(kMaxStatevectorWidth + 1), InvalidArgument);
}

TEST(Statevector, NormDriftOverManyGates) {
    Rng rng(2);
    Statevector sv(5);
    const auto c = random_circuit(5, 10000, rng);
    for (const auto& g : c.gates()) sv.apply(g);
    EXPECT_LT(std::abs(sv.norm_squared() - 1.0), 1e-9);
}

TEST(HeavySet, IdentityCircuit) {
    const auto hs = heavy_set(Circuit(2));
    EXPECT_EQ(hs.median, 0.0);
    EXPECT_EQ(hs.members, (std::vector<std::uint64_t>{0}));
    EXPECT_EQ(hs.ideal_heavy_probability, 1.0);
}

TEST(HeavySet, UniformHasNoMembers) {
    const auto hs = heavy_set(std::vector<double>(8, 0.125));
    EXPECT_TRUE(hs.members.empty());
    EXPECT_EQ(hs.ideal_heavy_probability, 0.0);
}

TEST(HeavySet, BruteForceOnWidthTwo) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto c = build_model_circuit({2, 2, s});
        const auto p = ideal_probabilities(c);
        const auto hs = heavy_set(c);
        // x is heavy iff at least two of the four outcomes have smaller probability
        for (std::uint64_t x = 0; x < 4; ++x) {
            int below = 0;
            for (std::uint64_t y = 0; y < 4; ++y) below += p[y] < p[x];
            EXPECT_EQ(hs.contains(x), below >= 2);
        }
    }
}

TEST(HeavySet, HalfTheOutcomesForHaarCircuits) {
    for (int m = 2; m <= 6; ++m)
        for (std::uint64_t s = 0; s < 10; ++s)
            EXPECT_EQ(heavy_set(build_model_circuit({m, m, s})).members.size(), std::size_t{1} << (m - 1));
}

TEST(HeavySet, IdealAsymptote) {
    double sum = 0;
    for (std::uint64_t s = 0; s < 200; ++s) sum += heavy_set(build_model_circuit({5, 5, s})).ideal_heavy_probability;
    EXPECT_NEAR(sum / 200, (1 + std::log(2.0)) / 2, 0.03);
}

TEST(Sampling, NoiselessIdentityAlwaysZero) {
    for (auto x : sample_outputs(Circuit(3), NoiseModel{}, 500, 1)) EXPECT_EQ(x, 0U);
}

TEST(Sampling, ReadoutFlipsHalf) {
    NoiseModel n;
    n.epsM = 0.5;
    const auto s = sample_outputs(Circuit(1), n, 100000, 2);
    const double ones = std::count(s.begin(), s.end(), 1U) / 1e5;
    EXPECT_NEAR(ones, 0.5, 3 * binomial_sigma(0.5, 1e5));
}

TEST(Sampling, DeterministicInSeed) {
    NoiseModel n{0.01, 0.05, 0.02, {}};
    const auto c = compiled(build_model_circuit({4, 4, 3}));
    EXPECT_EQ(sample_outputs(c, n, 300, 9), sample_outputs(c, n, 300, 9));
    EXPECT_NE(sample_outputs(c, n, 300, 9), sample_outputs(c, n, 300, 10));
}

TEST(Sampling, SingleGateDepolarizingMatchesChannel) {
    const double theta = 0.7, p = 0.3, shots = 100000;
    Circuit c(1);
    c.append(Gate::u3(0, theta, 0, 0));
    const auto s = sample_outputs(c, NoiseModel{p, 0, 0, {}}, static_cast<std::size_t>(shots), 3);
    const double sn = std::pow(std::sin(theta / 2), 2), cs = 1 - sn;
    // X and Y flip the outcome distribution, Z leaves it
    const double want = (1 - p) * sn + p * (2.0 / 3 * cs + 1.0 / 3 * sn);
    EXPECT_NEAR(std::count(s.begin(), s.end(), 1U) / shots, want, 3 * binomial_sigma(want, shots));
}

TEST(Sampling, TwoQubitDepolarizingMatchesChannel) {
    // Bell state: odd-parity outcomes appear only after a Pauli that flips exactly one bit
    Circuit c(2);
    c.append(Gate::h(0)).append(Gate::cx(0, 1));
    const double p = 0.4, shots = 100000;
    int even_paulis = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            if (a == 0 && b == 0) continue;
            const bool flip_a = a == 1 || a == 2, flip_b = b == 1 || b == 2;
            even_paulis += flip_a == flip_b;
        }
    const double want_odd = p * (15 - even_paulis) / 15.0;
    const auto s = sample_outputs(c, NoiseModel{0, p, 0, {}}, static_cast<std::size_t>(shots), 4);
    const double odd = std::count_if(s.begin(), s.end(), [](auto x) { return x == 1 || x == 2; }) / shots;
    EXPECT_NEAR(odd, want_odd, 3 * binomial_sigma(want_odd, shots));
}

TEST(Sampling, FullDepolarizationGivesHalfHeavy) {
    std::size_t heavy = 0, total = 0;
    for (double eps2 : {15.0 / 16, 1.0})
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto c = build_model_circuit({4, 8, s});
            const auto samples = sample_outputs(compiled(c), NoiseModel{0, eps2, 0, {}}, 200, 100 + s);
            heavy += heavy_fraction(samples, heavy_set(c)).n_h;
            total += samples.size();
        }
    EXPECT_NEAR(double(heavy) / total, 0.5, 3 * binomial_sigma(0.5, double(total)));
}

TEST(Sampling, HeavyFractionNonIncreasingInNoise) {
    std::vector<Circuit> cs;
    std::vector<HeavySet> hs;
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto c = build_model_circuit({3, 3, s});
        cs.push_back(compiled(c));
        hs.push_back(heavy_set(c));
    }
    double prev = 1;
    const double shots = 30 * 1000;
    for (double e : {0.0, 0.01, 0.03, 0.05}) {
        std::size_t n = 0;
        for (std::size_t i = 0; i < cs.size(); ++i)
            n += heavy_fraction(sample_outputs(cs[i], NoiseModel{e / 10, e, 0, {}}, 1000, 7 + i), hs[i]).n_h;
        const double h = n / shots;
        EXPECT_LE(h, prev + 3 * binomial_sigma(h, shots)) << e;
        prev = h;
    }
}

TEST(HeavyFraction, CountsMembers) {
    HeavySet hs;
    hs.members = {1, 3};
    const std::vector<std::uint64_t> all{1, 3, 3}, none{0, 2};
    EXPECT_EQ(heavy_fraction(all, hs).h_hat, 1.0);
    EXPECT_EQ(heavy_fraction(none, hs).n_h, 0U);
    EXPECT_EQ(heavy_fraction(all, HeavySet{}).h_hat, 0.0);
}

TEST(HeavyFraction, IdealSamplingMatchesHeavySum) {
    const auto c = build_model_circuit({2, 2, 5});
    const auto hs = heavy_set(c);
    const auto s = sample_outputs(compiled(c), NoiseModel{}, 100000, 6);
    EXPECT_NEAR(heavy_fraction(s, hs).h_hat, hs.ideal_heavy_probability,
                3 * binomial_sigma(hs.ideal_heavy_probability, 1e5));
}

TEST(CompactWires, DropsIdleExtraWires) {
    Circuit c(5);
    c.append(Gate::cx(3, 1)).append(Gate::u1(0, 0.2));
    c.set_output_permutation({1, 4, 3, 0, 2});
    // wires 2 and 4 are idle with labels 3 and 2, so both go
    const auto k = compact_wires(c, 2);
    EXPECT_EQ(k.width(), 3);
    EXPECT_EQ(k.output_permutation(), (std::vector<int>{1, 2, 0}));
    const auto pk = marginal_low_bits(ideal_probabilities(k), 2), pc = marginal_low_bits(ideal_probabilities(c), 2);
    for (std::size_t x = 0; x < 4; ++x) EXPECT_NEAR(pk[x], pc[x], 1e-12);
}

TEST(NoiseModel, JsonAndInterpretation) {
    const auto n = noise_model_from_json({{"eps1", 0.001}, {"eps2", 0.02}, {"epsM", 0.03}});
    EXPECT_EQ(n.eps2, 0.02);
    const auto inf = noise_model_from_json({{"eps1", 0.001}, {"eps2", 0.02}, {"epsM", 0.0}, {"interpretation", "infidelity"}});
    EXPECT_NEAR(inf.eps2, 0.02 * 5 / 4, 1e-15);
    EXPECT_NEAR(inf.eps1, 0.001 * 3 / 2, 1e-15);
    EXPECT_THROW(noise_model_from_json({{"eps1", 0.1}, {"eps2", 1.5}, {"epsM", 0}}), InvalidArgument);
    EXPECT_THROW(noise_model_from_json({{"eps1", "x"}}), InvalidArgument);
    EXPECT_THROW(noise_model_from_json({{"eps1", 0.1}, {"eps2", 0.1}, {"epsM", 0}, {"interpretation", "x"}}),
                 InvalidArgument);
}

TEST(NoiseModel, PauliRateFromInfidelityMatchesChannel) {
    // average infidelity of a k-qubit Pauli channel with rate q is q d / (d + 1)
    for (int k : {1, 2}) {
        const double d = 1 << k, q = NoiseModel::pauli_from_infidelity(0.01, k);
        EXPECT_NEAR(q * d / (d + 1), 0.01, 1e-15);
    }
}

}  // namespace
}  // namespace qvol
