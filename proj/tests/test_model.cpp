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
#include "qvol/passes/unroll.hpp"
#include "qvol/qasm.hpp"
#include "qvol/weyl.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

namespace qvol {
namespace {

constexpr int kSamples = 10000;

std::vector<WeylCoordinates> haar_coords(std::uint64_t seed, const Mat4& left = Mat4::Identity()) {
    Rng rng(seed);
    std::vector<WeylCoordinates> out;
    out.reserve(kSamples);
    for (int i = 0; i < kSamples; ++i) out.push_back(weyl_of(Mat4(left * haar_su4(rng))));
    return out;
}

// Bin masses of the chamber density along one coordinate by midpoint integration.
std::vector<double> marginal_masses(int coord, int bins, double lo, double hi) {
    constexpr int n = 90;
    const double q = kPi / 4, h = q / n;
    std::vector<double> mass(bins, 0.0);
    double total = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < 2 * n; ++k) {
                const WeylCoordinates w{(i + 0.5) * h, (j + 0.5) * h, -q + (k + 0.5) * h};
                if (!(w.alpha >= w.beta && w.beta >= std::abs(w.gamma))) continue;
                const double v = weyl_density(w);
                total += v;
                const int b = std::clamp(static_cast<int>((w[coord] - lo) / (hi - lo) * bins), 0, bins - 1);
                mass[b] += v;
            }
    for (auto& m : mass) m /= total;
    return mass;
}

double chi_square_pvalue(const std::vector<WeylCoordinates>& ws, int coord, double lo, double hi) {
    constexpr int bins = 10;
    const auto mass = marginal_masses(coord, bins, lo, hi);
    std::vector<double> observed(bins, 0.0);
    for (const auto& w : ws)
        ++observed[std::clamp(static_cast<int>((w[coord] - lo) / (hi - lo) * bins), 0, bins - 1)];
    double stat = 0;
    int dof = -1;
    for (int b = 0; b < bins; ++b) {
        const double e = mass[b] * static_cast<double>(ws.size());
        if (e < 5) continue;
        stat += (observed[b] - e) * (observed[b] - e) / e;
        ++dof;
    }
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

std::vector<double> column(const std::vector<WeylCoordinates>& ws, int coord) {
    std::vector<double> out;
    for (const auto& w : ws) out.push_back(w[coord]);
    return out;
}

TEST(HaarSu4, IsSpecialUnitary) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const Mat4 u = haar_su4(rng);
        EXPECT_LT(unitarity_error(u), 1e-12);
        EXPECT_LT(std::abs(u.determinant() - 1.0), 1e-10);
    }
}

TEST(HaarSu4, TraceSecondMoment) {
    Rng rng(2);
    std::vector<double> t(kSamples);
    for (auto& x : t) x = std::norm(haar_su4(rng).trace());
    const double mean = std::accumulate(t.begin(), t.end(), 0.0) / kSamples;
    double var = 0;
    for (double x : t) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / (kSamples - 1) / kSamples);
    EXPECT_NEAR(mean, 1.0, 3 * se);
}

TEST(HaarSu4, WeylMarginalsFollowChamberDensity) {
    const auto ws = haar_coords(3);
    EXPECT_GT(chi_square_pvalue(ws, 0, 0, kPi / 4), 0.01);
    EXPECT_GT(chi_square_pvalue(ws, 1, 0, kPi / 4), 0.01);
    EXPECT_GT(chi_square_pvalue(ws, 2, -kPi / 4, kPi / 4), 0.01);
}

TEST(HaarSu4, LeftInvariance) {
    Rng vr(99);
    const Mat4 v = haar_su4(vr);
    const auto a = haar_coords(1000), b = haar_coords(2000, v);
    const double crit = 1.628 * std::sqrt(2.0 / kSamples);  // two-sample KS at 1%
    for (int k = 0; k < 3; ++k) EXPECT_LT(ks_two_sample(column(a, k), column(b, k)), crit) << "coordinate " << k;
}

TEST(SampleLayer, WidthTwoSwapFrequency) {
    Rng rng(6);
    int swapped = 0;
    for (int i = 0; i < kSamples; ++i) {
        const auto l = sample_layer(2, rng);
        ASSERT_EQ(l.blocks.size(), 1U);
        swapped += l.permutation[0] == 1;
    }
    EXPECT_NEAR(swapped / double(kSamples), 0.5, 3 * std::sqrt(0.25 / kSamples));
}

TEST(SampleLayer, WidthThreeIdleFrequency) {
    Rng rng(7);
    std::array<int, 3> idle{};
    for (int i = 0; i < kSamples; ++i) {
        const auto l = sample_layer(3, rng);
        ASSERT_EQ(l.blocks.size(), 1U);
        ++idle[l.permutation[2]];
    }
    const double sigma = std::sqrt(1.0 / 3 * 2.0 / 3 / kSamples);
    for (int q : idle) EXPECT_NEAR(q / double(kSamples), 1.0 / 3, 3 * sigma);
}

TEST(SampleLayer, RejectsWidthOne) {
    Rng rng(0);
    EXPECT_THROW(sample_layer(1, rng), InvalidArgument);
}

TEST(ModelCircuit, WidthFourDepthFour) {
    const auto c = build_model_circuit({4, 4, 11});
    EXPECT_EQ(c.count(GateKind::SU4), 8U);
    EXPECT_EQ(c.size(), 8U);
    EXPECT_EQ(c.output_permutation(), identity_permutation(4));
    for (std::size_t layer = 0; layer < 4; ++layer) {
        std::vector<int> qs;
        for (int k = 0; k < 2; ++k)
            for (int q : c.gates()[2 * layer + k].qubits) qs.push_back(q);
        std::sort(qs.begin(), qs.end());
        EXPECT_EQ(qs, (std::vector<int>{0, 1, 2, 3}));
    }
}

TEST(ModelCircuit, OddWidthIdlesOneQubitPerLayer) {
    const auto c = build_model_circuit({3, 5, 12});
    EXPECT_EQ(c.count(GateKind::SU4), 5U);
    for (const auto& g : c.gates()) EXPECT_EQ(g.qubits.size(), 2U);
}

TEST(ModelCircuit, DeterministicInSeed) {
    const ModelCircuitSpec s{5, 5, 77};
    EXPECT_EQ(build_model_circuit(s), build_model_circuit(s));
    EXPECT_EQ(emit_qasm(passes::unroll(build_model_circuit(s))), emit_qasm(passes::unroll(build_model_circuit(s))));
    EXPECT_FALSE(build_model_circuit(s) == build_model_circuit({5, 5, 78}));
}

TEST(ModelCircuit, SeedDerivationSeparatesIndices) {
    EXPECT_NE(model_circuit_seed(1, 4, 4, 0), model_circuit_seed(1, 4, 4, 1));
    EXPECT_NE(model_circuit_seed(1, 4, 4, 0), model_circuit_seed(1, 5, 4, 0));
    EXPECT_EQ(model_circuit_seed(9, 4, 3, 2), model_circuit_seed(9, 4, 3, 2));
}

TEST(ModelCircuit, RejectsEmptySpec) {
    EXPECT_THROW(build_model_circuit({0, 1, 0}), InvalidArgument);
    EXPECT_THROW(build_model_circuit({2, 0, 0}), InvalidArgument);
}

}  // namespace
}  // namespace qvol
