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

#include "qvol/circuit.hpp"
#include "qvol/linalg.hpp"
#include "qvol/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace qvol {

/// Haar-random element of SU(4): QR of a complex Ginibre matrix with the
/// R-diagonal phases folded back into Q, then normalized to unit determinant.
inline Mat4 haar_su4(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat4 g;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) g(i, j) = Complex(normal(rng), normal(rng));
    Eigen::HouseholderQR<Mat4> qr(g);
    Mat4 q = qr.householderQ();
    const Mat4 r = qr.matrixQR();
    for (int k = 0; k < 4; ++k) q.col(k) *= r(k, k) / std::abs(r(k, k));
    return q / std::pow(q.determinant(), 0.25);
}

struct ModelLayer {
    std::vector<int> permutation;  // blocks act on (p[0],p[1]), (p[2],p[3]), ...
    std::vector<Mat4> blocks;      // floor(m/2) Haar SU(4) samples
};

/// One layer: a uniform permutation of the m qubits and floor(m/2) Haar blocks.
/// For odd m the qubit at permutation[m-1] idles.
inline ModelLayer sample_layer(int m, Rng& rng) {
    if (m < 2) throw InvalidArgument("sample_layer: width must be at least 2");
    ModelLayer layer;
    layer.permutation = identity_permutation(m);
    std::shuffle(layer.permutation.begin(), layer.permutation.end(), rng);
    for (int k = 0; k < m / 2; ++k) layer.blocks.push_back(haar_su4(rng));
    return layer;
}

struct ModelCircuitSpec {
    int width = 2;
    int depth = 1;
    std::uint64_t seed = 0;
};

/// Seed of circuit `index` in a batch of (width, depth) model circuits.
inline std::uint64_t model_circuit_seed(std::uint64_t master, int width, int depth, std::uint64_t index) {
    return derive_seed(master, Stream::Model,
                       {static_cast<std::uint64_t>(width), static_cast<std::uint64_t>(depth), index});
}

/// Model circuit of `depth` layers of SU(4) blocks; a pure function of its arguments.
inline Circuit build_model_circuit(const ModelCircuitSpec& spec) {
    if (spec.width < 1 || spec.depth < 1) throw InvalidArgument("model circuit needs width >= 1 and depth >= 1");
    Circuit c(spec.width);
    if (spec.width < 2) return c;
    Rng rng(spec.seed);
    for (int t = 0; t < spec.depth; ++t) {
        const auto layer = sample_layer(spec.width, rng);
        for (std::size_t k = 0; k < layer.blocks.size(); ++k)
            c.append(Gate::su4(layer.permutation[2 * k], layer.permutation[2 * k + 1], layer.blocks[k]));
    }
    return c;
}

}  // namespace qvol
