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

#include <algorithm>
#include <vector>

namespace qvol::passes {

/// Symmetric count of two-qubit interactions, weighted by CX cost (SU4 and SWAP count three).
inline std::vector<std::vector<int>> interaction_matrix(const Circuit& c) {
    const int m = c.width();
    std::vector<std::vector<int>> a(m, std::vector<int>(m, 0));
    for (const auto& g : c.gates()) {
        if (!g.is_two_qubit_unitary()) continue;
        const int w = g.kind == GateKind::CX ? 1 : 3;
        a[g.qubits[0]][g.qubits[1]] += w;
        a[g.qubits[1]][g.qubits[0]] += w;
    }
    return a;
}

/// Largest |label(i) - label(j)| over interacting pairs.
inline int bandwidth(const std::vector<std::vector<int>>& a, const std::vector<int>& label) {
    int bw = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (a[i][j] > 0) bw = std::max(bw, std::abs(label[i] - label[j]));
    return bw;
}

/// Reverse Cuthill-McKee ordering that visits heavier interactions first.
/// Returns label[old qubit] = new qubit.
inline std::vector<int> weighted_rcm(const std::vector<std::vector<int>>& a) {
    const int m = static_cast<int>(a.size());
    std::vector<int> degree(m, 0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) degree[i] += (i != j && a[i][j] > 0) ? 1 : 0;
    std::vector<char> seen(m, 0);
    std::vector<int> order;
    while (static_cast<int>(order.size()) < m) {
        int start = -1;
        for (int i = 0; i < m; ++i)
            if (!seen[i] && (start < 0 || degree[i] < degree[start])) start = i;
        seen[start] = 1;
        std::size_t head = order.size();
        order.push_back(start);
        while (head < order.size()) {
            const int u = order[head++];
            std::vector<int> nb;
            for (int v = 0; v < m; ++v)
                if (!seen[v] && v != u && a[u][v] > 0) nb.push_back(v);
            std::sort(nb.begin(), nb.end(), [&](int x, int y) {
                if (a[u][x] != a[u][y]) return a[u][x] > a[u][y];
                if (degree[x] != degree[y]) return degree[x] < degree[y];
                return x < y;
            });
            for (int v : nb) {
                seen[v] = 1;
                order.push_back(v);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    std::vector<int> label(m);
    for (int k = 0; k < m; ++k) label[order[k]] = k;
    return label;
}

/// Renames qubits so that frequently interacting pairs get nearby indices, keeping the
/// result only when the interaction bandwidth strictly shrinks. The output permutation is
/// updated so outcome labels are unchanged: U_new * P(label) = U_old, where P is the
/// permutation_matrix of the applied labeling.
inline Circuit loco(const Circuit& c, std::vector<int>* applied_label = nullptr) {
    const auto a = interaction_matrix(c);
    const auto ident = identity_permutation(c.width());
    const auto label = weighted_rcm(a);
    const bool better = bandwidth(a, label) < bandwidth(a, ident);
    if (applied_label) *applied_label = better ? label : ident;
    if (!better) return c;
    Circuit out(c.width());
    for (const auto& g : c.gates()) out.append(remap(g, label));
    std::vector<int> perm(c.width());
    for (int i = 0; i < c.width(); ++i) perm[label[i]] = c.output_permutation()[i];
    out.set_output_permutation(perm);
    return out;
}

}  // namespace qvol::passes
