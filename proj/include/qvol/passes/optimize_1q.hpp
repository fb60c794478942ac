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
#include "qvol/euler.hpp"

#include <optional>
#include <vector>

namespace qvol::passes {

/// Pulse cost of a native single-qubit gate.
inline int pulse_count(const Gate& g) {
    switch (g.kind) {
    case GateKind::U1: return 0;
    case GateKind::U2:
    case GateKind::H: return 1;
    default: return 2;
    }
}

namespace detail {

inline constexpr double kMergeTol = 1e-9;

// Cheapest of {nothing, u1, u2, u3} equal to `u` up to global phase.
inline std::optional<Gate> cheapest_1q(int q, const Mat2& u) {
    const auto a = u3_angles(u);
    const double sum = wrap_angle(a.phi + a.lambda);
    if (a.theta < kMergeTol) {
        if (std::abs(sum) < kMergeTol) return std::nullopt;
        return Gate::u1(q, sum);
    }
    if (std::abs(a.theta - kPi / 2) < kMergeTol) return Gate::u2(q, wrap_angle(a.phi), wrap_angle(a.lambda));
    return Gate::u3(q, a.theta, wrap_angle(a.phi), wrap_angle(a.lambda));
}

}  // namespace detail

/// Replaces each run of single-qubit gates by at most one u1, u2 or u3.
/// A lone native gate is kept unless a cheaper form exists.
inline Circuit optimize_1q(const Circuit& c) {
    Circuit out = c.empty_copy();
    std::vector<std::vector<Gate>> run(c.width());

    auto flush = [&](int q) {
        auto& r = run[q];
        if (r.empty()) return;
        Mat2 u = Mat2::Identity();
        for (const auto& g : r) u = matrix_1q(g) * u;
        const auto best = detail::cheapest_1q(q, u);
        if (r.size() == 1 && r[0].kind != GateKind::H) {
            const bool cheaper = !best || pulse_count(*best) < pulse_count(r[0]);
            if (!cheaper) {
                out.append(r[0]);
                r.clear();
                return;
            }
        }
        if (best) out.append(*best);
        r.clear();
    };

    for (const auto& g : c.gates()) {
        if (g.is_single_qubit_unitary()) {
            run[g.qubits[0]].push_back(g);
            continue;
        }
        for (int q : g.qubits) flush(q);
        out.append(g);
    }
    for (int q = 0; q < c.width(); ++q) flush(q);
    return out;
}

}  // namespace qvol::passes
