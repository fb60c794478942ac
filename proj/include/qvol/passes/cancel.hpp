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

#include <vector>

namespace qvol::passes {

/// Cancels pairs of identical CX gates with nothing in between on their two qubits.
/// Gates on other qubits do not block; barriers and measurements do.
inline Circuit cnot_cancel(const Circuit& c) {
    const auto& gates = c.gates();
    std::vector<char> alive(gates.size(), 1);
    std::vector<std::vector<std::size_t>> last(c.width());  // live gates per qubit, newest on top

    for (std::size_t i = 0; i < gates.size(); ++i) {
        const auto& g = gates[i];
        if (g.kind == GateKind::CX) {
            auto& sc = last[g.qubits[0]];
            auto& st = last[g.qubits[1]];
            if (!sc.empty() && !st.empty() && sc.back() == st.back() && gates[sc.back()] == g) {
                alive[sc.back()] = 0;
                alive[i] = 0;
                sc.pop_back();
                st.pop_back();
                continue;
            }
        }
        for (int q : g.qubits) last[q].push_back(i);
    }

    Circuit out = c.empty_copy();
    for (std::size_t i = 0; i < gates.size(); ++i)
        if (alive[i]) out.append(gates[i]);
    return out;
}

}  // namespace qvol::passes
