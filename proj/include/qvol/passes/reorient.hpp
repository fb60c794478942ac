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
#include "qvol/coupling.hpp"

namespace qvol::passes {

/// Points every CX along a directed edge, flipping with H on both sides where needed.
inline Circuit cnot_reorient(const Circuit& c, const CouplingGraph& g) {
    if (c.width() > g.size()) throw MappingError("cnot_reorient: circuit is wider than the coupling graph");
    Circuit out = c.empty_copy();
    for (const auto& gate : c.gates()) {
        if (gate.kind == GateKind::SU4 || gate.kind == GateKind::SWAP)
            throw MappingError("cnot_reorient: " + std::string(gate_name(gate.kind)) + " must be unrolled first");
        if (gate.kind != GateKind::CX) {
            out.append(gate);
            continue;
        }
        const int ctl = gate.qubits[0], tgt = gate.qubits[1];
        if (g.has_edge(ctl, tgt)) {
            out.append(gate);
        } else if (g.has_edge(tgt, ctl)) {
            out.append(Gate::h(ctl));
            out.append(Gate::h(tgt));
            out.append(Gate::cx(tgt, ctl));
            out.append(Gate::h(ctl));
            out.append(Gate::h(tgt));
        } else {
            throw MappingError("cnot_reorient: no edge between qubits " + std::to_string(ctl) + " and " +
                               std::to_string(tgt));
        }
    }
    return out;
}

}  // namespace qvol::passes
