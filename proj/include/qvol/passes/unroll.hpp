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
#include "qvol/synthesis.hpp"

namespace qvol::passes {

/// Macro expansion to the native set: H becomes u2(0, pi), SWAP becomes three CX,
/// and SU4 blocks become the three-CX KAK circuit.
inline Circuit unroll(const Circuit& c) {
    Circuit out = c.empty_copy();
    for (const auto& g : c.gates()) {
        switch (g.kind) {
        case GateKind::H: out.append(Gate::u2(g.qubits[0], 0.0, kPi)); break;
        case GateKind::SWAP: {
            const int a = g.qubits[0], b = g.qubits[1];
            out.append(Gate::cx(a, b));
            out.append(Gate::cx(b, a));
            out.append(Gate::cx(a, b));
            break;
        }
        case GateKind::SU4: {
            const Circuit local = synthesize(*g.matrix, ExpansionChoice{3, false, 1.0, 1.0});
            for (const auto& lg : local.gates()) out.append(remap(lg, g.qubits));
            break;
        }
        default: out.append(g); break;
        }
    }
    return out;
}

}  // namespace qvol::passes
