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
#include "qvol/passes/blocks.hpp"
#include "qvol/passes/cancel.hpp"
#include "qvol/passes/loco.hpp"
#include "qvol/passes/optimize_1q.hpp"
#include "qvol/passes/reorient.hpp"
#include "qvol/passes/swap_map.hpp"
#include "qvol/passes/unroll.hpp"

#include <string>
#include <vector>

namespace qvol {

enum class PassId { Loco, Consolidate, Unroll, SwapMap, Reorient, CnotCancel, Optimize1q, BlockOptimize };

inline std::string_view pass_name(PassId p) {
    switch (p) {
    case PassId::Loco: return "loco";
    case PassId::Consolidate: return "consolidate";
    case PassId::Unroll: return "unroll";
    case PassId::SwapMap: return "swap_map";
    case PassId::Reorient: return "cnot_reorient";
    case PassId::CnotCancel: return "cnot_cancel";
    case PassId::Optimize1q: return "optimize_1q";
    case PassId::BlockOptimize: return "block_optimize";
    }
    return "?";
}

enum class PipelineKind { Standard, Kak, Approx };

inline std::string_view pipeline_kind_name(PipelineKind k) {
    switch (k) {
    case PipelineKind::Standard: return "standard";
    case PipelineKind::Kak: return "kak";
    case PipelineKind::Approx: return "approx";
    }
    return "?";
}

inline PipelineKind parse_pipeline_kind(const std::string& s) {
    if (s == "standard") return PipelineKind::Standard;
    if (s == "kak") return PipelineKind::Kak;
    if (s == "approx") return PipelineKind::Approx;
    throw InvalidArgument("unknown pipeline '" + s + "' (expected standard, kak or approx)");
}

/// Ordered passes plus the options they read.
struct PassPipeline {
    std::vector<PassId> passes;
    PipelineKind kind = PipelineKind::Standard;
    double basis_fidelity = 1.0;  // block_optimize; 1 means exact
    int trials = 40;              // swap_map
    std::uint64_t seed = 0;       // swap_map
    bool mirror = false;          // swap_map
    bool densest_placement = false;

    /// kind Approx requires basis_fidelity < 1.
    static PassPipeline make(PipelineKind kind, double basis_fidelity = 1.0, bool loco = false, bool mirror = false) {
        PassPipeline p;
        p.kind = kind;
        p.mirror = mirror;
        p.basis_fidelity = kind == PipelineKind::Approx ? basis_fidelity : 1.0;
        if (kind == PipelineKind::Approx && !(basis_fidelity > 0 && basis_fidelity <= 1))
            throw InvalidArgument("approx pipeline needs a basis fidelity in (0, 1]");
        using P = PassId;
        if (loco) p.passes.push_back(P::Loco);
        p.passes.push_back(mirror ? P::Consolidate : P::Unroll);  // mirrored routing works on SU4 blocks
        for (auto id : {P::SwapMap, P::Unroll, P::Reorient, P::CnotCancel, P::Unroll, P::Optimize1q})
            p.passes.push_back(id);
        if (kind != PipelineKind::Standard)
            for (auto id : {P::BlockOptimize, P::Reorient, P::Unroll, P::CnotCancel, P::Optimize1q})
                p.passes.push_back(id);
        return p;
    }
    static PassPipeline standard() { return make(PipelineKind::Standard); }
    static PassPipeline kak() { return make(PipelineKind::Kak); }
    static PassPipeline approx(double basis_fidelity) { return make(PipelineKind::Approx, basis_fidelity); }

    void validate() const {
        bool mapped = false;
        for (auto id : passes) {
            if (id == PassId::SwapMap) mapped = true;
            if (id == PassId::Reorient && !mapped)
                throw InvalidArgument("pipeline: cnot_reorient must follow swap_map");
            if (id == PassId::Loco && mapped) throw InvalidArgument("pipeline: loco must precede swap_map");
        }
        if (trials < 1) throw InvalidArgument("pipeline: swap trials must be positive");
        if (!(basis_fidelity > 0 && basis_fidelity <= 1))
            throw InvalidArgument("pipeline: basis fidelity must lie in (0, 1]");
    }
};

struct PipelineResult : passes::MappingResult {
    std::vector<int> loco_label;  // old logical qubit -> new logical qubit
    std::vector<passes::BlockReport> blocks;

    /// Wire on which each input qubit starts (extra physical qubits numbered from m).
    std::vector<int> input_permutation() const {
        std::vector<int> p(initial_layout.size());
        for (std::size_t l = 0; l < p.size(); ++l)
            p[l] = initial_layout[l < loco_label.size() ? loco_label[l] : l];
        return p;
    }
};

/// Runs the passes in order. The result's circuit lives on the graph's physical qubits.
/// In exact modes circuit_unitary(circuit) * permutation_matrix(input_permutation())
/// equals the input unitary tensored with identity on the extra qubits, up to phase.
inline PipelineResult run_pipeline(const Circuit& c, const CouplingGraph& g, const PassPipeline& p) {
    p.validate();
    if (c.width() > g.size())
        throw MappingError("circuit width " + std::to_string(c.width()) + " exceeds coupling graph size " +
                           std::to_string(g.size()));
    PipelineResult res;
    res.loco_label = identity_permutation(c.width());
    Circuit cur = c;
    bool mapped = false;
    for (auto id : p.passes) {
        switch (id) {
        case PassId::Loco: cur = passes::loco(cur, &res.loco_label); break;
        case PassId::Consolidate: cur = passes::consolidate_blocks(cur); break;
        case PassId::Unroll: cur = passes::unroll(cur); break;
        case PassId::SwapMap: {
            passes::SwapMapOptions o{p.seed, p.trials, p.mirror, p.densest_placement};
            auto mr = passes::swap_map(cur, g, o);
            res.initial_layout = mr.initial_layout;
            res.final_layout = mr.final_layout;
            res.swaps += mr.swaps;
            res.mirrored += mr.mirrored;
            cur = std::move(mr.circuit);
            mapped = true;
            break;
        }
        case PassId::Reorient: cur = passes::cnot_reorient(cur, g); break;
        case PassId::CnotCancel: cur = passes::cnot_cancel(cur); break;
        case PassId::Optimize1q: cur = passes::optimize_1q(cur); break;
        case PassId::BlockOptimize:
            cur = passes::block_optimize(cur, {p.basis_fidelity}, &res.blocks);
            break;
        }
    }
    if (!mapped) res.initial_layout = res.final_layout = identity_permutation(cur.width());
    res.circuit = std::move(cur);
    return res;
}

}  // namespace qvol
