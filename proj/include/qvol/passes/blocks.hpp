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

#include <variant>
#include <vector>

namespace qvol::passes {

/// Maximal run of gates confined to one qubit pair. qubits[0] is local qubit 0.
struct Block {
    std::array<int, 2> qubits{};
    std::vector<Gate> gates;

    Circuit local_circuit() const {
        Circuit c(2);
        for (auto g : gates) {
            for (int& q : g.qubits) q = q == qubits[0] ? 0 : 1;
            c.append(std::move(g));
        }
        return c;
    }
    Mat4 unitary() const { return Mat4(circuit_unitary(local_circuit())); }
    std::size_t cx() const {
        return static_cast<std::size_t>(
            std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.kind == GateKind::CX; }));
    }
};

/// Blocks and gates left outside any block, in an order that respects every dependency.
using BlockItem = std::variant<Block, Gate>;

/// Groups each two-qubit gate with the contiguous gates on the same pair that follow it,
/// and with the not-yet-claimed single-qubit gates that precede it on those qubits.
inline std::vector<BlockItem> block_collect(const Circuit& c) {
    std::vector<BlockItem> items;
    std::vector<int> open(c.width(), -1);  // item index of the open block on each qubit
    std::vector<std::vector<Gate>> loose(c.width());

    auto close = [&](int q) {
        const int k = open[q];
        if (k < 0) return;
        for (int b : std::get<Block>(items[k]).qubits) open[b] = -1;
    };
    auto flush_loose = [&](int q) {
        for (auto& g : loose[q]) items.emplace_back(std::move(g));
        loose[q].clear();
    };

    for (const auto& g : c.gates()) {
        if (g.is_single_qubit_unitary()) {
            const int q = g.qubits[0];
            if (open[q] >= 0) std::get<Block>(items[open[q]]).gates.push_back(g);
            else loose[q].push_back(g);
        } else if (g.is_two_qubit_unitary()) {
            const int a = g.qubits[0], b = g.qubits[1];
            if (open[a] >= 0 && open[a] == open[b]) {
                std::get<Block>(items[open[a]]).gates.push_back(g);
                continue;
            }
            close(a);
            close(b);
            Block blk;
            blk.qubits = {a, b};
            for (int q : {a, b}) {
                for (auto& lg : loose[q]) blk.gates.push_back(std::move(lg));
                loose[q].clear();
            }
            blk.gates.push_back(g);
            items.emplace_back(std::move(blk));
            open[a] = open[b] = static_cast<int>(items.size()) - 1;
        } else {
            for (int q : g.qubits) {
                close(q);
                flush_loose(q);
            }
            items.emplace_back(g);
        }
    }
    for (int q = 0; q < c.width(); ++q) flush_loose(q);
    return items;
}

/// Rebuilds a circuit from collected items.
inline Circuit reassemble(const Circuit& like, const std::vector<BlockItem>& items) {
    Circuit out = like.empty_copy();
    for (const auto& it : items) {
        if (const auto* g = std::get_if<Gate>(&it)) out.append(*g);
        else
            for (const auto& g : std::get<Block>(it).gates) out.append(g);
    }
    return out;
}

/// Replaces every collected block by one SU4 gate carrying its unitary.
inline Circuit consolidate_blocks(const Circuit& c) {
    Circuit out = c.empty_copy();
    for (const auto& it : block_collect(c)) {
        if (const auto* g = std::get_if<Gate>(&it)) {
            out.append(*g);
            continue;
        }
        const auto& blk = std::get<Block>(it);
        out.append(Gate::su4(blk.qubits[0], blk.qubits[1], blk.unitary()));
    }
    return out;
}

struct BlockOptimizeOptions {
    /// Below 1, blocks are approximated by maximizing F^(i) * F_b^i over i CX applications.
    double basis_fidelity = 1.0;
};

struct BlockReport {
    std::array<int, 2> qubits{};
    Mat4 target;
    std::size_t original_cx = 0;
    std::size_t final_cx = 0;
    bool replaced = false;
    ExpansionChoice choice;
    Circuit synthesized{2};  // local circuit on qubits (0, 1); empty when kept
};

/// Resynthesizes each block from its 4x4 unitary, keeping the original whenever that
/// already uses no more CX gates than the new circuit.
inline Circuit block_optimize(const Circuit& c, const BlockOptimizeOptions& opt = {},
                              std::vector<BlockReport>* report = nullptr) {
    if (!(opt.basis_fidelity > 0.0 && opt.basis_fidelity <= 1.0))
        throw InvalidArgument("block_optimize: basis fidelity must lie in (0, 1]");
    auto items = block_collect(c);
    for (auto& it : items) {
        auto* blk = std::get_if<Block>(&it);
        if (blk == nullptr) continue;
        BlockReport rep;
        rep.qubits = blk->qubits;
        rep.target = blk->unitary();
        rep.original_cx = blk->cx();
        const auto w = weyl_of(rep.target);
        rep.choice = opt.basis_fidelity < 1.0 ? select_expansion(w, opt.basis_fidelity, false) : exact_expansion(w);
        rep.final_cx = rep.original_cx;
        if (static_cast<std::size_t>(rep.choice.applications) < rep.original_cx) {
            rep.synthesized = synthesize(rep.target, rep.choice);
            rep.replaced = true;
            rep.final_cx = static_cast<std::size_t>(rep.choice.applications);
            blk->gates.clear();
            const std::vector<int> map{blk->qubits[0], blk->qubits[1]};
            for (const auto& g : rep.synthesized.gates()) blk->gates.push_back(remap(g, map));
        }
        if (report) report->push_back(std::move(rep));
    }
    return reassemble(c, items);
}

}  // namespace qvol::passes
