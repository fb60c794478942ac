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
#include "qvol/rng.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace qvol::passes {

struct SwapMapOptions {
    std::uint64_t seed = 0;
    int trials = 40;
    /// Realize some SU4 gates as SWAP * U and relabel instead of routing, when that shortens
    /// the distance to the next gates.
    bool mirror = false;
    /// Start from the best-connected m-subset of the graph instead of qubits 0..m-1.
    bool densest_placement = false;
};

/// A routed circuit on the graph's physical qubits. Its output_permutation already folds in
/// the final layout, so circuit_unitary(circuit) * permutation_matrix(initial_layout) equals
/// the input unitary tensored with identity on the extra qubits.
struct MappingResult {
    Circuit circuit{1};
    std::vector<int> initial_layout;  // logical -> physical, extra qubits labelled m..n-1
    std::vector<int> final_layout;    // logical -> physical, extra qubits labelled m..n-1
    int swaps = 0;
    int mirrored = 0;

    const std::vector<int>& output_permutation() const { return circuit.output_permutation(); }
};

inline constexpr int kMaxPlacementQubits = 20;

/// Connected m-subset with the most internal coupled pairs (lexicographically first on ties),
/// by exhaustive search. Returns logical -> physical.
inline std::vector<int> densest_placement(const CouplingGraph& g, int m) {
    const int n = g.size();
    if (n > kMaxPlacementQubits) throw InvalidArgument("densest placement is limited to 20 physical qubits");
    if (m > n) throw MappingError("circuit is wider than the coupling graph");
    std::vector<int> best, cur;
    int best_edges = -1;
    auto edges_within = [&](const std::vector<int>& s) {
        int e = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) e += g.adjacent(s[i], s[j]) ? 1 : 0;
        return e;
    };
    auto connected = [&](const std::vector<int>& s) {
        std::vector<char> in(n, 0), seen(n, 0);
        for (int v : s) in[v] = 1;
        std::vector<int> stack{s[0]};
        seen[s[0]] = 1;
        std::size_t count = 0;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            ++count;
            for (int v : g.neighbors(u))
                if (in[v] && !seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
        return count == s.size();
    };
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == m) {
            const int e = edges_within(cur);
            if (e > best_edges && connected(cur)) {
                best_edges = e;
                best = cur;
            }
            return;
        }
        for (int v = start; v <= n - (m - static_cast<int>(cur.size())); ++v) {
            cur.push_back(v);
            self(self, v + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    if (best.empty()) throw MappingError("no connected placement of " + std::to_string(m) + " qubits");
    return best;
}

namespace detail {

class SwapMapper {
  public:
    SwapMapper(const Circuit& c, const CouplingGraph& g, const SwapMapOptions& opt)
        : c_(c), g_(g), opt_(opt), m_(c.width()), n_(g.size()), rng_(opt.seed), out_(g.size()) {
        if (m_ > n_)
            throw MappingError("circuit width " + std::to_string(m_) + " exceeds coupling graph size " +
                               std::to_string(n_));
        if (opt.trials < 1) throw InvalidArgument("swap mapping needs at least one trial");
        const auto& gates = c.gates();
        for (const auto& gate : gates)
            if (gate.qubits.size() > 2 && gate.kind != GateKind::Barrier)
                throw InvalidArgument("swap mapping supports gates on at most two qubits");
        per_qubit_.assign(m_, {});
        for (std::size_t i = 0; i < gates.size(); ++i)
            for (int q : gates[i].qubits) per_qubit_[q].push_back(i);
        head_.assign(m_, 0);
    }

    MappingResult run() {
        MappingResult res;
        std::vector<int> initial(n_);
        if (opt_.densest_placement) {
            const auto chosen = densest_placement(g_, m_);
            std::vector<char> used(n_, 0);
            for (int l = 0; l < m_; ++l) {
                initial[l] = chosen[l];
                used[chosen[l]] = 1;
            }
            int next = m_;
            for (int p = 0; p < n_; ++p)
                if (!used[p]) initial[next++] = p;
        } else {
            initial = identity_permutation(n_);
        }
        l2p_ = initial;
        p2l_ = inverse_permutation(l2p_);

        std::size_t remaining = c_.size();
        while (remaining > 0) {
            const std::size_t emitted = emit_ready();
            remaining -= emitted;
            if (remaining == 0) break;
            if (emitted > 0) continue;
            route_step();
        }

        std::vector<int> perm_in(n_);
        for (int l = 0; l < n_; ++l) perm_in[l] = l < m_ ? c_.output_permutation()[l] : l;
        std::vector<int> out_perm(n_);
        for (int p = 0; p < n_; ++p) out_perm[p] = perm_in[p2l_[p]];
        out_.set_output_permutation(out_perm);

        res.circuit = std::move(out_);
        res.initial_layout = initial;
        res.final_layout = l2p_;
        res.swaps = swaps_;
        res.mirrored = mirrored_;
        return res;
    }

  private:
    const Circuit& c_;
    const CouplingGraph& g_;
    SwapMapOptions opt_;
    int m_, n_;
    Rng rng_;
    Circuit out_;
    std::vector<std::vector<std::size_t>> per_qubit_;
    std::vector<std::size_t> head_;
    std::vector<int> l2p_, p2l_;
    int swaps_ = 0, mirrored_ = 0;

    bool is_front(std::size_t i) const {
        for (int q : c_.gates()[i].qubits)
            if (head_[q] >= per_qubit_[q].size() || per_qubit_[q][head_[q]] != i) return false;
        return true;
    }

    bool routed_2q(const Gate& g) const { return g.qubits.size() == 2 && g.kind != GateKind::Barrier; }

    // Front two-qubit gates, in circuit order.
    std::vector<std::size_t> front_2q() const {
        std::vector<std::size_t> f;
        for (int q = 0; q < m_; ++q) {
            if (head_[q] >= per_qubit_[q].size()) continue;
            const std::size_t i = per_qubit_[q][head_[q]];
            const auto& g = c_.gates()[i];
            if (routed_2q(g) && g.qubits[0] == q && is_front(i)) f.push_back(i);
        }
        std::sort(f.begin(), f.end());
        return f;
    }

    // Next unexecuted two-qubit gate on logical qubit q after position `after` in its list.
    std::optional<std::size_t> next_2q(int q, std::size_t after) const {
        for (std::size_t k = after; k < per_qubit_[q].size(); ++k) {
            const auto& g = c_.gates()[per_qubit_[q][k]];
            if (g.kind == GateKind::Barrier || g.kind == GateKind::Measure) return std::nullopt;
            if (routed_2q(g)) return per_qubit_[q][k];
        }
        return std::nullopt;
    }

    int gate_distance(std::size_t i) const {
        const auto& q = c_.gates()[i].qubits;
        return g_.distance(l2p_[q[0]], l2p_[q[1]]);
    }

    void advance(std::size_t i) {
        for (int q : c_.gates()[i].qubits) ++head_[q];
    }

    std::size_t emit_ready() {
        std::size_t emitted = 0;
        bool progress = true;
        while (progress) {
            progress = false;
            for (int q = 0; q < m_; ++q) {
                while (head_[q] < per_qubit_[q].size()) {
                    const std::size_t i = per_qubit_[q][head_[q]];
                    if (!is_front(i)) break;
                    const auto& g = c_.gates()[i];
                    if (routed_2q(g) && !g_.adjacent(l2p_[g.qubits[0]], l2p_[g.qubits[1]])) break;
                    advance(i);
                    emit(g);
                    ++emitted;
                    progress = true;
                }
            }
        }
        return emitted;
    }

    void emit(const Gate& g) {
        if (opt_.mirror && g.kind == GateKind::SU4 && prefer_mirror(g)) {
            Gate mg = remap(g, l2p_);
            mg.matrix = Mat4(swap_matrix() * *g.matrix);
            out_.append(std::move(mg));
            exchange_logical(g.qubits[0], g.qubits[1]);
            ++mirrored_;
            return;
        }
        out_.append(remap(g, l2p_));
    }

    // True when the next gates on the pair sit closer after exchanging their positions.
    bool prefer_mirror(const Gate& g) {
        const int a = g.qubits[0], b = g.qubits[1];
        std::vector<std::size_t> nexts;
        for (int q : {a, b})
            if (auto nx = next_2q(q, head_[q])) nexts.push_back(*nx);
        if (nexts.empty()) return false;
        std::sort(nexts.begin(), nexts.end());
        nexts.erase(std::unique(nexts.begin(), nexts.end()), nexts.end());
        int before = 0, after = 0;
        for (auto i : nexts) before += gate_distance(i);
        std::swap(l2p_[a], l2p_[b]);
        for (auto i : nexts) after += gate_distance(i);
        std::swap(l2p_[a], l2p_[b]);
        return after < before;
    }

    void exchange_logical(int a, int b) {
        std::swap(l2p_[a], l2p_[b]);
        p2l_[l2p_[a]] = a;
        p2l_[l2p_[b]] = b;
    }

    void apply_swap(int p, int q) {
        out_.append(Gate::swap(p, q));
        ++swaps_;
        const int a = p2l_[p], b = p2l_[q];
        std::swap(p2l_[p], p2l_[q]);
        l2p_[a] = q;
        l2p_[b] = p;
    }

    // Greedy swap layer for one trial; `w` holds the perturbed distances.
    std::vector<std::pair<int, int>> greedy_layer(const std::vector<std::size_t>& front,
                                                  const std::vector<double>& w) const {
        auto l2p = l2p_;
        auto p2l = p2l_;
        std::vector<char> busy(n_, 0);
        std::vector<std::pair<int, int>> layer;
        const auto edges = g_.undirected_edges();
        auto score = [&](const std::vector<int>& lp) {
            double s = 0;
            for (auto i : front) {
                const auto& qs = c_.gates()[i].qubits;
                s += w[lp[qs[0]] * n_ + lp[qs[1]]];
            }
            return s;
        };
        double current = score(l2p);
        for (;;) {
            double best = current;
            int best_e = -1;
            for (std::size_t e = 0; e < edges.size(); ++e) {
                const auto [p, q] = edges[e];
                if (busy[p] || busy[q]) continue;
                const int a = p2l[p], b = p2l[q];
                std::swap(l2p[a], l2p[b]);
                const double s = score(l2p);
                std::swap(l2p[a], l2p[b]);
                if (s < best - 1e-12) {
                    best = s;
                    best_e = static_cast<int>(e);
                }
            }
            if (best_e < 0) break;
            const auto [p, q] = edges[best_e];
            const int a = p2l[p], b = p2l[q];
            std::swap(l2p[a], l2p[b]);
            std::swap(p2l[p], p2l[q]);
            busy[p] = busy[q] = 1;
            layer.emplace_back(p, q);
            current = best;
        }
        return layer;
    }

    int true_score(const std::vector<std::size_t>& front, const std::vector<std::pair<int, int>>& layer) const {
        auto p2l = p2l_;
        auto l2p = l2p_;
        for (auto [p, q] : layer) {
            const int a = p2l[p], b = p2l[q];
            std::swap(p2l[p], p2l[q]);
            l2p[a] = q;
            l2p[b] = p;
        }
        int s = 0;
        for (auto i : front) {
            const auto& qs = c_.gates()[i].qubits;
            s += g_.distance(l2p[qs[0]], l2p[qs[1]]);
        }
        return s;
    }

    void route_step() {
        const auto front = front_2q();
        if (front.empty()) throw MappingError("swap mapping stalled with no routable gate");
        int current = 0;
        for (auto i : front) {
            const int d = gate_distance(i);
            if (d >= CouplingGraph::kUnreachable)
                throw MappingError("qubits of gate " + std::to_string(i) + " lie in disconnected graph regions");
            current += d;
        }

        std::normal_distribution<double> noise(0.0, 1.0 / n_);
        std::vector<std::pair<int, int>> best_layer;
        int best_score = current;
        for (int t = 0; t < opt_.trials; ++t) {
            std::vector<double> w(static_cast<std::size_t>(n_) * n_);
            for (int p = 0; p < n_; ++p)
                for (int q = 0; q <= p; ++q) {
                    const double f = t == 0 ? 1.0 : std::max(0.0, 1.0 + noise(rng_));
                    w[p * n_ + q] = w[q * n_ + p] = g_.distance(p, q) * f;
                }
            auto layer = greedy_layer(front, w);
            const int s = true_score(front, layer);
            if (s < best_score || (s == best_score && !best_layer.empty() && layer.size() < best_layer.size())) {
                best_score = s;
                best_layer = std::move(layer);
            }
        }

        if (best_score < current) {
            for (auto [p, q] : best_layer) apply_swap(p, q);
            return;
        }
        // No layer helps: walk the first blocked gate's endpoints together along a shortest path.
        const auto& qs = c_.gates()[front.front()].qubits;
        const auto path = g_.shortest_path(l2p_[qs[0]], l2p_[qs[1]]);
        for (std::size_t k = 0; k + 2 < path.size(); ++k) apply_swap(path[k], path[k + 1]);
    }
};

}  // namespace detail

/// Routes `c` onto `g` by inserting SWAP gates between rounds of executable gates.
/// Each round applies every gate whose qubits are adjacent, then picks one layer of
/// disjoint swaps by randomized greedy search minimizing the summed distance of the
/// blocked front gates.
inline MappingResult swap_map(const Circuit& c, const CouplingGraph& g, const SwapMapOptions& opt = {}) {
    return detail::SwapMapper(c, g, opt).run();
}

}  // namespace qvol::passes
