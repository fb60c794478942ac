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

#include "qvol/error.hpp"
#include "qvol/kernels.hpp"
#include "qvol/linalg.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qvol {

enum class GateKind { U1, U2, U3, CX, SU4, SWAP, H, Barrier, Measure };

inline std::string_view gate_name(GateKind k) {
    switch (k) {
    case GateKind::U1: return "u1";
    case GateKind::U2: return "u2";
    case GateKind::U3: return "u3";
    case GateKind::CX: return "cx";
    case GateKind::SU4: return "su4";
    case GateKind::SWAP: return "swap";
    case GateKind::H: return "h";
    case GateKind::Barrier: return "barrier";
    case GateKind::Measure: return "measure";
    }
    return "?";
}

inline int param_arity(GateKind k) {
    switch (k) {
    case GateKind::U1: return 1;
    case GateKind::U2: return 2;
    case GateKind::U3: return 3;
    default: return 0;
    }
}

/// Number of qubits a gate of this kind acts on; -1 for a barrier (any positive count).
inline int qubit_arity(GateKind k) {
    switch (k) {
    case GateKind::CX:
    case GateKind::SU4:
    case GateKind::SWAP: return 2;
    case GateKind::Barrier: return -1;
    default: return 1;
    }
}

/// One circuit instruction. For two-qubit gates the matrix basis index is b0 + 2*b1,
/// where b0 is the bit of qubits[0]; CX uses qubits[0] as control.
struct Gate {
    GateKind kind = GateKind::Barrier;
    std::vector<double> params;
    std::vector<int> qubits;
    std::optional<Mat4> matrix;  // SU4 only

    static Gate u1(int q, double lambda) { return {GateKind::U1, {lambda}, {q}, std::nullopt}; }
    static Gate u2(int q, double phi, double lambda) { return {GateKind::U2, {phi, lambda}, {q}, std::nullopt}; }
    static Gate u3(int q, double theta, double phi, double lambda) {
        return {GateKind::U3, {theta, phi, lambda}, {q}, std::nullopt};
    }
    static Gate cx(int control, int target) { return {GateKind::CX, {}, {control, target}, std::nullopt}; }
    static Gate swap(int a, int b) { return {GateKind::SWAP, {}, {a, b}, std::nullopt}; }
    static Gate h(int q) { return {GateKind::H, {}, {q}, std::nullopt}; }
    static Gate su4(int q0, int q1, const Mat4& m) { return {GateKind::SU4, {}, {q0, q1}, m}; }
    static Gate barrier(std::vector<int> qs) { return {GateKind::Barrier, {}, std::move(qs), std::nullopt}; }
    static Gate measure(int q) { return {GateKind::Measure, {}, {q}, std::nullopt}; }

    bool is_single_qubit_unitary() const {
        return kind == GateKind::U1 || kind == GateKind::U2 || kind == GateKind::U3 || kind == GateKind::H;
    }
    bool is_two_qubit_unitary() const {
        return kind == GateKind::CX || kind == GateKind::SU4 || kind == GateKind::SWAP;
    }
    bool is_opaque() const { return kind == GateKind::Barrier || kind == GateKind::Measure; }

    friend bool operator==(const Gate& a, const Gate& b) {
        if (a.kind != b.kind || a.params != b.params || a.qubits != b.qubits) return false;
        if (a.matrix.has_value() != b.matrix.has_value()) return false;
        return !a.matrix || *a.matrix == *b.matrix;
    }
};

inline void validate_gate(const Gate& g) {
    const auto name = std::string(gate_name(g.kind));
    if (static_cast<int>(g.params.size()) != param_arity(g.kind))
        throw InvalidArgument(name + ": expected " + std::to_string(param_arity(g.kind)) + " parameters, got " +
                              std::to_string(g.params.size()));
    const int qa = qubit_arity(g.kind);
    if (qa > 0 && static_cast<int>(g.qubits.size()) != qa)
        throw InvalidArgument(name + ": expected " + std::to_string(qa) + " qubits, got " +
                              std::to_string(g.qubits.size()));
    if (qa < 0 && g.qubits.empty()) throw InvalidArgument(name + ": needs at least one qubit");
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
        if (g.qubits[i] < 0) throw InvalidArgument(name + ": negative qubit index");
        for (std::size_t j = i + 1; j < g.qubits.size(); ++j)
            if (g.qubits[i] == g.qubits[j]) throw InvalidArgument(name + ": repeated qubit index");
    }
    if (g.kind == GateKind::SU4) {
        if (!g.matrix) throw InvalidArgument("su4: missing matrix");
        if (!is_unitary(*g.matrix, 1e-12)) throw InvalidArgument("su4: matrix is not unitary");
    } else if (g.matrix) {
        throw InvalidArgument(name + ": only su4 gates carry an explicit matrix");
    }
}

namespace detail {
// u3 without the global phase of the rotation-product definition.
inline Mat2 u3_standard(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Mat2 m;
    m << c, -std::exp(kI * lambda) * s, std::exp(kI * phi) * s, std::exp(kI * (phi + lambda)) * c;
    return m;
}
}  // namespace detail

/// Matrix of a single-qubit gate. u2 and u3 carry the global phase of their
/// R_z R_x product definitions, e^{-i(phi+lambda)/2} times the textbook form.
inline Mat2 matrix_1q(const Gate& g) {
    switch (g.kind) {
    case GateKind::U1: {
        Mat2 m;
        m << 1, 0, 0, std::exp(kI * g.params[0]);
        return m;
    }
    case GateKind::U2:
        return std::exp(-kI * ((g.params[0] + g.params[1]) / 2)) *
               detail::u3_standard(kPi / 2, g.params[0], g.params[1]);
    case GateKind::U3:
        return std::exp(-kI * ((g.params[1] + g.params[2]) / 2)) *
               detail::u3_standard(g.params[0], g.params[1], g.params[2]);
    case GateKind::H: {
        Mat2 m;
        m << 1, 1, 1, -1;
        return m / std::sqrt(2.0);
    }
    default:
        throw InvalidArgument(std::string(gate_name(g.kind)) + " is not a single-qubit unitary");
    }
}

inline Mat4 cx_matrix() {
    // control = local bit 0, target = local bit 1
    Mat4 m = Mat4::Zero();
    for (int i = 0; i < 4; ++i) {
        const int b0 = i & 1, b1 = (i >> 1) & 1;
        m((b1 ^ b0) << 1 | b0, i) = 1;
    }
    return m;
}

inline Mat4 swap_matrix() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(3, 3) = m(1, 2) = m(2, 1) = 1;
    return m;
}

inline Mat4 matrix_2q(const Gate& g) {
    switch (g.kind) {
    case GateKind::CX: return cx_matrix();
    case GateKind::SWAP: return swap_matrix();
    case GateKind::SU4: return *g.matrix;
    default: throw InvalidArgument(std::string(gate_name(g.kind)) + " is not a two-qubit unitary");
    }
}

/// 2x2 or 4x4 unitary of a gate; barriers and measurements have none.
inline MatX gate_matrix(const Gate& g) {
    validate_gate(g);
    if (g.is_single_qubit_unitary()) return matrix_1q(g);
    if (g.is_two_qubit_unitary()) return matrix_2q(g);
    throw InvalidArgument(std::string(gate_name(g.kind)) + " has no matrix");
}

/// Maps a basis index through a wire relabeling: bit w of x moves to bit perm[w].
inline std::uint64_t permute_bits(std::uint64_t x, std::span<const int> perm) {
    std::uint64_t y = 0;
    for (std::size_t w = 0; w < perm.size(); ++w)
        if ((x >> w) & 1U) y |= std::uint64_t{1} << perm[w];
    return y;
}

inline bool is_permutation(std::span<const int> p) {
    std::vector<char> seen(p.size(), 0);
    for (int v : p) {
        if (v < 0 || static_cast<std::size_t>(v) >= p.size() || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

inline std::vector<int> identity_permutation(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

inline std::vector<int> inverse_permutation(std::span<const int> p) {
    std::vector<int> inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
    return inv;
}

/// Ordered gate list over `width` qubits, plus a relabeling of the measured wires:
/// the outcome on wire w is reported under label output_permutation[w].
class Circuit {
  public:
    explicit Circuit(int width) : width_(width), perm_(identity_permutation(width)) {
        if (width < 1) throw InvalidArgument("circuit width must be positive");
    }

    int width() const { return width_; }
    const std::vector<Gate>& gates() const { return gates_; }
    const std::vector<int>& output_permutation() const { return perm_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    Circuit& append(Gate g) {
        validate_gate(g);
        for (int q : g.qubits)
            if (q >= width_)
                throw InvalidArgument("qubit index " + std::to_string(q) + " out of range for width " +
                                      std::to_string(width_));
        gates_.push_back(std::move(g));
        return *this;
    }

    Circuit& set_output_permutation(std::vector<int> perm) {
        if (static_cast<int>(perm.size()) != width_ || !is_permutation(perm))
            throw InvalidArgument("output permutation must be a bijection on the circuit's qubits");
        perm_ = std::move(perm);
        return *this;
    }

    /// Same width and output permutation, no gates.
    Circuit empty_copy() const {
        Circuit c(width_);
        c.perm_ = perm_;
        return c;
    }

    std::size_t count(GateKind k) const {
        return static_cast<std::size_t>(
            std::count_if(gates_.begin(), gates_.end(), [k](const Gate& g) { return g.kind == k; }));
    }

    friend bool operator==(const Circuit& a, const Circuit& b) {
        return a.width_ == b.width_ && a.perm_ == b.perm_ && a.gates_ == b.gates_;
    }

  private:
    int width_;
    std::vector<Gate> gates_;
    std::vector<int> perm_;
};

/// Applies one unitary gate to a state vector of the circuit's width.
inline void apply_gate(std::span<Complex> amp, const Gate& g) {
    switch (g.kind) {
    case GateKind::CX: kernels::apply_cx(amp, g.qubits[0], g.qubits[1]); break;
    case GateKind::SWAP: kernels::apply_swap(amp, g.qubits[0], g.qubits[1]); break;
    case GateKind::SU4: kernels::apply_2q(amp, *g.matrix, g.qubits[0], g.qubits[1]); break;
    case GateKind::Barrier: break;
    case GateKind::Measure: throw InvalidArgument("measure cannot be applied as a unitary");
    default: kernels::apply_1q(amp, matrix_1q(g), g.qubits[0]); break;
    }
}

inline constexpr int kMaxUnitaryWidth = 14;

/// Full 2^m x 2^m unitary, including the output relabeling.
inline MatX circuit_unitary(const Circuit& c) {
    const int m = c.width();
    if (m > kMaxUnitaryWidth)
        throw InvalidArgument("circuit_unitary: width " + std::to_string(m) + " exceeds limit " +
                              std::to_string(kMaxUnitaryWidth));
    if (c.count(GateKind::Measure) > 0) throw InvalidArgument("circuit_unitary: circuit contains measurements");
    const std::size_t dim = std::size_t{1} << m;
    MatX u = MatX::Identity(dim, dim);
    for (std::size_t col = 0; col < dim; ++col) {
        std::span<Complex> column(u.col(col).data(), dim);
        for (const auto& g : c.gates()) apply_gate(column, g);
    }
    const auto& perm = c.output_permutation();
    if (perm == identity_permutation(m)) return u;
    MatX out(dim, dim);
    for (std::size_t row = 0; row < dim; ++row) out.row(permute_bits(row, perm)) = u.row(row);
    return out;
}

/// Gates acting on pairwise-disjoint qubits.
struct Layer {
    std::vector<Gate> gates;
};

/// Greedy front-to-back (as-soon-as-possible) partition into layers.
inline std::vector<Layer> layerize(const Circuit& c) {
    std::vector<int> depth(c.width(), 0);
    std::vector<Layer> layers;
    for (const auto& g : c.gates()) {
        int level = 0;
        for (int q : g.qubits) level = std::max(level, depth[q]);
        if (level >= static_cast<int>(layers.size())) layers.resize(level + 1);
        layers[level].gates.push_back(g);
        for (int q : g.qubits) depth[q] = level + 1;
    }
    return layers;
}

inline Circuit concatenate(int width, const std::vector<Layer>& layers) {
    Circuit c(width);
    for (const auto& layer : layers)
        for (const auto& g : layer.gates) c.append(g);
    return c;
}

/// Returns the gate with its qubits renamed through `map` (new = map[old]).
inline Gate remap(Gate g, std::span<const int> map) {
    for (int& q : g.qubits) q = map[q];
    return g;
}

/// Permutation matrix sending basis state x to permute_bits(x, perm).
inline MatX permutation_matrix(std::span<const int> perm) {
    const std::size_t dim = std::size_t{1} << perm.size();
    MatX p = MatX::Zero(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) p(permute_bits(x, perm), x) = 1.0;
    return p;
}

/// Number of CX gates, the figure of merit for compiled circuits.
inline std::size_t cx_count(const Circuit& c) { return c.count(GateKind::CX); }

}  // namespace qvol
