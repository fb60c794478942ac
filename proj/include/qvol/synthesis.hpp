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
#include "qvol/model.hpp"
#include "qvol/parallel.hpp"
#include "qvol/weyl.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

// Expansions of a two-qubit target over a CNOT basis with 0..3 basis applications,
// their closed-form fidelities, and the statistics of best-expansion selection.
namespace qvol {

inline constexpr WeylCoordinates kCnotCoords{kPi / 4, 0.0, 0.0};

inline bool is_super_controlled(const WeylCoordinates& wb) {
    return std::abs(wb.alpha - kPi / 4) < kChamberSlack && std::abs(wb.gamma) < kChamberSlack;
}

/// Fidelity F^(i) of the optimal i-application expansion of target `wt` over basis `wb`.
inline double expansion_fidelity(int applications, const WeylCoordinates& wt,
                                 const WeylCoordinates& wb = kCnotCoords) {
    switch (applications) {
    case 0: return canonical_fidelity({0, 0, 0}, wt);
    case 1: return canonical_fidelity(wb, wt);
    case 2:
        if (!is_super_controlled(wb)) throw InvalidArgument("expansion_fidelity: two applications need a super-controlled basis");
        return (1 + 4 * std::cos(wt.gamma) * std::cos(wt.gamma)) / 5;
    case 3:
        if (!is_super_controlled(wb)) throw InvalidArgument("expansion_fidelity: three applications need a super-controlled basis");
        return 1.0;
    default: throw InvalidArgument("expansion_fidelity: applications must be in 0..3");
    }
}

struct ExpansionChoice {
    int applications = 3;
    bool mirrored = false;
    double approximation_fidelity = 1.0;  // F^(i) of the chosen expansion
    double predicted_fidelity = 1.0;      // F^(i) * F_b^i
};

namespace detail {
inline ExpansionChoice best_for(const WeylCoordinates& wt, double basis_fidelity, bool mirrored) {
    ExpansionChoice best;
    best.predicted_fidelity = -1;
    for (int i = 0; i <= 3; ++i) {
        const double fa = expansion_fidelity(i, wt);
        const double total = fa * std::pow(basis_fidelity, i);
        if (total > best.predicted_fidelity) best = {i, mirrored, fa, total};
    }
    return best;
}
}  // namespace detail

/// Expansion maximizing F^(i) * F_b^i; ties go to fewer applications, then to the unmirrored target.
inline ExpansionChoice select_expansion(const WeylCoordinates& wt, double basis_fidelity, bool allow_mirror) {
    if (!(basis_fidelity > 0 && basis_fidelity <= 1))
        throw InvalidArgument("select_expansion: basis fidelity must lie in (0, 1]");
    auto best = detail::best_for(wt, basis_fidelity, false);
    if (allow_mirror) {
        const auto m = detail::best_for(mirror_coords(wt), basis_fidelity, true);
        if (m.predicted_fidelity > best.predicted_fidelity) best = m;
    }
    return best;
}

/// Fewest CX applications that reproduce the target to within `tol` in average fidelity.
inline ExpansionChoice exact_expansion(const WeylCoordinates& wt, double tol = 1e-12) {
    for (int i = 0; i < 3; ++i) {
        const double fa = expansion_fidelity(i, wt);
        if (fa > 1 - tol) return {i, false, fa, fa};
    }
    return {3, false, 1.0, 1.0};
}

namespace detail {

// Two-qubit circuit (local qubits 0, 1) with i CX gates in the Weyl class `w`.
inline Circuit expansion_template(int applications, const WeylCoordinates& w) {
    Circuit c(2);
    switch (applications) {
    case 0: break;
    case 1: c.append(Gate::cx(0, 1)); break;
    case 2:
        // CX_{1,0} (e^{i a X} (x) e^{i b Z}) CX_{1,0} = exp(i(a XX + b ZZ))
        c.append(Gate::cx(1, 0));
        c.append(Gate::u3(1, -2 * w.alpha, -kPi / 2, kPi / 2));
        c.append(Gate::u1(0, -2 * w.beta));
        c.append(Gate::cx(1, 0));
        break;
    case 3:
        c.append(Gate::u1(0, kPi / 2));
        c.append(Gate::cx(0, 1));
        c.append(Gate::u1(1, kPi / 2 - 2 * w.gamma));
        c.append(Gate::u3(0, 2 * w.alpha - kPi / 2, 0, 0));
        c.append(Gate::cx(1, 0));
        c.append(Gate::u3(0, kPi / 2 - 2 * w.beta, 0, 0));
        c.append(Gate::cx(0, 1));
        c.append(Gate::u1(1, -kPi / 2));
        break;
    default: throw InvalidArgument("expansion_template: applications must be in 0..3");
    }
    return c;
}

inline WeylCoordinates approximant_coords(int applications, const WeylCoordinates& wt) {
    switch (applications) {
    case 0: return {0, 0, 0};
    case 1: return kCnotCoords;
    case 2: return {wt.alpha, wt.beta, 0};
    default: return wt;
    }
}

inline Mat4 unitary_4x4(const Circuit& c) { return Mat4(circuit_unitary(c)); }

}  // namespace detail

/// Two-qubit CX + u3 circuit realizing the chosen expansion of `target`. When mirrored,
/// the gates implement SWAP * target and the output permutation swaps the two labels,
/// so circuit_unitary of the result approximates `target` itself.
inline Circuit synthesize(const Mat4& target, const ExpansionChoice& choice) {
    const Mat4 goal = choice.mirrored ? Mat4(swap_matrix() * target) : target;
    const auto kt = kak_decompose(goal);
    const auto w = detail::approximant_coords(choice.applications, kt.coords);
    const Circuit core = detail::expansion_template(choice.applications, w);
    const auto kc = kak_decompose(detail::unitary_4x4(core));

    Circuit out(2);
    out.append(u3_gate(1, kc.k2l.adjoint() * kt.k2l));
    out.append(u3_gate(0, kc.k2r.adjoint() * kt.k2r));
    for (const auto& g : core.gates()) out.append(g);
    out.append(u3_gate(1, kt.k1l * kc.k1l.adjoint()));
    out.append(u3_gate(0, kt.k1r * kc.k1r.adjoint()));
    if (choice.mirrored) out.set_output_permutation({1, 0});
    return out;
}

/// Exact synthesis with the fewest CX gates.
inline Circuit synthesize_exact(const Mat4& target) { return synthesize(target, exact_expansion(weyl_of(target))); }

/// Haar measure density on the Weyl chamber (normalized over pi/4 >= alpha >= beta >= |gamma|).
inline double weyl_density(const WeylCoordinates& w) {
    const double c4a = std::cos(4 * w.alpha), c4b = std::cos(4 * w.beta), c4g = std::cos(4 * w.gamma);
    const double c8a = std::cos(8 * w.alpha), c8b = std::cos(8 * w.beta), c8g = std::cos(8 * w.gamma);
    return 24 / kPi * (c4a * c8b + c4b * c8g + c4g * c8a - c8a * c4b - c8b * c4g - c8g * c4a);
}

namespace detail {
// z with cos z = sqrt(5F - 1) / 2, i.e. the |gamma| that gives F^(2) = F.
inline double fidelity_angle(double f) { return std::acos(std::min(1.0, std::sqrt(5 * f - 1) / 2)); }
}  // namespace detail

/// P(F^(2) < F) for Haar-random targets.
inline double cdf_f2(double f) {
    if (f <= 3.0 / 5) return 0.0;
    if (f >= 1) return 1.0;
    const double z = detail::fidelity_angle(f);
    const double c2 = std::cos(2 * z);
    return c2 * c2 * c2 * c2 * ((4 * z - kPi) * (std::cos(4 * z) - 2) - 3 * std::sin(4 * z)) / kPi;
}

/// P(F^(2m) < F) for Haar-random targets with the freedom to mirror.
inline double cdf_f2m(double f) {
    if (f <= 3.0 / 5) return 0.0;
    if (f >= 1) return 1.0;
    const double z = detail::fidelity_angle(f);
    if (z >= kPi / 8) return 0.0;
    return std::cos(4 * z) * ((8 * z - kPi) * (std::cos(8 * z) - 2) - 3 * std::sin(8 * z)) / kPi;
}

/// F^(2m): two-application fidelity of the better of a target and its mirror.
inline double mirrored_two_fidelity(const WeylCoordinates& wt) {
    const double z = std::min(std::abs(wt.gamma), std::abs(wt.alpha - kPi / 4));
    return (1 + 4 * std::cos(z) * std::cos(z)) / 5;
}

struct ApproxStats {
    double basis_fidelity = 1;
    bool mirror = false;
    std::size_t samples = 0;
    std::array<double, 4> fractions{};  // by number of applications
    double mean_applications = 0;
    double mean_best_fidelity = 0;
    double effective_fidelity = 1;  // cube root of the mean F_best
    double infidelity_ratio = 0;    // (1 - F_e) / (1 - F_b), 0 when F_b = 1
};

/// Weyl coordinates of `samples` Haar-random targets; sample k uses its own derived seed,
/// so the result does not depend on `jobs`.
inline std::vector<WeylCoordinates> sample_weyl_coords(std::size_t samples, std::uint64_t seed, unsigned jobs = 1) {
    std::vector<WeylCoordinates> out(samples);
    parallel_for(samples, jobs, [&](std::size_t k) {
        Rng rng(derive_seed(seed, Stream::Approx, {k}));
        out[k] = weyl_of(haar_su4(rng));
    });
    return out;
}

/// Best-expansion statistics over the given targets.
inline ApproxStats approximation_stats(const std::vector<WeylCoordinates>& targets, double basis_fidelity,
                                       bool mirror) {
    if (targets.empty()) throw InvalidArgument("approximation_stats: need at least one sample");
    ApproxStats s;
    s.basis_fidelity = basis_fidelity;
    s.mirror = mirror;
    s.samples = targets.size();
    std::array<std::size_t, 4> counts{};
    double sum_best = 0;
    for (const auto& wt : targets) {
        const auto choice = select_expansion(wt, basis_fidelity, mirror);
        ++counts[choice.applications];
        sum_best += choice.predicted_fidelity;
    }
    const double n = static_cast<double>(targets.size());
    for (int i = 0; i < 4; ++i) {
        s.fractions[i] = static_cast<double>(counts[i]) / n;
        s.mean_applications += i * s.fractions[i];
    }
    s.mean_best_fidelity = sum_best / n;
    s.effective_fidelity = std::cbrt(s.mean_best_fidelity);
    s.infidelity_ratio = basis_fidelity < 1 ? (1 - s.effective_fidelity) / (1 - basis_fidelity) : 0.0;
    return s;
}

/// Best-expansion statistics over Haar-random targets.
inline ApproxStats approximation_stats(double basis_fidelity, bool mirror, std::size_t samples, std::uint64_t seed,
                                       unsigned jobs = 1) {
    if (samples == 0) throw InvalidArgument("approximation_stats: need at least one sample");
    return approximation_stats(sample_weyl_coords(samples, seed, jobs), basis_fidelity, mirror);
}

/// F_e = (mean over Haar targets of F_best)^(1/3).
inline double effective_fidelity(double basis_fidelity, bool mirror, std::size_t samples, std::uint64_t seed) {
    return approximation_stats(basis_fidelity, mirror, samples, seed).effective_fidelity;
}

}  // namespace qvol
