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
#include "qvol/error.hpp"
#include "qvol/kernels.hpp"
#include "qvol/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace qvol {

inline constexpr int kMaxStatevectorWidth = 26;

class Statevector {
  public:
    explicit Statevector(int width) : width_(width) {
        if (width < 1 || width > kMaxStatevectorWidth)
            throw InvalidArgument("statevector width " + std::to_string(width) + " outside 1.." +
                                  std::to_string(kMaxStatevectorWidth));
        amp_.assign(std::size_t{1} << width, Complex{0, 0});
        amp_[0] = 1.0;
    }

    int width() const { return width_; }
    std::span<Complex> amplitudes() { return amp_; }
    std::span<const Complex> amplitudes() const { return amp_; }

    /// Applies a unitary gate; barriers and measurements are skipped (measurement is terminal).
    void apply(const Gate& g) {
        if (g.kind == GateKind::Measure || g.kind == GateKind::Barrier) return;
        apply_gate(amp_, g);
    }

    double norm_squared() const {
        double s = 0;
        for (const auto& a : amp_) s += std::norm(a);
        return s;
    }

  private:
    int width_;
    std::vector<Complex> amp_;
};

/// Output distribution indexed by output label: entry y is the probability of reading y
/// after the circuit's output relabeling.
inline std::vector<double> labelled_probabilities(const Statevector& sv, std::span<const int> perm) {
    const auto amp = sv.amplitudes();
    std::vector<double> p(amp.size());
    const bool ident = std::is_sorted(perm.begin(), perm.end());
    for (std::size_t x = 0; x < amp.size(); ++x) p[ident ? x : permute_bits(x, perm)] = std::norm(amp[x]);
    return p;
}

/// p(x) = |<x|U|0>|^2 over all 2^width output labels.
inline std::vector<double> ideal_probabilities(const Circuit& c) {
    Statevector sv(c.width());
    for (const auto& g : c.gates()) sv.apply(g);
    return labelled_probabilities(sv, c.output_permutation());
}

/// Distribution of the low `m` label bits.
inline std::vector<double> marginal_low_bits(const std::vector<double>& p, int m) {
    const std::size_t mask = (std::size_t{1} << m) - 1;
    std::vector<double> out(mask + 1, 0.0);
    for (std::size_t x = 0; x < p.size(); ++x) out[x & mask] += p[x];
    return out;
}

/// Outputs whose ideal probability strictly exceeds the median.
struct HeavySet {
    int width = 0;
    double median = 0;
    double ideal_heavy_probability = 0;  // sum of member probabilities
    std::vector<std::uint64_t> members;  // ascending

    bool contains(std::uint64_t x) const { return std::binary_search(members.begin(), members.end(), x); }
};

inline HeavySet heavy_set(const std::vector<double>& probs) {
    const std::size_t n = probs.size();
    if (n < 2 || (n & (n - 1)) != 0) throw InvalidArgument("heavy_set: distribution size must be 2^m with m >= 1");
    HeavySet hs;
    hs.width = std::countr_zero(n);
    auto sorted = probs;
    std::sort(sorted.begin(), sorted.end());
    hs.median = (sorted[n / 2] + sorted[n / 2 - 1]) / 2;
    for (std::size_t x = 0; x < n; ++x)
        if (probs[x] > hs.median) {
            hs.members.push_back(x);
            hs.ideal_heavy_probability += probs[x];
        }
    return hs;
}

inline HeavySet heavy_set(const Circuit& c) { return heavy_set(ideal_probabilities(c)); }

/// Stochastic Pauli error probabilities, attached to gates and readout.
struct NoiseModel {
    double eps1 = 0;  // after each single-qubit gate
    double eps2 = 0;  // after each two-qubit gate
    double epsM = 0;  // independent flip of each read bit
    std::map<std::pair<int, int>, double> edge_eps2;  // per unordered pair (a < b)

    bool noiseless() const { return eps1 == 0 && eps2 == 0 && epsM == 0 && edge_eps2.empty(); }

    double two_qubit(int a, int b) const {
        if (edge_eps2.empty()) return eps2;
        auto it = edge_eps2.find({std::min(a, b), std::max(a, b)});
        return it == edge_eps2.end() ? eps2 : it->second;
    }

    void validate() const {
        auto check = [](double p, const std::string& what) {
            if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("noise: " + what + " must lie in [0, 1]");
        };
        check(eps1, "eps1");
        check(eps2, "eps2");
        check(epsM, "epsM");
        for (const auto& [e, p] : edge_eps2)
            check(p, "edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")");
    }

    /// Pauli-injection probability of a k-qubit channel with average gate infidelity r.
    static double pauli_from_infidelity(double r, int k) {
        const double d = static_cast<double>(1 << k);
        return r * (d + 1) / d;
    }
};

inline nlohmann::json to_json(const NoiseModel& n) {
    nlohmann::json j{{"schema_version", 1}, {"eps1", n.eps1}, {"eps2", n.eps2}, {"epsM", n.epsM},
                     {"interpretation", "pauli"}};
    if (!n.edge_eps2.empty()) {
        j["edges"] = nlohmann::json::array();
        for (const auto& [e, p] : n.edge_eps2) j["edges"].push_back({{"pair", {e.first, e.second}}, {"eps2", p}});
    }
    return j;
}

/// Reads {eps1, eps2, epsM, interpretation, edges?}. With interpretation "infidelity" the
/// gate rates are average gate infidelities and are converted to Pauli-injection rates.
inline NoiseModel noise_model_from_json(const nlohmann::json& j, const std::string& where = "noise") {
    if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
    auto num = [&](const char* key) {
        if (!j.contains(key)) return 0.0;
        if (!j[key].is_number()) throw InvalidArgument(where + "." + key + ": expected a number");
        return j[key].get<double>();
    };
    NoiseModel n;
    n.eps1 = num("eps1");
    n.eps2 = num("eps2");
    n.epsM = num("epsM");
    const std::string interp = j.value("interpretation", std::string("pauli"));
    if (interp != "pauli" && interp != "infidelity")
        throw InvalidArgument(where + ".interpretation: expected \"pauli\" or \"infidelity\"");
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) throw InvalidArgument(where + ".edges: expected an array");
        for (std::size_t i = 0; i < j["edges"].size(); ++i) {
            const auto& e = j["edges"][i];
            const std::string at = where + ".edges[" + std::to_string(i) + "]";
            if (!e.is_object() || !e.contains("pair") || !e["pair"].is_array() || e["pair"].size() != 2 ||
                !e.contains("eps2") || !e["eps2"].is_number())
                throw InvalidArgument(at + ": expected {\"pair\": [a, b], \"eps2\": r}");
            const int a = e["pair"][0].get<int>(), b = e["pair"][1].get<int>();
            n.edge_eps2[{std::min(a, b), std::max(a, b)}] = e["eps2"].get<double>();
        }
    }
    if (interp == "infidelity") {
        n.eps1 = NoiseModel::pauli_from_infidelity(n.eps1, 1);
        n.eps2 = NoiseModel::pauli_from_infidelity(n.eps2, 2);
        for (auto& [e, p] : n.edge_eps2) p = NoiseModel::pauli_from_infidelity(p, 2);
    }
    n.validate();
    return n;
}

/// Drops wires that no gate touches and whose output label is at least `keep_labels`,
/// renumbering the survivors in order. Labels below `keep_labels` are preserved.
inline Circuit compact_wires(const Circuit& c, int keep_labels) {
    const int n = c.width();
    std::vector<char> used(n, 0);
    for (const auto& g : c.gates())
        if (g.kind != GateKind::Barrier)
            for (int q : g.qubits) used[q] = 1;
    const auto& perm = c.output_permutation();
    for (int w = 0; w < n; ++w)
        if (perm[w] < keep_labels) used[w] = 1;
    std::vector<int> map(n, -1);
    int k = 0;
    for (int w = 0; w < n; ++w)
        if (used[w]) map[w] = k++;
    if (k == n) return c;
    Circuit out(k);
    for (const auto& g : c.gates()) {
        if (g.kind == GateKind::Barrier) {
            std::vector<int> qs;
            for (int q : g.qubits)
                if (map[q] >= 0) qs.push_back(map[q]);
            if (!qs.empty()) out.append(Gate::barrier(qs));
            continue;
        }
        out.append(remap(g, map));
    }
    std::vector<int> labels;
    for (int w = 0; w < n; ++w)
        if (used[w]) labels.push_back(perm[w]);
    std::vector<int> sorted_extra;
    for (int l : labels)
        if (l >= keep_labels) sorted_extra.push_back(l);
    std::sort(sorted_extra.begin(), sorted_extra.end());
    std::vector<int> new_perm(k);
    for (int i = 0; i < k; ++i) {
        const int l = labels[i];
        new_perm[i] = l < keep_labels
                          ? l
                          : keep_labels + static_cast<int>(std::lower_bound(sorted_extra.begin(), sorted_extra.end(), l) -
                                                           sorted_extra.begin());
    }
    out.set_output_permutation(new_perm);
    return out;
}

namespace detail {

inline std::uint64_t sample_index(const std::vector<double>& cdf, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, cdf.back());
    const double r = u(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
}

inline std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> c(p.size());
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) c[i] = s += p[i];
    return c;
}

}  // namespace detail

/// Noisy sampler for one circuit. Each shot follows one Pauli trajectory: after every
/// gate an error fires with the gate's rate and applies a uniform non-identity Pauli on
/// its qubits. Shots without gate errors draw from the cached ideal distribution.
/// Readout flips each of the low `measured` label bits with probability epsM.
class TrajectorySampler {
  public:
    TrajectorySampler(const Circuit& c, const NoiseModel& noise, int measured = -1)
        : c_(c), noise_(noise), measured_(measured < 0 ? c.width() : measured) {
        noise.validate();
        if (measured_ < 1 || measured_ > c.width())
            throw InvalidArgument("sampler: measured bit count out of range");
        for (std::size_t i = 0; i < c.gates().size(); ++i) {
            const auto& g = c.gates()[i];
            if (g.kind == GateKind::Barrier || g.kind == GateKind::Measure) continue;
            if (g.qubits.size() == 1) rates_.push_back({i, noise.eps1});
            else rates_.push_back({i, noise.two_qubit(g.qubits[0], g.qubits[1])});
        }
        for (const auto& r : rates_)
            if (r.second > 0) gate_noise_ = true;
        // Checkpoints of the ideal evolution, spaced to keep memory near 32 MiB.
        const std::size_t dim = std::size_t{1} << c.width();
        const std::size_t budget = (std::size_t{32} << 20) / (dim * sizeof(Complex));
        stride_ = std::max<std::size_t>(1, (c.gates().size() + 1) / std::max<std::size_t>(1, budget));
        Statevector sv(c.width());
        for (std::size_t i = 0; i < c.gates().size(); ++i) {
            if (gate_noise_ && i % stride_ == 0) checkpoints_.emplace_back(sv.amplitudes().begin(), sv.amplitudes().end());
            sv.apply(c.gates()[i]);
        }
        ideal_cdf_ = detail::cumulative(labelled_probabilities(sv, c.output_permutation()));
    }

    /// One shot's output label, masked to the measured bits.
    std::uint64_t shot(Rng& rng) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uint64_t x;
        errors_.clear();
        if (gate_noise_)
            for (std::size_t k = 0; k < rates_.size(); ++k)
                if (rates_[k].second > 0 && u(rng) < rates_[k].second) errors_.push_back(k);
        if (errors_.empty()) {
            x = detail::sample_index(ideal_cdf_, rng);
        } else {
            x = noisy_trajectory(rng);
        }
        const std::uint64_t mask = (std::uint64_t{1} << measured_) - 1;
        x &= mask;
        if (noise_.epsM > 0)
            for (int b = 0; b < measured_; ++b)
                if (u(rng) < noise_.epsM) x ^= std::uint64_t{1} << b;
        return x;
    }

  private:
    const Circuit& c_;
    NoiseModel noise_;
    int measured_;
    std::vector<std::pair<std::size_t, double>> rates_;  // gate index, error rate
    bool gate_noise_ = false;
    std::size_t stride_ = 1;
    std::vector<std::vector<Complex>> checkpoints_;
    std::vector<double> ideal_cdf_;
    std::vector<std::size_t> errors_;  // indices into rates_
    std::vector<Complex> work_;

    std::uint64_t noisy_trajectory(Rng& rng) {
        const std::size_t first_gate = rates_[errors_.front()].first;
        const std::size_t cp = first_gate / stride_;
        work_ = checkpoints_[cp];
        std::span<Complex> amp(work_);
        std::uniform_int_distribution<int> p1(1, 3), p2(1, 15);
        std::size_t next_err = 0;
        for (std::size_t i = cp * stride_; i < c_.gates().size(); ++i) {
            const auto& g = c_.gates()[i];
            if (g.kind == GateKind::Barrier || g.kind == GateKind::Measure) continue;
            apply_gate(amp, g);
            if (next_err < errors_.size() && rates_[errors_[next_err]].first == i) {
                ++next_err;
                if (g.qubits.size() == 1) {
                    kernels::apply_pauli(amp, p1(rng), g.qubits[0]);
                } else {
                    const int k = p2(rng);
                    if (k % 4) kernels::apply_pauli(amp, k % 4, g.qubits[0]);
                    if (k / 4) kernels::apply_pauli(amp, k / 4, g.qubits[1]);
                }
            }
        }
        std::vector<double> p(work_.size());
        for (std::size_t x = 0; x < work_.size(); ++x) p[x] = std::norm(work_[x]);
        const auto idx = detail::sample_index(detail::cumulative(p), rng);
        const auto& perm = c_.output_permutation();
        return permute_bits(idx, perm);
    }
};

/// n_s output labels (low `measured` bits) of noisy executions; deterministic in `seed`.
inline std::vector<std::uint64_t> sample_outputs(const Circuit& c, const NoiseModel& noise, std::size_t shots,
                                                 std::uint64_t seed, int measured = -1) {
    TrajectorySampler sampler(c, noise, measured);
    Rng rng(seed);
    std::vector<std::uint64_t> out(shots);
    for (auto& x : out) x = sampler.shot(rng);
    return out;
}

struct HeavyCount {
    std::size_t n_h = 0;
    double h_hat = 0;
};

inline HeavyCount heavy_fraction(std::span<const std::uint64_t> samples, const HeavySet& hs) {
    HeavyCount r;
    for (auto x : samples) r.n_h += hs.contains(x) ? 1 : 0;
    r.h_hat = samples.empty() ? 0.0 : static_cast<double>(r.n_h) / static_cast<double>(samples.size());
    return r;
}

}  // namespace qvol
