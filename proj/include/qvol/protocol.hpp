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

#include "qvol/coupling.hpp"
#include "qvol/model.hpp"
#include "qvol/parallel.hpp"
#include "qvol/pipeline.hpp"
#include "qvol/simulator.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qvol {

inline constexpr double kPassFraction = 2.0 / 3.0;
inline constexpr int kMinCircuits = 100;

enum class Topology { AllToAll, Line, Loop, Grid };

inline std::string_view topology_name(Topology t) {
    switch (t) {
    case Topology::AllToAll: return "all-to-all";
    case Topology::Line: return "line";
    case Topology::Loop: return "loop";
    case Topology::Grid: return "grid";
    }
    return "?";
}

inline Topology parse_topology(const std::string& s) {
    if (s == "all-to-all") return Topology::AllToAll;
    if (s == "line") return Topology::Line;
    if (s == "loop") return Topology::Loop;
    if (s == "grid") return Topology::Grid;
    throw InvalidArgument("unknown topology '" + s + "' (expected all-to-all, line, loop or grid)");
}

inline CouplingGraph make_topology(Topology t, int n) {
    switch (t) {
    case Topology::AllToAll: return CouplingGraph::all_to_all(n);
    case Topology::Line: return CouplingGraph::line(n);
    case Topology::Loop: return CouplingGraph::loop(n);
    case Topology::Grid: return CouplingGraph::grid(n);
    }
    throw InvalidArgument("unknown topology");
}

/// Either one fixed device graph or a family sized to each circuit width.
struct GraphSpec {
    std::optional<CouplingGraph> fixed;
    Topology family = Topology::AllToAll;

    CouplingGraph for_width(int m) const {
        if (fixed) {
            if (fixed->size() < m)
                throw InvalidArgument("graph '" + fixed->name() + "' has " + std::to_string(fixed->size()) +
                                      " qubits, fewer than width " + std::to_string(m));
            return *fixed;
        }
        return make_topology(family, m);
    }
    std::string describe() const { return fixed ? fixed->name() : std::string(topology_name(family)) + "(m)"; }
};

struct TrialConfig {
    int n_c = 200;
    int n_s = 100;
    double z = 2.0;
    PassPipeline pipeline = PassPipeline::standard();
    GraphSpec graph;
    NoiseModel noise;
    std::uint64_t seed = 0;
    unsigned jobs = 1;

    void validate() const {
        if (n_c < kMinCircuits)
            throw InvalidArgument("circuits: at least " + std::to_string(kMinCircuits) + " circuits are required, got " +
                                  std::to_string(n_c));
        if (n_s < 1) throw InvalidArgument("shots: must be positive");
        if (!(z >= 0)) throw InvalidArgument("z: must be non-negative");
        noise.validate();
        pipeline.validate();
    }
};

/// Lower confidence bound on the heavy-output probability from n_h heavy shots among
/// n_c circuits of n_s shots each.
inline double ci_lower(std::size_t n_h, int n_c, int n_s, double z) {
    const double nh = static_cast<double>(n_h);
    const double var = nh * (n_s - nh / n_c);
    return (nh - z * std::sqrt(std::max(0.0, var))) / (static_cast<double>(n_c) * n_s);
}

/// Smallest observed heavy fraction h with h - z*sqrt(h(1-h)/n_c) = 2/3.
inline double threshold(int n_c, double z) {
    if (n_c < 1) throw InvalidArgument("threshold: n_c must be positive");
    const double k = z * z / n_c;
    const double a = 1 + k, b = -(2 * kPassFraction + k), c = kPassFraction * kPassFraction;
    return (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
}

struct DepthResult {
    int m = 0, d = 0;
    int n_c = 0, n_s = 0;
    std::size_t n_h = 0;
    double h_hat = 0;
    double ci_lower = 0;
    double threshold = 0;
    bool passed = false;
    double ideal_heavy_mean = 0;  // mean of sum_{x in H_U} p_U(x)
    double mean_cx = 0;           // of the compiled circuits
};

/// Heavy set and compiled circuit for one model circuit; independent of the noise level.
struct PreparedCircuit {
    HeavySet heavy;
    Circuit compiled{1};
    std::size_t cx = 0;
};

struct PreparedBatch {
    int m = 0, d = 0;
    std::vector<PreparedCircuit> circuits;
};

inline std::uint64_t transpile_seed(std::uint64_t master, int m, int d, std::size_t i) {
    return derive_seed(master, Stream::Transpile, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(d), i});
}

inline std::uint64_t shot_seed(std::uint64_t master, int m, int d, std::size_t i) {
    return derive_seed(master, Stream::Noise, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(d), i});
}

/// Generates n_c model circuits, their heavy sets and compiled forms.
inline PreparedBatch prepare_batch(int m, int d, const TrialConfig& cfg) {
    cfg.validate();
    const auto graph = cfg.graph.for_width(m);
    PreparedBatch b{m, d, std::vector<PreparedCircuit>(cfg.n_c)};
    parallel_for(cfg.n_c, cfg.jobs, [&](std::size_t i) {
        const auto c = build_model_circuit({m, d, model_circuit_seed(cfg.seed, m, d, i)});
        auto& pc = b.circuits[i];
        pc.heavy = heavy_set(c);
        auto pipe = cfg.pipeline;
        pipe.seed = transpile_seed(cfg.seed, m, d, i);
        try {
            auto r = run_pipeline(c, graph, pipe);
            pc.cx = cx_count(r.circuit);
            pc.compiled = compact_wires(r.circuit, m);
        } catch (const Error& e) {
            throw Error("transpiling circuit " + std::to_string(i) + " (m=" + std::to_string(m) +
                        ", d=" + std::to_string(d) + "): " + e.what());
        }
    });
    return b;
}

/// Samples every prepared circuit under `noise` and applies the heavy-output test.
inline DepthResult evaluate_batch(const PreparedBatch& b, const NoiseModel& noise, const TrialConfig& cfg) {
    const std::size_t nc = b.circuits.size();
    std::vector<std::size_t> heavy(nc, 0);
    parallel_for(nc, cfg.jobs, [&](std::size_t i) {
        const auto& pc = b.circuits[i];
        const auto samples = sample_outputs(pc.compiled, noise, cfg.n_s, shot_seed(cfg.seed, b.m, b.d, i), b.m);
        heavy[i] = heavy_fraction(samples, pc.heavy).n_h;
    });
    DepthResult r;
    r.m = b.m;
    r.d = b.d;
    r.n_c = static_cast<int>(nc);
    r.n_s = cfg.n_s;
    double ideal = 0, cx = 0;
    for (std::size_t i = 0; i < nc; ++i) {
        r.n_h += heavy[i];
        ideal += b.circuits[i].heavy.ideal_heavy_probability;
        cx += static_cast<double>(b.circuits[i].cx);
    }
    r.h_hat = static_cast<double>(r.n_h) / (static_cast<double>(nc) * cfg.n_s);
    r.ci_lower = ci_lower(r.n_h, r.n_c, r.n_s, cfg.z);
    r.threshold = threshold(r.n_c, cfg.z);
    r.passed = r.ci_lower > kPassFraction;
    r.ideal_heavy_mean = ideal / static_cast<double>(nc);
    r.mean_cx = cx / static_cast<double>(nc);
    return r;
}

/// Heavy-output test at width m and depth d.
inline DepthResult is_heavy(int m, int d, const TrialConfig& cfg) {
    return evaluate_batch(prepare_batch(m, d, cfg), cfg.noise, cfg);
}

struct DepthSearch {
    int depth = 0;                     // achievable depth
    std::vector<DepthResult> results;  // tested depths, ascending
};

/// Achievable depth from an ascending sequence of test outcomes at depths 1, 2, ...
inline int achievable_depth_of(const std::vector<DepthResult>& ascending) {
    int d = 0;
    for (const auto& r : ascending) {
        if (!r.passed) break;
        d = r.d;
    }
    return d;
}

/// Tests depths 1..d_max in order and stops at the first failure.
inline DepthSearch achievable_depth(int m, const TrialConfig& cfg, int d_max) {
    DepthSearch s;
    for (int d = 1; d <= d_max; ++d) {
        s.results.push_back(is_heavy(m, d, cfg));
        if (!s.results.back().passed) break;
    }
    s.depth = achievable_depth_of(s.results);
    return s;
}

struct VolumeResult {
    int log2_vq = 0;
    int m_star = 0;  // width achieving it (smallest on ties); 0 if none
};

/// max over m of min(m, d(m)).
inline VolumeResult quantum_volume(const std::map<int, int>& d_of_m) {
    VolumeResult v;
    for (const auto& [m, d] : d_of_m) {
        const int k = std::min(m, d);
        if (k > v.log2_vq) {
            v.log2_vq = k;
            v.m_star = m;
        }
    }
    return v;
}

/// Constants of the effective error rate under routing overhead.
struct ScalingParams {
    double a = 1.29, b = -0.78;         // grid: (a sqrt(m) + b) eps
    double a_loop = 0.5, b_loop = -0.45;  // loop: (a' m + b') eps
};

inline double effective_error(double eps, Topology t, int m, const ScalingParams& p = {}) {
    switch (t) {
    case Topology::Grid: return (p.a * std::sqrt(static_cast<double>(m)) + p.b) * eps;
    case Topology::Loop: return (p.a_loop * m + p.b_loop) * eps;
    case Topology::AllToAll: return eps;
    case Topology::Line: throw InvalidArgument("no effective-error constants for the line topology");
    }
    return eps;
}

struct EstimateRow {
    int m = 0;
    double eps_eff = 0;
    double depth = 0;  // d~(m) = 1 / (m eps_eff)
    int volume = 0;    // min(m, floor(d~))
};

struct VolumeEstimate {
    std::vector<EstimateRow> rows;
    int log2_vq = 0;
    int m_star = 0;
};

/// Width-times-depth estimate: d~(m) = 1 / (m eps_eff(m)), m = 2..m_max.
inline VolumeEstimate estimate_volume(double eps, Topology t, const ScalingParams& p = {}, int m_max = 64) {
    if (!(eps >= 0)) throw InvalidArgument("estimate: eps must be non-negative");
    VolumeEstimate est;
    for (int m = 2; m <= m_max; ++m) {
        EstimateRow r;
        r.m = m;
        r.eps_eff = effective_error(eps, t, m, p);
        r.depth = r.eps_eff > 0 ? 1.0 / (m * r.eps_eff) : std::numeric_limits<double>::infinity();
        const double fl = std::isinf(r.depth) ? m : std::floor(r.depth * (1 + 1e-12));
        r.volume = static_cast<int>(std::min<double>(m, fl));
        if (r.volume > est.log2_vq) {
            est.log2_vq = r.volume;
            est.m_star = m;
        }
        est.rows.push_back(r);
    }
    return est;
}

/// Largest eps whose estimate reaches log2 V_Q = target at m = target.
inline double estimate_threshold(int target, Topology t, const ScalingParams& p = {}) {
    return 1.0 / (static_cast<double>(target) * target * effective_error(1.0, t, target, p));
}

struct QVReport {
    nlohmann::json metadata;
    std::string mode;  // "square" or "full"
    std::vector<DepthResult> points;
    std::map<int, int> d_of_m;
    VolumeResult volume;
};

/// Square mode tests m = d only and records d(m) = m on a pass, 0 otherwise (a lower bound).
/// Full mode searches the achievable depth up to max(d_max, m) for every width.
inline QVReport run_qv_sweep(const TrialConfig& cfg, const std::vector<int>& widths, bool square_only, int d_max = 0) {
    cfg.validate();
    QVReport rep;
    rep.mode = square_only ? "square" : "full";
    for (int m : widths) {
        if (m < 2) throw InvalidArgument("widths: every width must be at least 2");
        if (square_only) {
            auto r = is_heavy(m, m, cfg);
            rep.d_of_m[m] = r.passed ? m : 0;
            rep.points.push_back(r);
        } else {
            auto s = achievable_depth(m, cfg, std::max(d_max, m));
            rep.d_of_m[m] = s.depth;
            for (auto& r : s.results) rep.points.push_back(r);
        }
    }
    rep.volume = quantum_volume(rep.d_of_m);
    return rep;
}

enum class PassCriterion { MeanAboveTwoThirds, ConfidenceBound };

struct ThresholdOptions {
    double lo = 1e-3;
    double hi = 0.2;
    double rel_tol = 0.10;
    PassCriterion criterion = PassCriterion::MeanAboveTwoThirds;
    double eps1_ratio = 0.1;
};

struct ThresholdResult {
    double eps = 0;   // largest tested eps2 that passes
    double fail = 0;  // smallest tested eps2 that fails, at most eps * (1 + rel_tol)
    std::vector<std::pair<double, DepthResult>> evaluations;
};

/// Bisects eps2 (with eps1 = eps2 * eps1_ratio and the template's epsM) for the square point
/// m = d = target on topology(target). Circuits and shot seeds are shared across eps values.
inline ThresholdResult find_threshold_eps(int target, Topology t, const TrialConfig& tmpl,
                                          const ThresholdOptions& opt = {}) {
    if (!(opt.lo > 0 && opt.hi > opt.lo && opt.rel_tol > 0))
        throw InvalidArgument("threshold search: need 0 < lo < hi and rel_tol > 0");
    TrialConfig cfg = tmpl;
    cfg.graph = GraphSpec{make_topology(t, target), t};
    const auto batch = prepare_batch(target, target, cfg);
    ThresholdResult res;
    auto passes = [&](double eps) {
        NoiseModel n = tmpl.noise;
        n.eps2 = eps;
        n.eps1 = eps * opt.eps1_ratio;
        n.edge_eps2.clear();
        const auto r = evaluate_batch(batch, n, cfg);
        res.evaluations.emplace_back(eps, r);
        return opt.criterion == PassCriterion::MeanAboveTwoThirds ? r.h_hat > kPassFraction : r.passed;
    };
    double lo = opt.lo, hi = opt.hi;
    while (!passes(lo)) {
        hi = lo;
        lo /= 4;
        if (lo < 1e-7) throw Error("threshold search: no passing error rate found");
    }
    while (passes(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > 1) throw Error("threshold search: passes even at saturating noise");
    }
    while (hi > lo * (1 + opt.rel_tol)) {
        const double mid = std::sqrt(lo * hi);
        if (passes(mid)) lo = mid;
        else hi = mid;
    }
    res.eps = lo;
    res.fail = hi;
    return res;
}

inline nlohmann::json to_json(const DepthResult& r) {
    return {{"m", r.m},           {"d", r.d},
            {"n_c", r.n_c},       {"n_s", r.n_s},
            {"n_h", r.n_h},       {"h_hat", r.h_hat},
            {"ci_lower", r.ci_lower}, {"threshold", r.threshold},
            {"passed", r.passed}, {"ideal_heavy_mean", r.ideal_heavy_mean},
            {"mean_cx", r.mean_cx}};
}

inline nlohmann::json to_json(const QVReport& rep) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["metadata"] = rep.metadata;
    j["mode"] = rep.mode;
    j["points"] = nlohmann::json::array();
    for (const auto& p : rep.points) j["points"].push_back(to_json(p));
    j["d_of_m"] = nlohmann::json::object();
    for (const auto& [m, d] : rep.d_of_m) j["d_of_m"][std::to_string(m)] = d;
    j["log2_vq"] = rep.volume.log2_vq;
    j["m_star"] = rep.volume.m_star;
    return j;
}

inline std::string to_csv(const QVReport& rep) {
    std::ostringstream os;
    os << "m,d,n_c,n_s,n_h,h_hat,ci_lower,threshold,passed,ideal_heavy_mean,mean_cx\n";
    char buf[256];
    for (const auto& r : rep.points) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%zu,%.17g,%.17g,%.17g,%d,%.17g,%.17g\n", r.m, r.d, r.n_c, r.n_s,
                      r.n_h, r.h_hat, r.ci_lower, r.threshold, r.passed ? 1 : 0, r.ideal_heavy_mean, r.mean_cx);
        os << buf;
    }
    return os.str();
}

}  // namespace qvol
