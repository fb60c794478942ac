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

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qvol {

/// Directed edge set over physical qubits 0..n-1; a CX(c, t) is native iff (c, t) is an edge.
class CouplingGraph {
  public:
    static constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

    CouplingGraph() = default;
    CouplingGraph(int n, std::vector<std::pair<int, int>> edges, std::string name = {})
        : n_(n), name_(std::move(name)) {
        if (n < 1) throw InvalidArgument("coupling graph needs at least one qubit");
        for (auto [c, t] : edges) add_edge(c, t);
        compute_distances();
    }

    int size() const { return n_; }
    const std::string& name() const { return name_; }
    const std::set<std::pair<int, int>>& edges() const { return edges_; }

    bool has_edge(int c, int t) const { return edges_.count({c, t}) > 0; }
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }
    int distance(int a, int b) const { return dist_[a * n_ + b]; }
    const std::vector<int>& neighbors(int q) const { return adj_[q]; }

    /// Unordered coupled pairs (a < b).
    std::vector<std::pair<int, int>> undirected_edges() const {
        std::set<std::pair<int, int>> s;
        for (auto [c, t] : edges_) s.insert({std::min(c, t), std::max(c, t)});
        return {s.begin(), s.end()};
    }

    /// Vertices on one shortest path from a to b (inclusive), on the undirected skeleton.
    std::vector<int> shortest_path(int a, int b) const {
        if (distance(a, b) >= kUnreachable) throw MappingError("no path between physical qubits");
        std::vector<int> path{a};
        int cur = a;
        while (cur != b) {
            for (int nb : adj_[cur])
                if (distance(nb, b) == distance(cur, b) - 1) {
                    cur = nb;
                    break;
                }
            path.push_back(cur);
        }
        return path;
    }

    bool connected() const {
        for (int i = 0; i < n_; ++i)
            if (distance(0, i) >= kUnreachable) return false;
        return true;
    }

    // Presets. Every coupled pair is usable in both directions.
    static CouplingGraph all_to_all(int n) {
        std::vector<std::pair<int, int>> e;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b) e.emplace_back(a, b);
        return {n, e, "all-to-all(" + std::to_string(n) + ")"};
    }
    static CouplingGraph line(int n) {
        std::vector<std::pair<int, int>> e;
        for (int a = 0; a + 1 < n; ++a) both(e, a, a + 1);
        return {n, e, "line(" + std::to_string(n) + ")"};
    }
    static CouplingGraph loop(int n) {
        std::vector<std::pair<int, int>> e;
        for (int a = 0; a + 1 < n; ++a) both(e, a, a + 1);
        if (n > 2) both(e, n - 1, 0);
        return {n, e, "loop(" + std::to_string(n) + ")"};
    }
    /// Largest square that fits, then extra qubits fill a new right column, then a new bottom row.
    /// Qubits are numbered row-major within the square, then in the order they were added.
    static CouplingGraph grid(int n) {
        if (n < 1) throw InvalidArgument("grid needs at least one qubit");
        const int k = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)) + 1e-9));
        std::vector<std::pair<int, int>> pos;
        for (int i = 0; i < k * k; ++i) pos.emplace_back(i / k, i % k);
        for (int j = 0; j < n - k * k; ++j) pos.push_back(j < k ? std::pair{j, k} : std::pair{k, j - k});
        std::vector<std::pair<int, int>> e;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (std::abs(pos[a].first - pos[b].first) + std::abs(pos[a].second - pos[b].second) == 1)
                    both(e, a, b);
        return {n, e, "grid(" + std::to_string(n) + ")"};
    }

  private:
    int n_ = 0;
    std::string name_;
    std::set<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> dist_;

    static void both(std::vector<std::pair<int, int>>& e, int a, int b) {
        e.emplace_back(a, b);
        e.emplace_back(b, a);
    }

    void add_edge(int c, int t) {
        if (c < 0 || t < 0 || c >= n_ || t >= n_)
            throw InvalidArgument("edge (" + std::to_string(c) + "," + std::to_string(t) + ") out of range");
        if (c == t) throw InvalidArgument("self-loop on qubit " + std::to_string(c));
        edges_.insert({c, t});
    }

    void compute_distances() {
        adj_.assign(n_, {});
        for (auto [a, b] : undirected_edges()) {
            adj_[a].push_back(b);
            adj_[b].push_back(a);
        }
        for (auto& v : adj_) std::sort(v.begin(), v.end());
        dist_.assign(static_cast<std::size_t>(n_) * n_, kUnreachable);
        for (int s = 0; s < n_; ++s) {
            std::queue<int> q;
            dist_[s * n_ + s] = 0;
            q.push(s);
            while (!q.empty()) {
                const int u = q.front();
                q.pop();
                for (int v : adj_[u])
                    if (dist_[s * n_ + v] == kUnreachable) {
                        dist_[s * n_ + v] = dist_[s * n_ + u] + 1;
                        q.push(v);
                    }
            }
        }
    }
};

inline nlohmann::json to_json(const CouplingGraph& g) {
    nlohmann::json j;
    j["schema_version"] = 1;
    if (!g.name().empty()) j["name"] = g.name();
    j["n"] = g.size();
    j["edges"] = nlohmann::json::array();
    for (auto [c, t] : g.edges()) j["edges"].push_back({c, t});
    return j;
}

inline CouplingGraph coupling_graph_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
        throw InvalidArgument("coupling graph: field 'n' must be an integer");
    if (!j.contains("edges") || !j["edges"].is_array())
        throw InvalidArgument("coupling graph: field 'edges' must be an array");
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < j["edges"].size(); ++i) {
        const auto& e = j["edges"][i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw InvalidArgument("coupling graph: edges[" + std::to_string(i) + "] must be a pair of integers");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return {j["n"].get<int>(), edges, j.value("name", std::string{})};
}

/// Parses "line(4)", "line:4", "grid(9)", "loop:5", "all-to-all(4)"; returns false if not a preset form.
inline bool parse_preset(const std::string& spec, CouplingGraph& out) {
    std::string kind, count;
    const auto open = spec.find_first_of("(:");
    if (open == std::string::npos) return false;
    kind = spec.substr(0, open);
    count = spec.substr(open + 1);
    if (spec[open] == '(') {
        if (count.empty() || count.back() != ')') return false;
        count.pop_back();
    }
    int n = 0;
    try {
        std::size_t used = 0;
        n = std::stoi(count, &used);
        if (used != count.size()) return false;
    } catch (const std::exception&) {
        return false;
    }
    if (n < 1) throw InvalidArgument("graph preset '" + spec + "': qubit count must be positive");
    if (kind == "all-to-all") out = CouplingGraph::all_to_all(n);
    else if (kind == "line") out = CouplingGraph::line(n);
    else if (kind == "loop") out = CouplingGraph::loop(n);
    else if (kind == "grid") out = CouplingGraph::grid(n);
    else return false;
    return true;
}

inline CouplingGraph load_coupling_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open coupling graph file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument("coupling graph file '" + path + "': " + e.what());
    }
    return coupling_graph_from_json(j);
}

}  // namespace qvol
