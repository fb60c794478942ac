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
#include "qvol/linalg.hpp"

#include <cmath>

namespace qvol {

struct U3Angles {
    double theta = 0;
    double phi = 0;
    double lambda = 0;
};

/// Angles with u = e^{i a} [[c, -e^{i lambda} s], [e^{i phi} s, e^{i(phi+lambda)} c]],
/// c = cos(theta/2), s = sin(theta/2), theta in [0, pi].
inline U3Angles u3_angles(const Mat2& u) {
    constexpr double eps = 1e-14;
    U3Angles a;
    const double c = std::abs(u(0, 0)), s = std::abs(u(1, 0));
    a.theta = 2 * std::atan2(s, c);
    if (c >= s) {
        const double alpha = std::arg(u(0, 0));
        a.phi = s > eps ? std::arg(u(1, 0)) - alpha : 0.0;
        a.lambda = std::arg(u(1, 1)) - alpha - a.phi;
    } else {
        a.phi = c > eps ? std::arg(u(1, 1)) - std::arg(-u(0, 1)) : 0.0;
        const double alpha = std::arg(u(1, 0)) - a.phi;
        a.lambda = std::arg(-u(0, 1)) - alpha;
    }
    return a;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double x) {
    x = std::remainder(x, 2 * kPi);
    return x <= -kPi ? x + 2 * kPi : x;
}

/// A u3 gate reproducing `u` up to global phase.
inline Gate u3_gate(int q, const Mat2& u) {
    const auto a = u3_angles(u);
    return Gate::u3(q, a.theta, wrap_angle(a.phi), wrap_angle(a.lambda));
}

}  // namespace qvol
