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

#include "qvol/linalg.hpp"

#include <cstddef>
#include <span>
#include <utility>

// In-place amplitude kernels over a 2^n state (qubit 0 is the least significant bit).
namespace qvol::kernels {

inline void apply_1q(std::span<Complex> amp, const Mat2& m, int q) {
    const std::size_t stride = std::size_t{1} << q;
    const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
    for (std::size_t base = 0; base < amp.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = amp[i];
            const Complex a1 = amp[i + stride];
            amp[i] = m00 * a0 + m01 * a1;
            amp[i + stride] = m10 * a0 + m11 * a1;
        }
    }
}

/// Applies a 4x4 matrix whose basis index is b0 + 2*b1, with b0 the bit of q0 and b1 the bit of q1.
inline void apply_2q(std::span<Complex> amp, const Mat4& m, int q0, int q1) {
    const std::size_t s0 = std::size_t{1} << q0;
    const std::size_t s1 = std::size_t{1} << q1;
    const std::size_t mask = s0 | s1;
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if (i & mask) continue;
        const std::size_t idx[4] = {i, i | s0, i | s1, i | s0 | s1};
        Complex in[4];
        for (int k = 0; k < 4; ++k) in[k] = amp[idx[k]];
        for (int r = 0; r < 4; ++r)
            amp[idx[r]] = m(r, 0) * in[0] + m(r, 1) * in[1] + m(r, 2) * in[2] + m(r, 3) * in[3];
    }
}

inline void apply_cx(std::span<Complex> amp, int control, int target) {
    const std::size_t sc = std::size_t{1} << control;
    const std::size_t st = std::size_t{1} << target;
    for (std::size_t i = 0; i < amp.size(); ++i)
        if ((i & sc) && !(i & st)) std::swap(amp[i], amp[i | st]);
}

inline void apply_swap(std::span<Complex> amp, int a, int b) {
    const std::size_t sa = std::size_t{1} << a;
    const std::size_t sb = std::size_t{1} << b;
    for (std::size_t i = 0; i < amp.size(); ++i)
        if ((i & sa) && !(i & sb)) std::swap(amp[i], amp[(i ^ sa) | sb]);
}

/// Pauli by index 1=X, 2=Y, 3=Z on qubit q.
inline void apply_pauli(std::span<Complex> amp, int pauli, int q) {
    const std::size_t s = std::size_t{1} << q;
    switch (pauli) {
    case 1:
        for (std::size_t i = 0; i < amp.size(); ++i)
            if (!(i & s)) std::swap(amp[i], amp[i | s]);
        break;
    case 2:
        for (std::size_t i = 0; i < amp.size(); ++i) {
            if (i & s) continue;
            const Complex a0 = amp[i];
            amp[i] = -kI * amp[i | s];
            amp[i | s] = kI * a0;
        }
        break;
    case 3:
        for (std::size_t i = 0; i < amp.size(); ++i)
            if (i & s) amp[i] = -amp[i];
        break;
    default:
        break;
    }
}

}  // namespace qvol::kernels
