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
#include "qvol/linalg.hpp"
#include "qvol/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <utility>

namespace qvol {

/// Interaction content of a two-qubit gate: U ~ exp(i(alpha XX + beta YY + gamma ZZ)).
struct WeylCoordinates {
    double alpha = 0;
    double beta = 0;
    double gamma = 0;

    double operator[](int k) const { return k == 0 ? alpha : (k == 1 ? beta : gamma); }
    double& operator[](int k) { return k == 0 ? alpha : (k == 1 ? beta : gamma); }
};

inline constexpr double kChamberSlack = 1e-9;
// Points closer than this to alpha = pi/4 are treated as lying on that face.
inline constexpr double kBoundaryTol = 1e-10;

/// pi/4 >= alpha >= beta >= |gamma|, within slack.
inline bool in_weyl_chamber(const WeylCoordinates& w, double slack = kChamberSlack) {
    return w.alpha <= kPi / 4 + slack && w.alpha + slack >= w.beta && w.beta + slack >= std::abs(w.gamma);
}

inline double max_abs_diff(const WeylCoordinates& a, const WeylCoordinates& b) {
    return std::max({std::abs(a.alpha - b.alpha), std::abs(a.beta - b.beta), std::abs(a.gamma - b.gamma)});
}

namespace detail {

inline const Mat4& magic_basis() {
    static const Mat4 b = [] {
        Mat4 m;
        m << 1, 0, 0, kI, 0, kI, 1, 0, 0, kI, -1, 0, 1, 0, 0, -kI;
        return Mat4(m / std::sqrt(2.0));
    }();
    return b;
}

// Diagonal of B^dagger (P (x) P) B for P = X, Y, Z.
inline constexpr int kMagicSign[3][4] = {{1, 1, -1, -1}, {-1, 1, -1, 1}, {1, -1, -1, 1}};

inline Mat4 local_pauli_pair(int k) {
    const Mat2 p = pauli::axis(k);
    return kron(p, p);
}

// Single-qubit Clifford exchanging the Pauli axes j and k (up to sign).
inline Mat2 axis_exchange(int j, int k) {
    if (j > k) std::swap(j, k);
    if (j == 0 && k == 1) {
        Mat2 s;
        s << 1, 0, 0, kI;
        return s;
    }
    if (j == 1 && k == 2) return rx(kPi / 2);
    return ry(kPi / 2);
}

/// Splits a 4x4 product unitary into hi (x) lo.
inline std::pair<Mat2, Mat2> factor_product(const Mat4& k) {
    int bp = 0, bq = 0;
    double best = -1;
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            const double n = k.block<2, 2>(2 * p, 2 * q).squaredNorm();
            if (n > best) {
                best = n;
                bp = p;
                bq = q;
            }
        }
    const Mat2 blk = k.block<2, 2>(2 * bp, 2 * bq);
    const Mat2 lo = blk / std::sqrt(blk.determinant());
    Mat2 hi;
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) hi(p, q) = (lo.adjoint() * k.block<2, 2>(2 * p, 2 * q)).trace() / 2.0;
    return {hi, lo};
}

}  // namespace detail

/// exp(i(alpha XX + beta YY + gamma ZZ)).
inline Mat4 canonical_gate(const WeylCoordinates& w) {
    const Mat4& b = detail::magic_basis();
    Eigen::Vector4cd diag;
    for (int k = 0; k < 4; ++k) {
        double phase = 0;
        for (int j = 0; j < 3; ++j) phase += w[j] * detail::kMagicSign[j][k];
        diag(k) = std::exp(kI * phase);
    }
    return b * diag.asDiagonal() * b.adjoint();
}

/// U = phase * (k1l (x) k1r) * canonical_gate(coords) * (k2l (x) k2r).
/// The "l" factors act on the more significant qubit (local qubit 1).
struct KakFactors {
    Mat2 k1l, k1r, k2l, k2r;
    WeylCoordinates coords;
    Complex phase{1.0};

    Mat4 k1() const { return kron(k1l, k1r); }
    Mat4 k2() const { return kron(k2l, k2r); }
    Mat4 reconstruct() const { return phase * k1() * canonical_gate(coords) * k2(); }
};

namespace detail {

// Moves coordinates into the Weyl chamber while keeping U = K1 Ud(x) K2 (up to phase).
class Canonicalizer {
  public:
    Canonicalizer(Mat4& k1, Mat4& k2, WeylCoordinates& x) : k1_(k1), k2_(k2), x_(x) {}

    void run() {
        for (int k = 0; k < 3; ++k) reduce(k);
        if (std::abs(x_[0]) < std::abs(x_[1])) exchange(0, 1);
        if (std::abs(x_[1]) < std::abs(x_[2])) exchange(1, 2);
        if (std::abs(x_[0]) < std::abs(x_[1])) exchange(0, 1);
        if (x_[0] < 0 && x_[1] < 0) {
            negate(0, 1);
        } else if (x_[0] < 0) {
            negate(0, 2);
        } else if (x_[1] < 0) {
            negate(1, 2);
        }
        // On the alpha = pi/4 face (a, b, c) ~ (a, b, -c); prefer gamma >= 0.
        if (x_[0] > kPi / 4 - kBoundaryTol && x_[2] < 0) {
            negate(0, 1);
            shift(0, 1);
            negate(1, 2);
        }
    }

  private:
    Mat4& k1_;
    Mat4& k2_;
    WeylCoordinates& x_;

    // x_k += n * pi/2
    void shift(int k, int n) {
        x_[k] += n * (kPi / 2);
        if (n % 2 != 0) k1_ = k1_ * local_pauli_pair(k);
    }

    // into (-pi/4, pi/4]
    void reduce(int k) {
        const int n = static_cast<int>(std::ceil((x_[k] - kPi / 4) / (kPi / 2)));
        if (n != 0) shift(k, -n);
    }

    void negate(int j, int k) {
        const int l = 3 - j - k;
        const Mat4 q = kron(pauli::axis(l), pauli::I());
        x_[j] = -x_[j];
        x_[k] = -x_[k];
        k1_ = k1_ * q;
        k2_ = q * k2_;
    }

    void exchange(int j, int k) {
        const Mat2 s = axis_exchange(j, k);
        const Mat4 ss = kron(s, s);
        std::swap(x_[j], x_[k]);
        k1_ = k1_ * ss.adjoint();
        k2_ = ss * k2_;
    }
};

// Real orthogonal P with P^T m P diagonal, for m complex symmetric unitary.
inline Eigen::Matrix4d simultaneous_real_diagonalizer(const Mat4& m) {
    Rng rng(2020);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        double a = 1.2602066112249388, b = 0.22317849046722027;
        if (attempt > 0) {
            a = normal(rng);
            b = normal(rng);
        }
        Eigen::Matrix4d mix = a * m.real() + b * m.imag();
        mix = 0.5 * (mix + mix.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(mix);
        const Eigen::Matrix4d p = es.eigenvectors();
        const Mat4 pc = p.cast<Complex>();
        Mat4 d = pc.transpose() * m * pc;
        const Mat4 offdiag = d - Mat4(d.diagonal().asDiagonal());
        if (offdiag.cwiseAbs().maxCoeff() < 1e-13) return p;
    }
    throw Error("kak_decompose: failed to diagonalize the magic-basis product");
}

}  // namespace detail

/// Canonical (KAK) decomposition of a two-qubit unitary.
inline KakFactors kak_decompose(const Mat4& u) {
    if (unitarity_error(u) >= 1e-10) throw InvalidArgument("kak_decompose: input is not unitary");
    const Mat4& b = detail::magic_basis();
    const Mat4 su = u / std::pow(u.determinant(), 0.25);
    const Mat4 up = b.adjoint() * su * b;
    const Mat4 m2 = up.transpose() * up;

    Eigen::Matrix4d p = detail::simultaneous_real_diagonalizer(m2);
    if (p.determinant() < 0) p.col(3) *= -1;
    const Mat4 pc = p.cast<Complex>();
    const Eigen::Vector4cd dvals = (pc.transpose() * m2 * pc).diagonal();

    std::array<double, 4> d{};
    for (int k = 0; k < 3; ++k) d[k] = -std::arg(dvals(k)) / 2;
    d[3] = -(d[0] + d[1] + d[2]);

    WeylCoordinates x;
    for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 4; ++k) s += detail::kMagicSign[j][k] * d[k];
        x[j] = -s / 4;
    }
    Eigen::Vector4cd ed;
    for (int k = 0; k < 4; ++k) ed(k) = std::exp(kI * d[k]);
    Mat4 k1 = b * (up * pc * ed.asDiagonal()) * b.adjoint();
    Mat4 k2 = b * pc.transpose() * b.adjoint();

    detail::Canonicalizer(k1, k2, x).run();

    KakFactors f;
    std::tie(f.k1l, f.k1r) = detail::factor_product(k1);
    std::tie(f.k2l, f.k2r) = detail::factor_product(k2);
    f.coords = x;
    const Complex tr = (f.k1() * canonical_gate(x) * f.k2()).adjoint().cwiseProduct(u.transpose()).sum();
    f.phase = tr / std::abs(tr);
    return f;
}

inline WeylCoordinates weyl_of(const Mat4& u) { return kak_decompose(u).coords; }

/// Coordinates of the gate composed with SWAP, canonicalized.
inline WeylCoordinates mirror_coords(const WeylCoordinates& w) {
    const double sign = w.gamma < 0 ? -1.0 : 1.0;
    WeylCoordinates m{kPi / 4 - std::abs(w.gamma), kPi / 4 - w.beta, sign * (w.alpha - kPi / 4)};
    if (m.alpha > kPi / 4 - kBoundaryTol && m.gamma < 0) m.gamma = -m.gamma;
    return m;
}

/// Tr(Ud(wc)^dagger Ud(wt)) in closed form.
inline Complex trace_product(const WeylCoordinates& wc, const WeylCoordinates& wt) {
    const double da = wc.alpha - wt.alpha, db = wc.beta - wt.beta, dg = wc.gamma - wt.gamma;
    return Complex(4 * std::cos(da) * std::cos(db) * std::cos(dg), -4 * std::sin(da) * std::sin(db) * std::sin(dg));
}

/// Average gate fidelity of two canonical gates, (4 + |Tr|^2) / 20.
inline double canonical_fidelity(const WeylCoordinates& wc, const WeylCoordinates& wt) {
    return (4 + std::norm(trace_product(wc, wt))) / 20;
}

}  // namespace qvol
