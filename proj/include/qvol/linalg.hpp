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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace qvol {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

namespace pauli {
inline Mat2 I() { return Mat2::Identity(); }
inline Mat2 X() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}
inline Mat2 Y() {
    Mat2 m;
    m << 0, -kI, kI, 0;
    return m;
}
inline Mat2 Z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}
/// Pauli by axis index: 0 -> X, 1 -> Y, 2 -> Z.
inline Mat2 axis(int k) { return k == 0 ? X() : (k == 1 ? Y() : Z()); }
}  // namespace pauli

/// Kronecker product. The left factor acts on the more significant qubit.
inline Mat4 kron(const Mat2& hi, const Mat2& lo) {
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = hi(i, j) * lo;
    return out;
}

inline MatX kron(const MatX& hi, const MatX& lo) {
    MatX out(hi.rows() * lo.rows(), hi.cols() * lo.cols());
    for (Eigen::Index i = 0; i < hi.rows(); ++i)
        for (Eigen::Index j = 0; j < hi.cols(); ++j)
            out.block(i * lo.rows(), j * lo.cols(), lo.rows(), lo.cols()) = hi(i, j) * lo;
    return out;
}

/// exp(-i theta P / 2)
inline Mat2 rotation(const Mat2& p, double theta) {
    return std::cos(theta / 2) * Mat2::Identity() - kI * std::sin(theta / 2) * p;
}
inline Mat2 rz(double theta) { return rotation(pauli::Z(), theta); }
inline Mat2 rx(double theta) { return rotation(pauli::X(), theta); }
inline Mat2 ry(double theta) { return rotation(pauli::Y(), theta); }

/// max |(U^dagger U - I)_ij|
template <typename Derived>
double unitarity_error(const Eigen::MatrixBase<Derived>& u) {
    const auto n = u.rows();
    return (u.adjoint() * u - MatX::Identity(n, n)).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = 1e-12) {
    return u.rows() == u.cols() && unitarity_error(u) < tol;
}

/// Average gate fidelity between two d-dimensional unitaries,
/// (|Tr(U^dagger V)|^2 / d + 1) / (d + 1). Insensitive to global phase.
template <typename A, typename B>
double avg_fidelity(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
    const double d = static_cast<double>(u.rows());
    const double t = std::norm((u.adjoint() * v).trace());
    return (t / d + 1.0) / (d + 1.0);
}

/// Phase-insensitive closeness: smallest max-norm distance between u and e^{i phi} v.
template <typename A, typename B>
double phase_distance(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
    const Complex tr = (v.adjoint() * u).trace();
    const Complex phase = std::abs(tr) > 0 ? tr / std::abs(tr) : Complex{1.0};
    return (u - phase * v).cwiseAbs().maxCoeff();
}

}  // namespace qvol
