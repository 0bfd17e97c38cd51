// SPDX-License-Identifier: Apache-2.0
//
// This file is part of mdmp, a multi-dimensional matrix-pencil channel
// estimation and prediction library for wideband planar-array MIMO links.
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

#include "mdmp/unitary.hpp"

#include <cmath>
#include <complex>

#include "mdmp/errors.hpp"

namespace mdmp {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const std::complex<double> kJ{0.0, 1.0};
} // namespace

UnitaryQ::UnitaryQ(std::size_t n) : n_(n) {
    if (n == 0)
        throw DomainError("unitary transform size must be positive");
}

Eigen::MatrixXcd UnitaryQ::adjoint_apply(const Eigen::MatrixXcd &x) const {
    if (static_cast<std::size_t>(x.rows()) != n_)
        throw DimMismatchError("operand rows do not match transform size");
    const Eigen::Index m = static_cast<Eigen::Index>(n_ / 2);
    Eigen::MatrixXcd out(x.rows(), x.cols());
    if (n_ % 2 == 1)
        out.row(m) = x.row(m);
    if (m == 0)
        return out;
    const Eigen::MatrixXcd top = x.topRows(m);
    const Eigen::MatrixXcd bottom_flipped = x.bottomRows(m).colwise().reverse();
    out.topRows(m) = (top + bottom_flipped) * kInvSqrt2;
    out.bottomRows(m) = kJ * kInvSqrt2 * (bottom_flipped - top);
    return out;
}

Eigen::MatrixXcd UnitaryQ::apply(const Eigen::MatrixXcd &x) const {
    if (static_cast<std::size_t>(x.rows()) != n_)
        throw DimMismatchError("operand rows do not match transform size");
    const Eigen::Index m = static_cast<Eigen::Index>(n_ / 2);
    Eigen::MatrixXcd out(x.rows(), x.cols());
    if (n_ % 2 == 1)
        out.row(m) = x.row(m);
    if (m == 0)
        return out;
    const Eigen::MatrixXcd top = x.topRows(m);
    const Eigen::MatrixXcd bottom = x.bottomRows(m);
    out.topRows(m) = (top + kJ * bottom) * kInvSqrt2;
    out.bottomRows(m) =
        ((top - kJ * bottom) * kInvSqrt2).colwise().reverse();
    return out;
}

Eigen::MatrixXcd UnitaryQ::dense() const {
    const Eigen::Index n = static_cast<Eigen::Index>(n_);
    const Eigen::Index m = n / 2;
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
    if (n_ % 2 == 1)
        q(m, m) = 1.0;
    const Eigen::Index right = n - m; // first column of the j-block
    for (Eigen::Index i = 0; i < m; ++i) {
        q(i, i) = kInvSqrt2;
        q(i, right + i) = kJ * kInvSqrt2;
        q(n - 1 - i, i) = kInvSqrt2;
        q(n - 1 - i, right + i) = -kJ * kInvSqrt2;
    }
    return q;
}

Eigen::MatrixXd to_real_pencil(const Eigen::MatrixXcd &g) {
    if (g.rows() == 0 || g.cols() == 0)
        throw DimMismatchError("pencil matrix must be non-empty");
    const UnitaryQ q(static_cast<std::size_t>(g.rows()));
    const Eigen::MatrixXcd b = q.adjoint_apply(g);
    const double sqrt2 = std::sqrt(2.0);
    Eigen::MatrixXd out(g.rows(), 2 * g.cols());
    out.leftCols(g.cols()) = sqrt2 * b.real();
    out.rightCols(g.cols()) = -sqrt2 * b.imag();
    return out;
}

} // namespace mdmp
