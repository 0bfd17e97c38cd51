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

#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace mdmp {

// Sparse left-Π-real unitary matrix used to turn centro-symmetric complex
// pencils into real ones. For even n = 2m,
//   Q = (1/√2) [[ I_m,  j·I_m ],
//               [ Π_m, −j·Π_m ]]      (Π = anti-identity);
// for odd n = 2m+1 a center row/column with a lone √2·(1/√2) = 1 is inserted.
// Satisfies QᴴQ = I and Ῡ·conj(Q) = Q; applications cost O(n) per column and
// never materialize the matrix.
class UnitaryQ {
  public:
    explicit UnitaryQ(std::size_t n); // throws DomainError if n == 0

    std::size_t size() const { return n_; }

    // Qᴴ · x and Q · x for vectors/matrices (column-wise application).
    Eigen::MatrixXcd adjoint_apply(const Eigen::MatrixXcd &x) const;
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd &x) const;

    // Dense materialization, for tests and small sizes only.
    Eigen::MatrixXcd dense() const;

  private:
    std::size_t n_;
};

inline UnitaryQ unitary_Q(std::size_t n) { return UnitaryQ(n); }

// Real form of a complex pencil matrix G (μ1 × μ2): conjugating the
// forward-backward extension [G : Ῡ·conj(G)·Ῡ] by the structured unitaries,
//   Q_{μ1}ᴴ · [G : Ῡ conj(G) Ῡ] · Q_{2μ2},
// collapses to the exactly-real closed form
//   [ √2·Re(Q_{μ1}ᴴ G) : −√2·Im(Q_{μ1}ᴴ G) ],
// so no imaginary part is ever produced or discarded. The result is
// μ1 × 2μ2 with ‖result‖_F² = 2‖G‖_F², and its singular values are those of
// the extension, preserving the signal-subspace rank.
Eigen::MatrixXd to_real_pencil(const Eigen::MatrixXcd &g);

} // namespace mdmp
