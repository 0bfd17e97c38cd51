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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdmp/tensor.hpp"

namespace mdmp {

// Window sizes for the nested block-Hankel (pencil) construction, plus the
// relative singular-value threshold used downstream for path detection.
//   L: horizontal antenna window, R: vertical antenna window,
//   K: frequency window (spectral runs), Q: time window (temporal runs).
struct PencilConfig {
    int L = 0;
    int R = 0;
    int K = 0;
    int Q = 0;
    double gamma1 = 1e-3;
};

enum class PencilMode { frequency, temporal };

// Additive gather map: pencil entry (r, c) reads flat source element
// rows[r] + cols[c]. Lets the builders materialize the matrix without any
// intermediate block copies.
struct IndexMap {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
};

struct FeasibilityReport {
    bool ok = true;
    std::vector<std::string> violations; // one human-readable line each
};

// Evaluates the four rank-feasibility inequalities for a P-path pencil:
//   L·R·(W−1) ≥ P,  L·W·(R−1) ≥ P,  R·W·(L−1) ≥ P,
//   (N_h−L+1)·(N_v−R+1)·(N−W+1) ≥ P,
// where (W, N) is (K, n_fs) in frequency mode and (Q, n_fs) in temporal mode.
FeasibilityReport feasibility_check(const PencilConfig &cfg, int n_h, int n_v,
                                    int n_fs, int n_paths, PencilMode mode);

// Gather map for a rank-3 source with extents (n1, n2, n3) and windows
// (w1, w2, w3) on the respective axes. Rows are indexed by (e, c, l) with
// e ∈ [0,w3) slowest and l ∈ [0,w1) fastest; columns by (g, d, b) with
// g ∈ [0,n3−w3+1) slowest and b ∈ [0,n1−w1+1) fastest. Entry (r, c) then
// equals source[l+b, c+d, e+g].
IndexMap pencil_index_map(std::size_t n1, std::size_t n2, std::size_t n3,
                          int w1, int w2, int w3);

// Three-axis pencil matrix of one channel snapshot with axes
// [ant_h, ant_v, freq], windows (cfg.L, cfg.R, cfg.K). Shape is
// L·R·K × (N_h−L+1)(N_v−R+1)(N_f−K+1). Noise-free inputs with n_paths
// generic paths yield a matrix of numerical rank n_paths.
// Throws InfeasiblePencilError listing every violated window bound or
// feasibility inequality, DimMismatchError on wrong axes.
Eigen::MatrixXcd build_G3_freq(const ComplexTensor &snapshot,
                               const PencilConfig &cfg, int n_paths);

// Same construction over a single-subcarrier slice with axes
// [ant_h, ant_v, time], windows (cfg.L, cfg.R, cfg.Q). The degenerate
// two-sample regime Q = N_s = 2 is accepted (rank is preserved as long as
// path angles are pairwise distinct).
Eigen::MatrixXcd build_G3_time(const ComplexTensor &slice,
                               const PencilConfig &cfg, int n_paths);

// Row permutation that moves one antenna window index to the slowest
// position, so that axis becomes the pencil-shift axis. Returned in gather
// form: out[j] = in[perm[j]], over rows ordered (e, c, l) as above with
// Kdim = K or Q. axis must be Axis::ant_h or Axis::ant_v.
//   ant_h: output order (l, e, c);  ant_v: output order (c, e, l).
std::vector<std::size_t> shuffle_left(Axis axis, int L, int R, int Kdim);

// Source-row indices implementing the leading-row selector for the pencil
// shift along one axis (selector applied after the matching shuffle):
//   which = 1: spectral/temporal axis, keeps (Kdim−1)·R·L rows;
//   which = 2: horizontal axis, keeps (L−1)·Kdim·R rows;
//   which = 3: vertical axis, keeps (R−1)·Kdim·L rows.
// Entry j of the result is the row of the unshuffled pencil that lands in
// row j of the selected block.
std::vector<std::size_t> selection_J(int which, int L, int R, int Kdim);

} // namespace mdmp
