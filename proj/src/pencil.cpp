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

#include "mdmp/pencil.hpp"

#include <sstream>

#include "mdmp/errors.hpp"

namespace mdmp {

namespace {

// Window bounds the builders enforce on top of the path-count inequalities:
// each window must slide (2 ≤ w ≤ n−1). The two-sample temporal regime
// (w = n = 2) is the one sanctioned exception.
void check_window(int w, int n, const char *w_name, const char *n_name,
                  bool allow_two_by_two, std::vector<std::string> &out) {
    if (allow_two_by_two && w == 2 && n == 2)
        return;
    if (w < 2 || w > n - 1) {
        std::ostringstream os;
        os << w_name << " = " << w << " must lie in [2, " << n_name
           << "-1] = [2, " << n - 1 << "]";
        out.push_back(os.str());
    }
}

void check_product(long long value, const std::string &label, int n_paths,
                   std::vector<std::string> &out) {
    if (value < n_paths) {
        std::ostringstream os;
        os << label << " = " << value << " is below the path count "
           << n_paths;
        out.push_back(os.str());
    }
}

Eigen::MatrixXcd build_pencil(const ComplexTensor &slab,
                              const PencilConfig &cfg, int n_paths, int window,
                              PencilMode mode, Axis expect_axis3,
                              const char *w_name, const char *n_name) {
    const AxisSpec &axes = slab.axes();
    if (axes.rank() != 3 || axes.labels[0] != Axis::ant_h ||
        axes.labels[1] != Axis::ant_v || axes.labels[2] != expect_axis3)
        throw DimMismatchError(std::string("expected axes [ant_h, ant_v, ") +
                               axis_name(expect_axis3) + "]");
    if (n_paths < 1)
        throw DomainError("path count must be positive");

    const int n_h = static_cast<int>(axes.sizes[0]);
    const int n_v = static_cast<int>(axes.sizes[1]);
    const int n_3 = static_cast<int>(axes.sizes[2]);

    std::vector<std::string> violations;
    check_window(cfg.L, n_h, "L", "N_h", false, violations);
    check_window(cfg.R, n_v, "R", "N_v", false, violations);
    check_window(window, n_3, w_name, n_name,
                 mode == PencilMode::temporal, violations);
    const FeasibilityReport report =
        feasibility_check(cfg, n_h, n_v, n_3, n_paths, mode);
    violations.insert(violations.end(), report.violations.begin(),
                      report.violations.end());
    if (!violations.empty()) {
        std::string msg = "pencil configuration infeasible:";
        for (const std::string &v : violations)
            msg += "\n  - " + v;
        throw InfeasiblePencilError(msg);
    }

    const IndexMap map =
        pencil_index_map(axes.sizes[0], axes.sizes[1], axes.sizes[2], cfg.L,
                         cfg.R, window);
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(map.rows.size()),
                         static_cast<Eigen::Index>(map.cols.size()));
    const std::complex<double> *src = slab.data().data();
    for (std::size_t c = 0; c < map.cols.size(); ++c) {
        const std::size_t col_off = map.cols[c];
        for (std::size_t r = 0; r < map.rows.size(); ++r)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                src[map.rows[r] + col_off];
    }
    return out;
}

} // namespace

FeasibilityReport feasibility_check(const PencilConfig &cfg, int n_h, int n_v,
                                    int n_fs, int n_paths, PencilMode mode) {
    const long long l = cfg.L;
    const long long r = cfg.R;
    const long long w = (mode == PencilMode::frequency) ? cfg.K : cfg.Q;
    const char *wn = (mode == PencilMode::frequency) ? "K" : "Q";
    const char *nn = (mode == PencilMode::frequency) ? "N_f" : "N_s";

    FeasibilityReport rep;
    check_product(l * r * (w - 1), std::string("L*R*(") + wn + "-1)", n_paths,
                  rep.violations);
    check_product(l * w * (r - 1), std::string("L*") + wn + "*(R-1)", n_paths,
                  rep.violations);
    check_product(r * w * (l - 1), std::string("R*") + wn + "*(L-1)", n_paths,
                  rep.violations);
    check_product(static_cast<long long>(n_h - l + 1) * (n_v - r + 1) *
                      (n_fs - w + 1),
                  std::string("(N_h-L+1)*(N_v-R+1)*(") + nn + "-" + wn + "+1)",
                  n_paths, rep.violations);
    rep.ok = rep.violations.empty();
    return rep;
}

IndexMap pencil_index_map(std::size_t n1, std::size_t n2, std::size_t n3,
                          int w1, int w2, int w3) {
    if (w1 < 1 || w2 < 1 || w3 < 1 || static_cast<std::size_t>(w1) > n1 ||
        static_cast<std::size_t>(w2) > n2 || static_cast<std::size_t>(w3) > n3)
        throw DomainError("pencil windows must satisfy 1 <= w <= extent");

    const std::size_t u1 = static_cast<std::size_t>(w1);
    const std::size_t u2 = static_cast<std::size_t>(w2);
    const std::size_t u3 = static_cast<std::size_t>(w3);
    const std::size_t m1 = n1 - u1 + 1;
    const std::size_t m2 = n2 - u2 + 1;
    const std::size_t m3 = n3 - u3 + 1;

    IndexMap map;
    map.rows.reserve(u1 * u2 * u3);
    for (std::size_t e = 0; e < u3; ++e)
        for (std::size_t c = 0; c < u2; ++c)
            for (std::size_t l = 0; l < u1; ++l)
                map.rows.push_back((l * n2 + c) * n3 + e);
    map.cols.reserve(m1 * m2 * m3);
    for (std::size_t g = 0; g < m3; ++g)
        for (std::size_t d = 0; d < m2; ++d)
            for (std::size_t b = 0; b < m1; ++b)
                map.cols.push_back((b * n2 + d) * n3 + g);
    return map;
}

Eigen::MatrixXcd build_G3_freq(const ComplexTensor &snapshot,
                               const PencilConfig &cfg, int n_paths) {
    return build_pencil(snapshot, cfg, n_paths, cfg.K, PencilMode::frequency,
                        Axis::freq, "K", "N_f");
}

Eigen::MatrixXcd build_G3_time(const ComplexTensor &slice,
                               const PencilConfig &cfg, int n_paths) {
    return build_pencil(slice, cfg, n_paths, cfg.Q, PencilMode::temporal,
                        Axis::time, "Q", "N_s");
}

std::vector<std::size_t> shuffle_left(Axis axis, int L, int R, int Kdim) {
    if (L < 1 || R < 1 || Kdim < 1)
        throw DomainError("shuffle sizes must be positive");
    const std::size_t l_n = static_cast<std::size_t>(L);
    const std::size_t r_n = static_cast<std::size_t>(R);
    const std::size_t k_n = static_cast<std::size_t>(Kdim);

    std::vector<std::size_t> perm;
    perm.reserve(l_n * r_n * k_n);
    if (axis == Axis::ant_h) {
        for (std::size_t l = 0; l < l_n; ++l)
            for (std::size_t e = 0; e < k_n; ++e)
                for (std::size_t c = 0; c < r_n; ++c)
                    perm.push_back(e * r_n * l_n + c * l_n + l);
    } else if (axis == Axis::ant_v) {
        for (std::size_t c = 0; c < r_n; ++c)
            for (std::size_t e = 0; e < k_n; ++e)
                for (std::size_t l = 0; l < l_n; ++l)
                    perm.push_back(e * r_n * l_n + c * l_n + l);
    } else {
        throw DomainError("shuffle axis must be ant_h or ant_v");
    }
    return perm;
}

std::vector<std::size_t> selection_J(int which, int L, int R, int Kdim) {
    if (L < 1 || R < 1 || Kdim < 1)
        throw DomainError("selector sizes must be positive");
    const std::size_t l_n = static_cast<std::size_t>(L);
    const std::size_t r_n = static_cast<std::size_t>(R);
    const std::size_t k_n = static_cast<std::size_t>(Kdim);

    if (which == 1) {
        // Rows (e, c, l) with e < Kdim-1 are already contiguous and leading.
        std::vector<std::size_t> keep((k_n - 1) * r_n * l_n);
        for (std::size_t j = 0; j < keep.size(); ++j)
            keep[j] = j;
        return keep;
    }
    if (which == 2) {
        std::vector<std::size_t> perm = shuffle_left(Axis::ant_h, L, R, Kdim);
        perm.resize((l_n - 1) * k_n * r_n);
        return perm;
    }
    if (which == 3) {
        std::vector<std::size_t> perm = shuffle_left(Axis::ant_v, L, R, Kdim);
        perm.resize((r_n - 1) * k_n * l_n);
        return perm;
    }
    throw DomainError("selector kind must be 1, 2 or 3");
}

} // namespace mdmp
