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

#include "mdmp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mdmp/errors.hpp"
#include "mdmp/matching.hpp"
#include "mdmp/unitary.hpp"

namespace mdmp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRankGate = 1e-10;       // relative smallest singular value
constexpr double kEigImagGate = 1e-8;     // |Im λ| vs |λ|
constexpr double kSaturationGate = 1e12;  // |z| beyond which decode saturates

// Least-squares solve A·X = B with an explicit rank gate.
Eigen::MatrixXd solve_rank_gated(const Eigen::MatrixXd &a,
                                 const Eigen::MatrixXd &b) {
    if (a.rows() < a.cols())
        throw RankDeficientError(
            "shift system has fewer equations than unknowns");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd &sv = svd.singularValues();
    if (sv(0) == 0.0 || sv(sv.size() - 1) < kRankGate * sv(0))
        throw RankDeficientError(
            "shift system is numerically rank-deficient");
    return svd.solve(b);
}

// One frequency-domain run on a single snapshot: subspace, the three shift
// matrices, joint diagonalization, decoding. Paths come out in ascending
// delay-eigenvalue order.
struct FreqRun {
    std::vector<double> tau_s;
    std::vector<double> theta_rad;
    std::vector<double> phi_rad;
    double offdiag = 0.0;
    double gap = 0.0;
    bool saturated = false;
    int n_paths = 0;
};

FreqRun run_frequency(const ComplexTensor &snapshot, const ArrayGeometry &geom,
                      const SamplingGrid &grid, const PencilConfig &cfg) {
    const Eigen::MatrixXcd g = build_G3_freq(snapshot, cfg, 1);
    const Eigen::MatrixXd re = to_real_pencil(g);
    const SubspaceBundle bundle = signal_subspace(re, cfg.gamma1);
    const int n_paths = bundle.n_paths;

    const FeasibilityReport rep = feasibility_check(
        cfg, static_cast<int>(snapshot.dim(0)),
        static_cast<int>(snapshot.dim(1)), static_cast<int>(snapshot.dim(2)),
        n_paths, PencilMode::frequency);
    if (!rep.ok) {
        std::string msg = "detected path count exceeds pencil capacity:";
        for (const std::string &v : rep.violations)
            msg += "\n  - " + v;
        throw InfeasiblePencilError(msg);
    }

    const Eigen::MatrixXd psi_tau =
        psi_matrix(bundle.u_s, selection_J(1, cfg.L, cfg.R, cfg.K));
    // The antenna-axis shifts produce eigenvalues of opposite sign to the
    // tangent the angle decoders expect; flip them here, once.
    const Eigen::MatrixXd psi_phi =
        -psi_matrix(bundle.u_s, selection_J(2, cfg.L, cfg.R, cfg.K));
    const Eigen::MatrixXd psi_theta =
        -psi_matrix(bundle.u_s, selection_J(3, cfg.L, cfg.R, cfg.K));

    const EigenSolution sol =
        joint_diagonalize(psi_tau, {psi_theta, psi_phi});

    FreqRun run;
    run.n_paths = n_paths;
    run.offdiag = sol.offdiag_residual;
    if (bundle.singular_values.size() > n_paths)
        run.gap = bundle.singular_values(n_paths) /
                  bundle.singular_values(n_paths - 1);
    for (int p = 0; p < n_paths; ++p) {
        const DelayDecode d =
            decode_delay(sol.z_primary[static_cast<std::size_t>(p)],
                         grid.subcarrier_spacing_hz);
        run.saturated = run.saturated || d.saturated;
        run.tau_s.push_back(d.delay_s);
        const auto [theta, phi] =
            decode_angles(sol.z_secondary[0][static_cast<std::size_t>(p)],
                          sol.z_secondary[1][static_cast<std::size_t>(p)],
                          geom);
        run.theta_rad.push_back(theta);
        run.phi_rad.push_back(phi);
    }
    return run;
}

void check_snapshot_dims(const ComplexTensor &snapshot,
                         const ArrayGeometry &geom, const SamplingGrid &grid) {
    if (snapshot.dim(0) != static_cast<std::size_t>(geom.n_h) ||
        snapshot.dim(1) != static_cast<std::size_t>(geom.n_v))
        throw DimMismatchError("snapshot antenna extents do not match geometry");
    if (snapshot.dim(2) != static_cast<std::size_t>(grid.n_subcarriers))
        throw DimMismatchError("snapshot frequency extent does not match grid");
}

} // namespace

int detect_paths(const Eigen::VectorXd &singular_values, double gamma1) {
    if (singular_values.size() == 0)
        throw DomainError("singular value list is empty");
    if (!(gamma1 > 0.0) || gamma1 > 1.0)
        throw DomainError("detection threshold must lie in (0, 1]");
    for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
        const double s = singular_values(i);
        if (!(s >= 0.0))
            throw DomainError("singular values must be non-negative");
        if (i > 0 && s > singular_values(i - 1))
            throw DomainError("singular values must be non-increasing");
    }
    const double s1 = singular_values(0);
    if (s1 == 0.0)
        throw AllZeroError("all singular values are zero");
    int count = 0;
    for (Eigen::Index i = 0; i < singular_values.size(); ++i)
        if (singular_values(i) >= gamma1 * s1)
            ++count;
    return count;
}

SubspaceBundle signal_subspace(const Eigen::MatrixXd &real_pencil,
                               double gamma1) {
    if (real_pencil.rows() == 0 || real_pencil.cols() == 0)
        throw DimMismatchError("pencil matrix must be non-empty");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(real_pencil, Eigen::ComputeThinU);
    SubspaceBundle bundle;
    bundle.singular_values = svd.singularValues();
    bundle.n_paths = detect_paths(bundle.singular_values, gamma1);
    bundle.u_s = svd.matrixU().leftCols(bundle.n_paths);
    return bundle;
}

SubspaceBundle signal_subspace_fixed(const Eigen::MatrixXd &real_pencil,
                                     int n_paths) {
    if (real_pencil.rows() == 0 || real_pencil.cols() == 0)
        throw DimMismatchError("pencil matrix must be non-empty");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(real_pencil, Eigen::ComputeThinU);
    if (n_paths < 1 || n_paths > svd.singularValues().size())
        throw DomainError("fixed path count outside the available spectrum");
    if (svd.singularValues()(0) == 0.0)
        throw AllZeroError("all singular values are zero");
    if (svd.singularValues()(n_paths - 1) <
        kRankGate * svd.singularValues()(0))
        throw RankDeficientError(
            "requested path count exceeds the numerical rank of the pencil");
    SubspaceBundle bundle;
    bundle.singular_values = svd.singularValues();
    bundle.n_paths = n_paths;
    bundle.u_s = svd.matrixU().leftCols(n_paths);
    return bundle;
}

Eigen::MatrixXd psi_matrix(const Eigen::MatrixXd &u_s,
                           const std::vector<std::size_t> &selector) {
    if (u_s.rows() == 0 || u_s.cols() == 0)
        throw DimMismatchError("subspace basis must be non-empty");
    if (selector.empty())
        throw RankDeficientError("selector keeps no rows: no shift aperture");
    const std::size_t mu1 = static_cast<std::size_t>(u_s.rows());
    for (std::size_t idx : selector)
        if (idx >= mu1)
            throw DimMismatchError("selector row index out of range");

    const UnitaryQ q_full(mu1);
    const Eigen::MatrixXcd v =
        q_full.apply(u_s.cast<std::complex<double>>());
    Eigen::MatrixXcd picked(static_cast<Eigen::Index>(selector.size()),
                            u_s.cols());
    for (std::size_t j = 0; j < selector.size(); ++j)
        picked.row(static_cast<Eigen::Index>(j)) =
            v.row(static_cast<Eigen::Index>(selector[j]));
    const Eigen::MatrixXcd x = UnitaryQ(selector.size()).adjoint_apply(picked);
    return solve_rank_gated(x.real(), x.imag());
}

EigenSolution joint_diagonalize(
    const Eigen::MatrixXd &psi_primary,
    const std::vector<Eigen::MatrixXd> &psi_secondary) {
    const Eigen::Index n = psi_primary.rows();
    if (n == 0 || psi_primary.cols() != n)
        throw DimMismatchError("primary matrix must be square and non-empty");
    for (const Eigen::MatrixXd &s : psi_secondary)
        if (s.rows() != n || s.cols() != n)
            throw DimMismatchError("secondary matrix size mismatch");

    Eigen::EigenSolver<Eigen::MatrixXd> es(psi_primary);
    if (es.info() != Eigen::Success)
        throw ComplexEigenvaluesError("eigendecomposition did not converge");
    const Eigen::VectorXcd lambda = es.eigenvalues();
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(lambda(i).imag()) > kEigImagGate * std::abs(lambda(i)))
            throw ComplexEigenvaluesError(
                "primary shift matrix has complex eigenvalues");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&lambda](Eigen::Index a, Eigen::Index b) {
                         return lambda(a).real() < lambda(b).real();
                     });

    EigenSolution sol;
    sol.w.resize(n, n);
    sol.z_primary.resize(static_cast<std::size_t>(n));
    const Eigen::MatrixXcd vec = es.eigenvectors();
    for (Eigen::Index i = 0; i < n; ++i) {
        sol.z_primary[static_cast<std::size_t>(i)] =
            lambda(order[static_cast<std::size_t>(i)]).real();
        sol.w.col(i) = vec.col(order[static_cast<std::size_t>(i)]).real();
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sol.w);
    if (!lu.isInvertible())
        throw RankDeficientError("shared eigenvector matrix is singular");

    for (const Eigen::MatrixXd &s : psi_secondary) {
        const Eigen::MatrixXd m = lu.solve(s * sol.w);
        std::vector<double> z(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            z[static_cast<std::size_t>(i)] = m(i, i);
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j)
                    sol.offdiag_residual =
                        std::max(sol.offdiag_residual, std::abs(m(i, j)));
        }
        sol.z_secondary.push_back(std::move(z));
    }
    return sol;
}

DelayDecode decode_delay(double z, double subcarrier_spacing_hz) {
    if (!(subcarrier_spacing_hz > 0.0))
        throw DomainError("subcarrier spacing must be positive");
    if (std::isnan(z))
        throw NonFiniteError("delay eigenvalue is NaN");
    DelayDecode out;
    if (std::abs(z) > kSaturationGate) {
        out.saturated = true;
        out.delay_s = std::copysign(0.5 / subcarrier_spacing_hz, z);
    } else {
        out.delay_s = std::atan(z) / (kPi * subcarrier_spacing_hz);
    }
    return out;
}

std::pair<double, double> decode_angles(double z_theta, double z_phi,
                                        const ArrayGeometry &geom) {
    geom.validate();
    if (!(geom.spacing_v_m > 0.0) || !(geom.spacing_h_m > 0.0))
        throw DomainError("angle decoding needs positive element spacings");
    if (std::isnan(z_theta) || std::isnan(z_phi))
        throw NonFiniteError("angle eigenvalue is NaN");
    const double lambda = geom.wavelength_m();

    const double sin_theta =
        std::atan(z_theta) * lambda / (kPi * geom.spacing_v_m);
    if (!(std::abs(sin_theta) <= 1.0 + 1e-9))
        throw DomainError("vertical shift decodes outside |sin| <= 1");
    const double theta = std::asin(std::clamp(sin_theta, -1.0, 1.0));

    const double sin_phi = std::atan(z_phi) * lambda /
                           (kPi * geom.spacing_h_m * std::cos(theta));
    if (!(std::abs(sin_phi) <= 1.0 + 1e-9))
        throw DomainError("horizontal shift decodes outside |sin| <= 1");
    const double phi = std::asin(std::clamp(sin_phi, -1.0, 1.0));
    return {theta, phi};
}

double decode_doppler(double z, double sample_interval_s) {
    if (!(sample_interval_s > 0.0))
        throw DomainError("sample interval must be positive");
    if (std::isnan(z))
        throw NonFiniteError("temporal eigenvalue is NaN");
    return -std::atan(z) / (kPi * sample_interval_s);
}

AngleDelayEstimates estimate_angle_delay(const ComplexTensor &snapshot_t1,
                                         const ComplexTensor &snapshot_t2,
                                         double t1_s, double t2_s,
                                         const ArrayGeometry &geom,
                                         const SamplingGrid &grid,
                                         const PencilConfig &cfg) {
    geom.validate();
    grid.validate();
    check_snapshot_dims(snapshot_t1, geom, grid);
    check_snapshot_dims(snapshot_t2, geom, grid);
    if (!std::isfinite(t1_s) || !std::isfinite(t2_s))
        throw NonFiniteError("snapshot timestamps must be finite");
    if (t1_s == t2_s)
        throw DomainError("snapshots must carry distinct timestamps");

    const FreqRun a = run_frequency(snapshot_t1, geom, grid, cfg);
    const FreqRun b = run_frequency(snapshot_t2, geom, grid, cfg);
    if (a.n_paths != b.n_paths)
        throw PathCountMismatchError(
            "snapshots detect different path counts: " +
            std::to_string(a.n_paths) + " vs " + std::to_string(b.n_paths));
    const int n = a.n_paths;

    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost(i, j) = std::abs(a.theta_rad[static_cast<std::size_t>(i)] -
                                  b.theta_rad[static_cast<std::size_t>(j)]) +
                         std::abs(a.phi_rad[static_cast<std::size_t>(i)] -
                                  b.phi_rad[static_cast<std::size_t>(j)]);
    const std::vector<int> sigma = min_cost_assignment(cost);

    AngleDelayEstimates out;
    out.t1_s = t1_s;
    out.t2_s = t2_s;
    out.offdiag_residual = std::max(a.offdiag, b.offdiag);
    out.subspace_gap = a.gap;
    out.delay_saturated = a.saturated || b.saturated;
    for (int i = 0; i < n; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const std::size_t jj = static_cast<std::size_t>(sigma[ii]);
        out.theta_rad.push_back(a.theta_rad[ii]);
        out.phi_rad.push_back(a.phi_rad[ii]);
        out.tau_t1_s.push_back(a.tau_s[ii]);
        out.tau_t2_s.push_back(b.tau_s[jj]);
        out.k_tau.push_back((b.tau_s[jj] - a.tau_s[ii]) / (t2_s - t1_s));
    }
    return out;
}

AngleDopplerEstimates estimate_angle_doppler(
    const ComplexTensor &slice, const std::vector<double> &sample_times_s,
    const ArrayGeometry &geom, const PencilConfig &cfg, int n_paths) {
    geom.validate();
    if (slice.rank() != 3 || slice.axes().labels[2] != Axis::time)
        throw DimMismatchError("expected a [ant_h, ant_v, time] slice");
    if (slice.dim(0) != static_cast<std::size_t>(geom.n_h) ||
        slice.dim(1) != static_cast<std::size_t>(geom.n_v))
        throw DimMismatchError("slice antenna extents do not match geometry");
    if (sample_times_s.size() != slice.dim(2))
        throw DimMismatchError("timestamp count does not match time extent");
    if (sample_times_s.size() < 2)
        throw DomainError("temporal estimation needs at least two samples");
    if (n_paths < 1)
        throw DomainError("path count must be positive");

    const std::size_t n_s = sample_times_s.size();
    const double span = sample_times_s.back() - sample_times_s.front();
    const double mean_gap = span / static_cast<double>(n_s - 1);
    if (!(mean_gap > 0.0))
        throw DomainError("sample times must be increasing");
    for (std::size_t i = 1; i < n_s; ++i) {
        const double gap = sample_times_s[i] - sample_times_s[i - 1];
        if (std::abs(gap - mean_gap) > 1e-9 * mean_gap)
            throw DomainError("sample times must be uniformly spaced");
    }

    const Eigen::MatrixXcd g = build_G3_time(slice, cfg, n_paths);
    const Eigen::MatrixXd re = to_real_pencil(g);
    const SubspaceBundle bundle = signal_subspace_fixed(re, n_paths);

    const Eigen::MatrixXd psi_omega =
        psi_matrix(bundle.u_s, selection_J(1, cfg.L, cfg.R, cfg.Q));
    // Same antenna-axis sign flip as in the frequency run.
    const Eigen::MatrixXd psi_phi =
        -psi_matrix(bundle.u_s, selection_J(2, cfg.L, cfg.R, cfg.Q));
    const Eigen::MatrixXd psi_theta =
        -psi_matrix(bundle.u_s, selection_J(3, cfg.L, cfg.R, cfg.Q));
    const EigenSolution sol =
        joint_diagonalize(psi_omega, {psi_theta, psi_phi});

    AngleDopplerEstimates out;
    out.sample_spacing_s = mean_gap;
    out.offdiag_residual = sol.offdiag_residual;
    for (int p = 0; p < n_paths; ++p) {
        const std::size_t pp = static_cast<std::size_t>(p);
        out.omega_tau_hz.push_back(decode_doppler(sol.z_primary[pp], mean_gap));
        const auto [theta, phi] = decode_angles(sol.z_secondary[0][pp],
                                                sol.z_secondary[1][pp], geom);
        out.theta_rad.push_back(theta);
        out.phi_rad.push_back(phi);
    }
    return out;
}

} // namespace mdmp
