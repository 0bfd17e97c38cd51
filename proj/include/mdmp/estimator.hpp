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

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mdmp/channel.hpp"
#include "mdmp/pencil.hpp"
#include "mdmp/tensor.hpp"

namespace mdmp {

// Dominant left singular subspace of a real pencil matrix.
struct SubspaceBundle {
    Eigen::MatrixXd u_s;             // basis, one column per detected path
    Eigen::VectorXd singular_values; // full non-increasing list
    int n_paths = 0;
};

// Output of the joint diagonalization: the primary matrix's eigensystem and
// the secondary matrices' diagonals in the primary's (ascending-eigenvalue)
// path order.
struct EigenSolution {
    Eigen::MatrixXd w; // eigenvectors of the primary matrix, column-permuted
    std::vector<double> z_primary;
    std::vector<std::vector<double>> z_secondary;
    double offdiag_residual = 0.0; // max |off-diagonal| over all secondaries
};

// Number of dominant singular values: count of s_m >= gamma1 * s_1.
// The list must be non-increasing and non-negative; throws AllZeroError when
// s_1 == 0 and DomainError on malformed input.
int detect_paths(const Eigen::VectorXd &singular_values, double gamma1);

// Thin SVD of the real pencil plus thresholded path detection (or a caller-
// fixed path count, for runs where it is already known). The fixed variant
// raises RankDeficientError when σ_{P̂}/σ_1 < 1e−10: the matrix does not
// actually carry that many signal dimensions.
SubspaceBundle signal_subspace(const Eigen::MatrixXd &real_pencil,
                               double gamma1);
SubspaceBundle signal_subspace_fixed(const Eigen::MatrixXd &real_pencil,
                                     int n_paths);

// Shift-invariance equation solve for one pencil axis. selector is the
// selection_J output for that axis (it already encodes any row shuffle);
// u_s is the real subspace basis with L·R·Kdim rows. Computes
//   X = Q_subᴴ · (rows selector of (Q_{μ1} · u_s)),   which is such that
//   Re(X)·Ψ = Im(X),
// and returns the least-squares Ψ. Throws RankDeficientError when Re(X) is
// numerically rank-deficient (σ_min/σ_max < 1e−10) — coincident paths or
// insufficient aperture.
Eigen::MatrixXd psi_matrix(const Eigen::MatrixXd &u_s,
                           const std::vector<std::size_t> &selector);

// Eigendecomposition of the primary matrix; secondaries are conjugated by
// the primary's eigenvectors and their diagonals read off. Eigenvalues must
// be real (|Im λ| ≤ 1e−8·|λ|), else ComplexEigenvaluesError; a singular
// eigenvector matrix raises RankDeficientError.
EigenSolution joint_diagonalize(
    const Eigen::MatrixXd &psi_primary,
    const std::vector<Eigen::MatrixXd> &psi_secondary);

// --- eigenvalue decoders ---------------------------------------------------

struct DelayDecode {
    double delay_s = 0.0;
    bool saturated = false; // |z| exceeded 1e12; clamped to the window edge
};

// τ = arctan(z)/(π·Δf), in (−1/(2Δf), 1/(2Δf)).
DelayDecode decode_delay(double z, double subcarrier_spacing_hz);

// θ = asin(arctan(z_θ)·λ/(π·d_v)); φ = asin(arctan(z_φ)·λ/(π·d_h·cosθ)).
// Arguments beyond unit magnitude by more than 1e−9 raise DomainError;
// within that tolerance they are clipped.
std::pair<double, double> decode_angles(double z_theta, double z_phi,
                                        const ArrayGeometry &geom);

// Effective Doppler ω_τ = −arctan(z)/(π·T), in (−1/(2T), 1/(2T)). This is
// the composite ω − f1·k_τ seen on one subcarrier, not the raw Doppler.
double decode_doppler(double z, double sample_interval_s);

// --- estimation runs --------------------------------------------------------

// Output of the two-snapshot angle/delay run. Entries are aligned across all
// vectors; path order is the first snapshot's ascending-delay-eigenvalue
// order. The second snapshot's paths are matched to the first by nearest
// angles before the drift rate k_tau = (τ(t2) − τ(t1))/(t2 − t1) is formed.
struct AngleDelayEstimates {
    std::vector<double> theta_rad;
    std::vector<double> phi_rad;
    std::vector<double> tau_t1_s;
    std::vector<double> tau_t2_s;
    std::vector<double> k_tau;
    double t1_s = 0.0;
    double t2_s = 0.0;
    double offdiag_residual = 0.0; // worst across both snapshots
    double subspace_gap = 0.0;     // σ_{P̂+1}/σ_{P̂} of the first snapshot
    bool delay_saturated = false;

    int n_paths() const { return static_cast<int>(theta_rad.size()); }
};

// Two-snapshot estimation of angles, delays and the delay drift rate.
// Snapshots must share axes [ant_h, ant_v, freq] and have distinct
// timestamps (arbitrary reals). The path count is detected independently on
// each snapshot with cfg.gamma1; a disagreement raises
// PathCountMismatchError. Propagates RankDeficientError /
// ComplexEigenvaluesError from degenerate inputs.
AngleDelayEstimates estimate_angle_delay(const ComplexTensor &snapshot_t1,
                                         const ComplexTensor &snapshot_t2,
                                         double t1_s, double t2_s,
                                         const ArrayGeometry &geom,
                                         const SamplingGrid &grid,
                                         const PencilConfig &cfg);

// Output of the single-subcarrier temporal run, in that run's own
// ascending-eigenvalue order (association with the angle/delay run is done
// later by angle matching).
struct AngleDopplerEstimates {
    std::vector<double> theta_rad;
    std::vector<double> phi_rad;
    std::vector<double> omega_tau_hz; // composite ω − f1·k_τ per path
    double sample_spacing_s = 0.0;
    double offdiag_residual = 0.0;

    int n_paths() const { return static_cast<int>(theta_rad.size()); }
};

// Temporal estimation over a [ant_h, ant_v, time] slice taken at the first
// subcarrier. sample_times_s must match the slice's time extent and be
// uniformly spaced to 1e−9 relative (the mean gap becomes the decode
// interval). The path count is fixed by the caller (from the angle/delay
// run); no re-detection happens here.
AngleDopplerEstimates estimate_angle_doppler(
    const ComplexTensor &slice, const std::vector<double> &sample_times_s,
    const ArrayGeometry &geom, const PencilConfig &cfg, int n_paths);

} // namespace mdmp
