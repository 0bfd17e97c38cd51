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
#include <utility>
#include <vector>

#include "mdmp/channel.hpp"
#include "mdmp/tensor.hpp"

namespace mdmp {

// One-to-one matching between two estimate sets. perm[p] is the index into
// the second (angle-Doppler) list assigned to path p of the first
// (angle-delay) list; cost is the total |Δθ|+|Δφ| of the matching, radians.
struct PairingResult {
    std::vector<int> perm;
    double cost = 0.0;
};

// Matches the two runs' paths by departure angles. Tries the cheap per-row
// nearest-neighbour rule first and falls back to the globally optimal
// assignment when that rule collides. Raises AmbiguousPairingError when a
// collision occurred and the optimal matching's mean per-path cost is at
// least half the smallest pairwise angular separation within the first list
// (the two runs then cannot be associated reliably).
PairingResult pair_paths(
    const std::vector<std::pair<double, double>> &angles_delay_run,
    const std::vector<std::pair<double, double>> &angles_doppler_run);

// Undoes the delay-drift contamination of the temporal eigenvalues:
//   ω̂_p = ω̂_τ[perm[p]] + f1·k̂_τ[p],
// returned in the angle-delay run's path order.
std::vector<double> correct_doppler(const std::vector<double> &omega_tau_hz,
                                    const PairingResult &pairing,
                                    const std::vector<double> &k_tau,
                                    double first_subcarrier_hz);

// Fully paired per-path parameter set, ready for gain estimation and
// prediction. tau_ref_s is the delay at reference_s; the delay at any other
// time is tau_ref_s + k_tau·(t − reference_s).
struct PathEstimate {
    double theta_rad = 0.0;
    double phi_rad = 0.0;
    double tau_ref_s = 0.0;
    double k_tau = 0.0;
    double omega_hz = 0.0;
    std::complex<double> gain{0.0, 0.0};
};

struct EstimateSet {
    std::vector<PathEstimate> paths;
    double reference_s = 0.0;      // timestamp tau_ref_s refers to
    double offdiag_residual = 0.0; // worst joint-diagonalization residual
    double subspace_gap = 0.0;     // σ_{P̂+1}/σ_{P̂} of the detection run

    int n_paths() const { return static_cast<int>(paths.size()); }
};

// One observed snapshot with its timestamp, for gain fitting.
struct TimedSnapshot {
    const ComplexTensor *snapshot = nullptr;
    double t_s = 0.0;
};

// Least-squares complex gains: minimizes ‖vec(samples) − M·g‖₂ where column
// p of M is the unit-gain model response of path p at every (antenna,
// subcarrier, time) of the provided samples. When the stacked system would
// exceed the row budget, only every 4th subcarrier enters the fit (all
// antennas and times are kept). Raises RankDeficientError when two paths are
// numerically collinear over the sample set.
std::vector<std::complex<double>> estimate_gains(
    const std::vector<TimedSnapshot> &samples, const EstimateSet &estimates,
    const ArrayGeometry &geom, const SamplingGrid &grid);

// Channel reconstruction at an arbitrary time from a gained estimate set,
// axes [ant_h, ant_v, freq]. The target time need not align with any
// sampling instant. Raises WindowViolationError when any predicted delay
// τ̂_p(t_target) leaves the unambiguous window (−1/(2Δf), 1/(2Δf)).
ComplexTensor predict_channel(const EstimateSet &estimates,
                              const ArrayGeometry &geom,
                              const SamplingGrid &grid, double t_target_s);

// The no-prediction comparator: the last observed snapshot, unchanged.
ComplexTensor stale_csi_baseline(const ComplexTensor &last_sample);

} // namespace mdmp
