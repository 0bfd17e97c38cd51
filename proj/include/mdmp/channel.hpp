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
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mdmp/tensor.hpp"

namespace mdmp {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

// Uniform planar array at the transmitter. Elements are indexed horizontally
// (columns, count n_h) and vertically (rows, count n_v); the flat element
// index runs vertical-fastest: i = h * n_v + v.
struct ArrayGeometry {
    int n_h = 1;
    int n_v = 1;
    double spacing_h_m = 0.0;
    double spacing_v_m = 0.0;
    double carrier_hz = 0.0;

    int element_count() const { return n_h * n_v; }
    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    std::size_t flat_index(int h, int v) const {
        return static_cast<std::size_t>(h) * static_cast<std::size_t>(n_v) +
               static_cast<std::size_t>(v);
    }
    void validate() const; // throws DimMismatchError / DomainError
};

// OFDM-style sampling grid: subcarrier n (0-based) sits at
// f_n = first_subcarrier_hz + n * subcarrier_spacing_hz, and snapshots are
// taken at the listed timestamps. sample_interval_s is the nominal slot
// length; the timestamp list itself is authoritative and may be irregular.
struct SamplingGrid {
    double first_subcarrier_hz = 0.0;
    double subcarrier_spacing_hz = 0.0;
    int n_subcarriers = 0;
    double sample_interval_s = 0.0;
    std::vector<double> sample_times_s;

    double subcarrier_hz(int n) const {
        return first_subcarrier_hz + subcarrier_spacing_hz * n;
    }
    int n_samples() const { return static_cast<int>(sample_times_s.size()); }
    void validate() const; // throws DomainError
};

std::vector<double> uniform_sample_times(double start_s, double interval_s,
                                         int count);

// One propagation path. The receive-side array response and the bulk complex
// amplitude are lumped into `gain`; the delay drifts linearly,
// tau(t) = delay0_s + delay_rate * t, with delay_rate = -doppler_hz/carrier.
struct PathTruth {
    double theta_rad = 0.0;  // departure elevation
    double phi_rad = 0.0;    // departure azimuth
    double delay0_s = 0.0;   // delay at t = 0
    double delay_rate = 0.0; // d tau / dt (dimensionless)
    double doppler_hz = 0.0;
    std::complex<double> gain{1.0, 0.0};
};

// Receiver motion: speed plus direction of travel, and optionally the
// per-path arrival directions (elevation, azimuth) seen at the receiver.
// When `arrival_rad` is empty every path is treated as arriving along the
// direction of travel.
struct VelocitySpec {
    double speed_mps = 0.0;
    double elevation_rad = 0.0;
    double azimuth_rad = 0.0;
    std::vector<std::pair<double, double>> arrival_rad;
};

struct DopplerPair {
    double doppler_hz;
    double delay_rate;
};

// Transmit steering vector of the planar array for a departure direction.
// Entry h*n_v + v equals a_h^h * a_v^v with
//   a_h = exp(j 2π spacing_h cosθ sinφ / λ),  a_v = exp(j 2π spacing_v sinθ / λ).
Eigen::VectorXcd steering_vector(const ArrayGeometry &geom, double theta_rad,
                                 double phi_rad);

// Doppler shift of one path from the mobile's velocity, and the induced
// delay drift rate k = -ω / f_c.
DopplerPair doppler_from_velocity(const VelocitySpec &velocity,
                                  std::size_t path_index, double carrier_hz);

// tau(t) for a single path.
double path_delay_at(const PathTruth &path, double t_s);

// Channel matrix at one instant, axes [ant_h, ant_v, freq]:
//   H[i, n] = Σ_p gain_p · steer_p[i] · e^{j 2π ω_p t} · e^{-j 2π f_n τ_p(t)}.
ComplexTensor channel_snapshot(const ArrayGeometry &geom,
                               const SamplingGrid &grid,
                               const std::vector<PathTruth> &paths, double t_s);

// Stack of snapshots at grid.sample_times_s, axes [ant_h, ant_v, freq, time].
// Enforces the identifiability windows (delay, effective Doppler, angular
// phase steps) over the generated span; see validate_identifiable.
ComplexTensor channel_trajectory(const ArrayGeometry &geom,
                                 const SamplingGrid &grid,
                                 const std::vector<PathTruth> &paths);

// Checks that every path stays inside the unambiguous estimation windows:
// |τ_p(t)| < 1/(2Δf) at all sample times, |ω_p − f1·k_p| < 1/(2·spacing) for
// the mean sample spacing, and both angular phase steps within (−π, π).
// Throws WindowViolationError naming the first violation.
void validate_identifiable(const ArrayGeometry &geom, const SamplingGrid &grid,
                           const std::vector<PathTruth> &paths);

// Adds circularly-symmetric white Gaussian noise at the requested per-element
// SNR (dB, relative to the mean element energy). +infinity returns a copy.
ComplexTensor add_awgn(const ComplexTensor &tensor, double snr_db,
                       std::uint64_t seed);

// Slicing helpers for [ant_h, ant_v, freq, time] trajectories.
ComplexTensor trajectory_snapshot(const ComplexTensor &trajectory,
                                  std::size_t time_index);
ComplexTensor trajectory_subcarrier(const ComplexTensor &trajectory,
                                    std::size_t freq_index);

} // namespace mdmp
