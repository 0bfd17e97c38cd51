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

#include "mdmp/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mdmp/rng.hpp"

namespace mdmp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_finite(double v, const char *name) {
    if (!std::isfinite(v))
        throw NonFiniteError(std::string(name) + " is not finite");
}

void check_paths(const std::vector<PathTruth> &paths) {
    if (paths.empty())
        throw EmptyPathsError("path list is empty");
    for (const PathTruth &p : paths) {
        check_finite(p.theta_rad, "theta");
        check_finite(p.phi_rad, "phi");
        check_finite(p.delay0_s, "delay");
        check_finite(p.delay_rate, "delay rate");
        check_finite(p.doppler_hz, "doppler");
        if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()))
            throw NonFiniteError("path gain is not finite");
    }
}

// Accumulates one path as the outer product of its antenna and frequency
// phase profiles; equals the per-element sum but ~P times cheaper.
void accumulate_path(const ArrayGeometry &geom, const SamplingGrid &grid,
                     const PathTruth &path, double t_s,
                     std::complex<double> *out) {
    const Eigen::VectorXcd steer =
        steering_vector(geom, path.theta_rad, path.phi_rad);
    const double tau = path_delay_at(path, t_s);
    const std::complex<double> time_phase =
        path.gain * std::polar(1.0, kTwoPi * path.doppler_hz * t_s);

    const int n_f = grid.n_subcarriers;
    std::vector<std::complex<double>> freq_phase(static_cast<std::size_t>(n_f));
    for (int n = 0; n < n_f; ++n)
        freq_phase[static_cast<std::size_t>(n)] =
            std::polar(1.0, -kTwoPi * grid.subcarrier_hz(n) * tau);

    const int n_t = geom.element_count();
    for (int i = 0; i < n_t; ++i) {
        const std::complex<double> c = steer(i) * time_phase;
        std::complex<double> *row = out + static_cast<std::size_t>(i) * n_f;
        for (int n = 0; n < n_f; ++n)
            row[n] += c * freq_phase[static_cast<std::size_t>(n)];
    }
}

} // namespace

void ArrayGeometry::validate() const {
    if (n_h < 1 || n_v < 1)
        throw DimMismatchError("array must have at least one element per axis");
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
        throw DomainError("carrier frequency must be positive");
    if (spacing_h_m < 0.0 || spacing_v_m < 0.0 ||
        !std::isfinite(spacing_h_m) || !std::isfinite(spacing_v_m))
        throw DomainError("element spacing must be non-negative and finite");
    if (n_h > 1 && spacing_h_m == 0.0)
        throw DomainError("horizontal spacing must be positive for n_h > 1");
    if (n_v > 1 && spacing_v_m == 0.0)
        throw DomainError("vertical spacing must be positive for n_v > 1");
}

void SamplingGrid::validate() const {
    if (n_subcarriers < 1)
        throw DomainError("grid needs at least one subcarrier");
    if (!(subcarrier_spacing_hz > 0.0))
        throw DomainError("subcarrier spacing must be positive");
    if (first_subcarrier_hz < 0.0 || !std::isfinite(first_subcarrier_hz))
        throw DomainError("first subcarrier frequency must be non-negative");
    if (sample_interval_s < 0.0 || !std::isfinite(sample_interval_s))
        throw DomainError("sample interval must be non-negative and finite");
    for (std::size_t i = 1; i < sample_times_s.size(); ++i)
        if (!(sample_times_s[i] > sample_times_s[i - 1]))
            throw DomainError("sample times must be strictly increasing");
    for (double t : sample_times_s)
        if (!std::isfinite(t))
            throw DomainError("sample time is not finite");
}

std::vector<double> uniform_sample_times(double start_s, double interval_s,
                                         int count) {
    if (count < 1 || !(interval_s > 0.0))
        throw DomainError("need a positive interval and at least one sample");
    std::vector<double> times(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        times[static_cast<std::size_t>(i)] = start_s + interval_s * i;
    return times;
}

Eigen::VectorXcd steering_vector(const ArrayGeometry &geom, double theta_rad,
                                 double phi_rad) {
    geom.validate();
    check_finite(theta_rad, "theta");
    check_finite(phi_rad, "phi");

    const double lambda = geom.wavelength_m();
    const double step_h =
        kTwoPi * geom.spacing_h_m * std::cos(theta_rad) * std::sin(phi_rad) / lambda;
    const double step_v = kTwoPi * geom.spacing_v_m * std::sin(theta_rad) / lambda;

    Eigen::VectorXcd a(geom.element_count());
    for (int h = 0; h < geom.n_h; ++h) {
        const std::complex<double> ah = std::polar(1.0, step_h * h);
        for (int v = 0; v < geom.n_v; ++v)
            a(static_cast<Eigen::Index>(geom.flat_index(h, v))) =
                ah * std::polar(1.0, step_v * v);
    }
    return a;
}

DopplerPair doppler_from_velocity(const VelocitySpec &velocity,
                                  std::size_t path_index, double carrier_hz) {
    if (!(carrier_hz > 0.0))
        throw DomainError("carrier frequency must be positive");
    check_finite(velocity.speed_mps, "speed");

    double el = velocity.elevation_rad;
    double az = velocity.azimuth_rad;
    if (!velocity.arrival_rad.empty()) {
        if (path_index >= velocity.arrival_rad.size())
            throw DimMismatchError("no arrival direction for path " +
                                   std::to_string(path_index));
        el = velocity.arrival_rad[path_index].first;
        az = velocity.arrival_rad[path_index].second;
    }

    // Unit arrival vector dotted with the velocity vector, over wavelength.
    const double ax = std::cos(el) * std::cos(az);
    const double ay = std::cos(el) * std::sin(az);
    const double az_ = std::sin(el);
    const double vx = std::cos(velocity.elevation_rad) * std::cos(velocity.azimuth_rad);
    const double vy = std::cos(velocity.elevation_rad) * std::sin(velocity.azimuth_rad);
    const double vz = std::sin(velocity.elevation_rad);

    const double lambda = kSpeedOfLight / carrier_hz;
    const double omega =
        velocity.speed_mps * (ax * vx + ay * vy + az_ * vz) / lambda;
    return DopplerPair{omega, -omega / carrier_hz};
}

double path_delay_at(const PathTruth &path, double t_s) {
    return path.delay0_s + path.delay_rate * t_s;
}

ComplexTensor channel_snapshot(const ArrayGeometry &geom,
                               const SamplingGrid &grid,
                               const std::vector<PathTruth> &paths,
                               double t_s) {
    geom.validate();
    grid.validate();
    check_paths(paths);
    check_finite(t_s, "time");

    ComplexTensor out = tensor_new(
        {static_cast<std::size_t>(geom.n_h), static_cast<std::size_t>(geom.n_v),
         static_cast<std::size_t>(grid.n_subcarriers)},
        {Axis::ant_h, Axis::ant_v, Axis::freq});
    for (const PathTruth &p : paths)
        accumulate_path(geom, grid, p, t_s, out.data().data());
    return out;
}

ComplexTensor channel_trajectory(const ArrayGeometry &geom,
                                 const SamplingGrid &grid,
                                 const std::vector<PathTruth> &paths) {
    geom.validate();
    grid.validate();
    check_paths(paths);
    if (grid.sample_times_s.empty())
        throw DomainError("trajectory needs at least one sample time");
    validate_identifiable(geom, grid, paths);

    const std::size_t n_h = static_cast<std::size_t>(geom.n_h);
    const std::size_t n_v = static_cast<std::size_t>(geom.n_v);
    const std::size_t n_f = static_cast<std::size_t>(grid.n_subcarriers);
    const std::size_t n_s = grid.sample_times_s.size();

    ComplexTensor out = tensor_new({n_h, n_v, n_f, n_s},
                                   {Axis::ant_h, Axis::ant_v, Axis::freq, Axis::time});
    for (std::size_t s = 0; s < n_s; ++s) {
        const ComplexTensor snap =
            channel_snapshot(geom, grid, paths, grid.sample_times_s[s]);
        const auto &src = snap.data();
        auto &dst = out.data();
        for (std::size_t e = 0; e < src.size(); ++e)
            dst[e * n_s + s] = src[e];
    }
    return out;
}

void validate_identifiable(const ArrayGeometry &geom, const SamplingGrid &grid,
                           const std::vector<PathTruth> &paths) {
    geom.validate();
    grid.validate();
    check_paths(paths);

    const double delay_window = 0.5 / grid.subcarrier_spacing_hz;
    const double lambda = geom.wavelength_m();

    const std::size_t n_s = grid.sample_times_s.size();
    double doppler_window = 0.0;
    if (n_s >= 2) {
        const double spacing =
            (grid.sample_times_s.back() - grid.sample_times_s.front()) /
            static_cast<double>(n_s - 1);
        doppler_window = 0.5 / spacing;
    }

    for (std::size_t p = 0; p < paths.size(); ++p) {
        const PathTruth &path = paths[p];
        const std::string tag = "path " + std::to_string(p);

        for (double t : grid.sample_times_s)
            if (std::abs(path_delay_at(path, t)) >= delay_window)
                throw WindowViolationError(
                    tag + ": delay outside the unambiguous window 1/(2*spacing)");

        const double omega_eff =
            path.doppler_hz - grid.first_subcarrier_hz * path.delay_rate;
        if (n_s >= 2 && std::abs(omega_eff) >= doppler_window)
            throw WindowViolationError(
                tag + ": effective Doppler outside 1/(2*sample spacing)");

        const double sv = geom.spacing_v_m * std::sin(path.theta_rad);
        if (geom.n_v > 1 && std::abs(sv) >= 0.5 * lambda)
            throw WindowViolationError(
                tag + ": vertical phase step outside (-pi, pi)");
        const double sh = geom.spacing_h_m * std::cos(path.theta_rad) *
                          std::sin(path.phi_rad);
        if (geom.n_h > 1 && std::abs(sh) >= 0.5 * lambda)
            throw WindowViolationError(
                tag + ": horizontal phase step outside (-pi, pi)");
    }
}

ComplexTensor add_awgn(const ComplexTensor &tensor, double snr_db,
                       std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0)
        return tensor;
    if (!std::isfinite(snr_db))
        throw DomainError("SNR must be finite or +infinity");
    if (tensor.size() == 0 || tensor.squared_norm() == 0.0)
        throw ZeroSignalError("cannot scale noise to an all-zero tensor");

    const double mean_power =
        tensor.squared_norm() / static_cast<double>(tensor.size());
    const double sigma = std::sqrt(mean_power * std::pow(10.0, -snr_db / 10.0));

    Rng rng(seed);
    ComplexTensor out = tensor;
    for (auto &v : out.data())
        v += sigma * rng.normal_complex();
    return out;
}

ComplexTensor trajectory_snapshot(const ComplexTensor &trajectory,
                                  std::size_t time_index) {
    const AxisSpec &axes = trajectory.axes();
    if (axes.rank() != 4 || axes.labels[3] != Axis::time)
        throw DimMismatchError("expected a [ant_h, ant_v, freq, time] trajectory");
    if (time_index >= axes.sizes[3])
        throw DimMismatchError("time index out of range");

    const std::size_t n_s = axes.sizes[3];
    const std::size_t elements = axes.sizes[0] * axes.sizes[1] * axes.sizes[2];
    std::vector<std::complex<double>> buf(elements);
    for (std::size_t e = 0; e < elements; ++e)
        buf[e] = trajectory.data()[e * n_s + time_index];
    return tensor_new({axes.sizes[0], axes.sizes[1], axes.sizes[2]},
                      {axes.labels[0], axes.labels[1], axes.labels[2]},
                      std::move(buf));
}

ComplexTensor trajectory_subcarrier(const ComplexTensor &trajectory,
                                    std::size_t freq_index) {
    const AxisSpec &axes = trajectory.axes();
    if (axes.rank() != 4 || axes.labels[2] != Axis::freq ||
        axes.labels[3] != Axis::time)
        throw DimMismatchError("expected a [ant_h, ant_v, freq, time] trajectory");
    if (freq_index >= axes.sizes[2])
        throw DimMismatchError("frequency index out of range");

    const std::size_t n_f = axes.sizes[2];
    const std::size_t n_s = axes.sizes[3];
    const std::size_t antennas = axes.sizes[0] * axes.sizes[1];
    std::vector<std::complex<double>> buf(antennas * n_s);
    for (std::size_t a = 0; a < antennas; ++a)
        for (std::size_t s = 0; s < n_s; ++s)
            buf[a * n_s + s] =
                trajectory.data()[(a * n_f + freq_index) * n_s + s];
    return tensor_new({axes.sizes[0], axes.sizes[1], n_s},
                      {axes.labels[0], axes.labels[1], Axis::time},
                      std::move(buf));
}

} // namespace mdmp
