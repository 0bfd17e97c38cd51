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

#include "mdmp/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "mdmp/errors.hpp"
#include "mdmp/matching.hpp"

namespace mdmp {

namespace {

// Row budget for the gain fit; above it only every 4th subcarrier is kept.
constexpr std::size_t kGainRowBudget = 1u << 15;
constexpr int kSubcarrierStride = 4;
constexpr double kRankGate = 1e-10;

// Path estimate re-expressed in the generator's parameterization, with the
// delay intercept moved to t = 0.
PathTruth as_path_truth(const PathEstimate &est, double reference_s,
                        std::complex<double> gain) {
    PathTruth p;
    p.theta_rad = est.theta_rad;
    p.phi_rad = est.phi_rad;
    p.delay0_s = est.tau_ref_s - est.k_tau * reference_s;
    p.delay_rate = est.k_tau;
    p.doppler_hz = est.omega_hz;
    p.gain = gain;
    return p;
}

void check_estimates(const EstimateSet &estimates) {
    if (estimates.paths.empty())
        throw EmptyPathsError("estimate set holds no paths");
    if (!std::isfinite(estimates.reference_s))
        throw NonFiniteError("reference timestamp must be finite");
    for (const PathEstimate &p : estimates.paths)
        if (!std::isfinite(p.theta_rad) || !std::isfinite(p.phi_rad) ||
            !std::isfinite(p.tau_ref_s) || !std::isfinite(p.k_tau) ||
            !std::isfinite(p.omega_hz) || !std::isfinite(p.gain.real()) ||
            !std::isfinite(p.gain.imag()))
            throw NonFiniteError("path estimate holds a non-finite value");
}

} // namespace

PairingResult pair_paths(
    const std::vector<std::pair<double, double>> &angles_delay_run,
    const std::vector<std::pair<double, double>> &angles_doppler_run) {
    if (angles_delay_run.size() != angles_doppler_run.size())
        throw DimMismatchError("angle lists differ in length");
    const std::size_t n = angles_delay_run.size();
    PairingResult out;
    if (n == 0)
        return out;
    for (const auto &[t, p] : angles_delay_run)
        if (!std::isfinite(t) || !std::isfinite(p))
            throw NonFiniteError("angle list holds a non-finite value");
    for (const auto &[t, p] : angles_doppler_run)
        if (!std::isfinite(t) || !std::isfinite(p))
            throw NonFiniteError("angle list holds a non-finite value");

    Eigen::MatrixXd cost(static_cast<Eigen::Index>(n),
                         static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::abs(angles_delay_run[i].first -
                         angles_doppler_run[j].first) +
                std::abs(angles_delay_run[i].second -
                         angles_doppler_run[j].second);

    // Per-row nearest neighbour; keep it when it is already a bijection.
    std::vector<int> greedy(n);
    std::vector<int> hits(n, 0);
    bool collision = false;
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        cost.row(static_cast<Eigen::Index>(i)).minCoeff(&best);
        greedy[i] = static_cast<int>(best);
        if (++hits[static_cast<std::size_t>(best)] > 1)
            collision = true;
    }
    if (!collision) {
        out.perm = std::move(greedy);
        for (std::size_t i = 0; i < n; ++i)
            out.cost += cost(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(out.perm[i]));
        return out;
    }

    out.perm = min_cost_assignment(cost);
    for (std::size_t i = 0; i < n; ++i)
        out.cost += cost(static_cast<Eigen::Index>(i),
                         static_cast<Eigen::Index>(out.perm[i]));

    // A collision means at least two paths compete for one partner. Accept
    // the optimal matching only while its mean per-path cost stays below
    // half the tightest angular separation within the delay run's list.
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            min_sep = std::min(
                min_sep,
                std::abs(angles_delay_run[i].first -
                         angles_delay_run[j].first) +
                    std::abs(angles_delay_run[i].second -
                             angles_delay_run[j].second));
    const double mean_cost = out.cost / static_cast<double>(n);
    if (mean_cost >= 0.5 * min_sep)
        throw AmbiguousPairingError(
            "path matching is ambiguous: matching cost " +
            std::to_string(mean_cost) +
            " rad per path is not small against the angular separation " +
            std::to_string(min_sep) + " rad");
    return out;
}

std::vector<double> correct_doppler(const std::vector<double> &omega_tau_hz,
                                    const PairingResult &pairing,
                                    const std::vector<double> &k_tau,
                                    double first_subcarrier_hz) {
    const std::size_t n = pairing.perm.size();
    if (omega_tau_hz.size() != n || k_tau.size() != n)
        throw DimMismatchError("pairing and parameter lists differ in length");
    if (!std::isfinite(first_subcarrier_hz))
        throw NonFiniteError("first subcarrier frequency must be finite");
    std::vector<double> omega(n);
    for (std::size_t p = 0; p < n; ++p) {
        const int j = pairing.perm[p];
        if (j < 0 || static_cast<std::size_t>(j) >= n)
            throw DimMismatchError("pairing permutation index out of range");
        omega[p] = omega_tau_hz[static_cast<std::size_t>(j)] +
                   first_subcarrier_hz * k_tau[p];
    }
    return omega;
}

std::vector<std::complex<double>> estimate_gains(
    const std::vector<TimedSnapshot> &samples, const EstimateSet &estimates,
    const ArrayGeometry &geom, const SamplingGrid &grid) {
    geom.validate();
    grid.validate();
    check_estimates(estimates);
    if (samples.empty())
        throw DomainError("gain fit needs at least one snapshot");
    const std::size_t n_paths = estimates.paths.size();
    const std::size_t per_snapshot =
        static_cast<std::size_t>(geom.element_count()) *
        static_cast<std::size_t>(grid.n_subcarriers);
    for (const TimedSnapshot &s : samples) {
        if (s.snapshot == nullptr)
            throw DomainError("gain fit received a null snapshot");
        if (!std::isfinite(s.t_s))
            throw NonFiniteError("sample timestamp must be finite");
        if (s.snapshot->rank() != 3 ||
            s.snapshot->dim(0) != static_cast<std::size_t>(geom.n_h) ||
            s.snapshot->dim(1) != static_cast<std::size_t>(geom.n_v) ||
            s.snapshot->dim(2) != static_cast<std::size_t>(grid.n_subcarriers))
            throw DimMismatchError("snapshot extents do not match geometry");
    }

    // Keep every subcarrier while the stacked system fits the budget;
    // otherwise decimate the frequency axis.
    const std::size_t full_rows = per_snapshot * samples.size();
    const int stride = full_rows > kGainRowBudget ? kSubcarrierStride : 1;
    std::vector<int> kept_subcarriers;
    for (int n = 0; n < grid.n_subcarriers; n += stride)
        kept_subcarriers.push_back(n);
    const std::size_t rows = static_cast<std::size_t>(geom.element_count()) *
                             kept_subcarriers.size() * samples.size();
    if (rows < n_paths)
        throw DomainError("gain fit is underdetermined: fewer observations "
                          "than paths");

    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows),
                       static_cast<Eigen::Index>(n_paths));
    Eigen::VectorXcd b(static_cast<Eigen::Index>(rows));
    const std::size_t n_f = static_cast<std::size_t>(grid.n_subcarriers);

    for (std::size_t p = 0; p < n_paths; ++p) {
        const PathTruth unit = as_path_truth(estimates.paths[p],
                                             estimates.reference_s,
                                             {1.0, 0.0});
        Eigen::Index row = 0;
        for (const TimedSnapshot &s : samples) {
            const ComplexTensor model =
                channel_snapshot(geom, grid, {unit}, s.t_s);
            for (int e = 0; e < geom.element_count(); ++e)
                for (int n : kept_subcarriers)
                    m(row++, static_cast<Eigen::Index>(p)) =
                        model.data()[static_cast<std::size_t>(e) * n_f +
                                     static_cast<std::size_t>(n)];
        }
    }
    Eigen::Index row = 0;
    for (const TimedSnapshot &s : samples)
        for (int e = 0; e < geom.element_count(); ++e)
            for (int n : kept_subcarriers)
                b(row++) = s.snapshot->data()[static_cast<std::size_t>(e) *
                                                  n_f +
                                              static_cast<std::size_t>(n)];

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
    const Eigen::VectorXd &sv = svd.singularValues();
    if (sv(0) == 0.0 || sv(sv.size() - 1) < kRankGate * sv(0))
        throw RankDeficientError(
            "gain system is numerically rank-deficient: paths are collinear "
            "over the provided samples");
    const Eigen::VectorXcd g = svd.solve(b);
    return {g.data(), g.data() + g.size()};
}

ComplexTensor predict_channel(const EstimateSet &estimates,
                              const ArrayGeometry &geom,
                              const SamplingGrid &grid, double t_target_s) {
    geom.validate();
    grid.validate();
    check_estimates(estimates);
    if (!std::isfinite(t_target_s))
        throw NonFiniteError("target time must be finite");

    const double window = 0.5 / grid.subcarrier_spacing_hz;
    std::vector<PathTruth> paths;
    paths.reserve(estimates.paths.size());
    for (std::size_t p = 0; p < estimates.paths.size(); ++p) {
        const PathEstimate &est = estimates.paths[p];
        const double tau_target =
            est.tau_ref_s + est.k_tau * (t_target_s - estimates.reference_s);
        if (!(std::abs(tau_target) < window))
            throw WindowViolationError(
                "predicted delay of path " + std::to_string(p) + " (" +
                std::to_string(tau_target * 1e6) +
                " us) leaves the unambiguous window");
        paths.push_back(as_path_truth(est, estimates.reference_s, est.gain));
    }
    return channel_snapshot(geom, grid, paths, t_target_s);
}

ComplexTensor stale_csi_baseline(const ComplexTensor &last_sample) {
    return last_sample;
}

} // namespace mdmp
