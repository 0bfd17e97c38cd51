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
//
// Monte-Carlo harness: scenario configuration, random path generation, the
// end-to-end estimate/pair/predict pipeline per trial, metric computation,
// and CSV emission. Everything is deterministic under (config, seed).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdmp/channel.hpp"
#include "mdmp/pencil.hpp"
#include "mdmp/predict.hpp"
#include "mdmp/rng.hpp"
#include "mdmp/tensor.hpp"

namespace mdmp {

// How random path sets are drawn for each trial. Doppler comes either from a
// mobile speed (per-path shift uniform in ±speed/wavelength) or from an
// explicit per-path list; the list wins when non-empty.
struct PathGenSpec {
    int count = 3;
    double min_angle_separation_rad = 0.15; // pairwise |Δθ|+|Δφ| floor
    double delay_min_s = 1e-7;
    double delay_max_s = 1.2e-6;
    double speed_mps = 8.3;
    std::vector<double> doppler_hz; // explicit override, size == count
};

// Full scenario description. `antenna_sweep` / `sample_sweep` are only read
// by sweep() for the corresponding axes; plain runs ignore them.
struct ScenarioConfig {
    std::string scenario_id = "desk";
    ArrayGeometry geometry;
    SamplingGrid grid;
    PathGenSpec paths;
    PencilConfig pencil;
    std::vector<double> snr_db;      // non-finite entries mean noise-free
    std::vector<double> csi_delay_s; // prediction horizons t_tau
    std::vector<int> antenna_sweep;  // total element counts (square panels)
    std::vector<int> sample_sweep;   // time sample counts
    int trials = 10;
    std::uint64_t seed = 1;

    // Throws ConfigError when the scenario cannot run: invalid geometry or
    // grid, pencil infeasible for the path count on either the frequency or
    // the time axis, delays that leave the unambiguous window over the
    // prediction horizon, or Doppler beyond the time-axis alias limit.
    void validate() const;
};

// One row of the metrics table: a single (snr, csi delay, trial) cell.
// Failures are data: `error_code` carries the failure class and the metric
// fields stay NaN. `wall_ms` is kept in memory for operator summaries but is
// deliberately excluded from the CSV so reruns stay byte-identical.
struct MetricsRecord {
    std::string scenario_id;
    int trial = 0;
    double snr_db = 0.0;
    double csi_delay_s = 0.0;
    int n_t = 0;
    int n_samples = 0;
    int n_paths_true = 0;
    int n_paths_detected = 0;
    double nmse_db_mdmp = 0.0;
    double nmse_db_stale = 0.0;
    double err_theta_rad = 0.0; // median |Δθ| over matched paths
    double err_phi_rad = 0.0;
    double err_tau_s = 0.0;     // median |Δτ| at the reference time
    double err_omega_hz = 0.0;
    double offdiag_residual = 0.0;
    double subspace_gap = 0.0;
    std::string error_code; // empty on success
    double wall_ms = 0.0;   // never written to the CSV
};

struct Nmse {
    double ratio = 0.0;
    double db = 0.0; // 10*log10(ratio); -inf sentinel when ratio == 0
};

// Normalized squared error ‖est − truth‖_F² / ‖truth‖_F².
// Throws DimMismatchError on shape disagreement, ZeroTruthError when the
// reference has no energy.
Nmse nmse(const ComplexTensor &est, const ComplexTensor &truth);

// Draws `spec.count` paths with pairwise angle separation at least the
// configured floor (rejection sampling), delays uniform in the configured
// range, gains with uniform phase and magnitude in [0.5, 1], and Doppler per
// the spec. Throws ConfigError when the separation floor cannot be met.
std::vector<PathTruth> draw_paths(const PathGenSpec &spec,
                                  const ArrayGeometry &geom, Rng &rng);

// One full estimation pass over a measured [ant_h, ant_v, freq, time]
// trajectory whose snapshots sit at grid.sample_times_s: angles and delays
// from the first and last snapshots, Doppler from the first-subcarrier
// slice, association by departure angles, Doppler drift correction, and the
// complex gain fit. Throws DimMismatchError when the trajectory shape does
// not match the geometry/grid, and propagates the estimation-stage errors
// (PathCountMismatchError, RankDeficientError, AmbiguousPairingError, ...).
EstimateSet estimate_trajectory(const ComplexTensor &trajectory,
                                const ArrayGeometry &geom,
                                const SamplingGrid &grid,
                                const PencilConfig &pencil);

// Runs the full pipeline for every (snr, trial) cell: synthesize a noisy
// trajectory, estimate angles/delays from the first and last snapshots,
// estimate Doppler from the first-subcarrier slice, pair, correct, fit
// gains, then predict at (last sample time + t_tau) for every configured
// horizon and score against the noise-free truth and the stale baseline.
// Per-trial failures land in the records; the sweep never aborts.
// Records are ordered (snr index, trial, csi-delay index) regardless of
// worker count; `workers` <= 1 runs serially.
std::vector<MetricsRecord> run_scenario(const ScenarioConfig &cfg,
                                        int workers = 1);

enum class SweepAxis { snr, csi_delay, antennas, samples };

// Accepts "snr", "csi_delay", "antennas", "samples".
SweepAxis parse_sweep_axis(const std::string &name);
const char *sweep_axis_name(SweepAxis axis);

// Varies the named axis over the config's list while pinning the other axes
// to their first configured value, runs the trials, and returns the
// concatenated records. For the antennas axis the entries are total element
// counts laid out as square panels (perfect squares required) with the
// antenna windows shrunk to fit; the samples axis rebuilds the time grid and
// shrinks the time window likewise.
std::vector<MetricsRecord> sweep_records(const ScenarioConfig &cfg,
                                         SweepAxis axis, int workers = 1);

// sweep_records plus CSV emission. Throws IoError when the file cannot be
// written.
void sweep(const ScenarioConfig &cfg, SweepAxis axis,
           const std::string &csv_path, int workers = 1);

// CSV surface (column order documented in docs/metrics.md).
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord &record);
void write_metrics_csv(const std::vector<MetricsRecord> &records,
                       const std::string &path);

// --- Scenario configuration text format -----------------------------------
// Flat `key = value` lines, `#` comments, lists comma-separated; unknown
// keys are rejected. scenario_config_schema() documents every key.

ScenarioConfig default_scenario_config();
ScenarioConfig parse_scenario_config(const std::string &text);
ScenarioConfig load_scenario_config(const std::string &path);
std::string scenario_config_schema();

}  // namespace mdmp
