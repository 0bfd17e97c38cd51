// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo harness: per-trial pipeline (synthesize -> estimate -> pair ->
// fit gains -> predict -> score), deterministic parallel execution, sweep
// axes, and CSV emission.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mdmp/errors.hpp"
#include "mdmp/estimator.hpp"
#include "mdmp/harness.hpp"
#include "mdmp/matching.hpp"

namespace mdmp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Numbers print with 17 significant digits so reruns are byte-identical and
// values survive a text round trip; non-finite values print as nan/inf/-inf.
std::string fmt_field(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

MetricsRecord make_record(const ScenarioConfig &cfg, double snr_db, int trial,
                          double csi_delay_s) {
    MetricsRecord rec;
    rec.scenario_id = cfg.scenario_id;
    rec.trial = trial;
    rec.snr_db = snr_db;
    rec.csi_delay_s = csi_delay_s;
    rec.n_t = cfg.geometry.element_count();
    rec.n_samples = cfg.grid.n_samples();
    rec.n_paths_true = cfg.paths.count;
    rec.n_paths_detected = 0;
    rec.nmse_db_mdmp = kNaN;
    rec.nmse_db_stale = kNaN;
    rec.err_theta_rad = kNaN;
    rec.err_phi_rad = kNaN;
    rec.err_tau_s = kNaN;
    rec.err_omega_hz = kNaN;
    rec.offdiag_residual = kNaN;
    rec.subspace_gap = kNaN;
    return rec;
}

// Runs one (snr, trial) cell and fills one record per configured CSI delay
// into `out`. Estimation happens once; each horizon reuses the estimate set.
// Library errors become the record's error_code; anything else propagates.
void run_cell(const ScenarioConfig &cfg, std::size_t snr_idx, int trial,
              MetricsRecord *out) {
    const double snr_db = cfg.snr_db[snr_idx];
    const std::size_t n_delay = cfg.csi_delay_s.size();
    for (std::size_t d = 0; d < n_delay; ++d)
        out[d] = make_record(cfg, snr_db, trial, cfg.csi_delay_s[d]);

    const auto t_begin = std::chrono::steady_clock::now();
    const auto record_wall = [&] {
        const auto t_end = std::chrono::steady_clock::now();
        const double wall =
            std::chrono::duration<double, std::milli>(t_end - t_begin).count();
        for (std::size_t d = 0; d < n_delay; ++d) out[d].wall_ms = wall;
    };

    // Ground truth and measurement. Path draws depend only on (seed, trial)
    // so every SNR level and every sweep size sees the same propagation
    // environment; the noise stream is separate per (snr, trial).
    std::vector<PathTruth> paths;
    std::optional<ComplexTensor> measured;
    try {
        Rng path_rng(derive_stream(cfg.seed,
                                   {1000 + static_cast<std::uint64_t>(trial)}));
        paths = draw_paths(cfg.paths, cfg.geometry, path_rng);
        const ComplexTensor clean =
            channel_trajectory(cfg.geometry, cfg.grid, paths);
        measured = add_awgn(
            clean, snr_db,
            derive_stream(cfg.seed, {7, static_cast<std::uint64_t>(snr_idx),
                                     static_cast<std::uint64_t>(trial)}));
    } catch (const Error &e) {
        for (std::size_t d = 0; d < n_delay; ++d)
            out[d].error_code = error_code_name(e.code());
        record_wall();
        return;
    }

    const std::vector<double> &times = cfg.grid.sample_times_s;
    const std::size_t last = times.size() - 1;
    const ComplexTensor snap_last = trajectory_snapshot(*measured, last);

    bool est_ok = false;
    std::string est_error;
    EstimateSet est;
    int detected = 0;
    double err_theta = kNaN, err_phi = kNaN, err_tau = kNaN, err_omega = kNaN;
    double offdiag = kNaN, gap = kNaN;
    try {
        est = estimate_trajectory(*measured, cfg.geometry, cfg.grid,
                                  cfg.pencil);
        detected = est.n_paths();
        offdiag = est.offdiag_residual;
        gap = est.subspace_gap;
        est_ok = true;

        // Per-parameter errors only when the detected count matches the
        // truth; paths are associated by departure angles.
        if (detected == static_cast<int>(paths.size())) {
            const int n = detected;
            Eigen::MatrixXd cost(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    cost(i, j) =
                        std::abs(est.paths[i].theta_rad - paths[j].theta_rad) +
                        std::abs(est.paths[i].phi_rad - paths[j].phi_rad);
            const std::vector<int> match = min_cost_assignment(cost);
            std::vector<double> d_theta, d_phi, d_tau, d_omega;
            for (int i = 0; i < n; ++i) {
                const PathTruth &truth = paths[match[i]];
                d_theta.push_back(
                    std::abs(est.paths[i].theta_rad - truth.theta_rad));
                d_phi.push_back(std::abs(est.paths[i].phi_rad - truth.phi_rad));
                d_tau.push_back(std::abs(est.paths[i].tau_ref_s -
                                         path_delay_at(truth, est.reference_s)));
                d_omega.push_back(
                    std::abs(est.paths[i].omega_hz - truth.doppler_hz));
            }
            err_theta = median(d_theta);
            err_phi = median(d_phi);
            err_tau = median(d_tau);
            err_omega = median(d_omega);
        }
    } catch (const Error &e) {
        est_error = error_code_name(e.code());
    }
    record_wall();

    // Scoring per horizon. The stale baseline needs no estimate, so it is
    // scored even when estimation failed.
    const ComplexTensor stale = stale_csi_baseline(snap_last);
    for (std::size_t d = 0; d < n_delay; ++d) {
        MetricsRecord &rec = out[d];
        rec.n_paths_detected = detected;
        rec.offdiag_residual = offdiag;
        rec.subspace_gap = gap;
        rec.err_theta_rad = err_theta;
        rec.err_phi_rad = err_phi;
        rec.err_tau_s = err_tau;
        rec.err_omega_hz = err_omega;
        const double t_target = times[last] + cfg.csi_delay_s[d];
        try {
            const ComplexTensor truth =
                channel_snapshot(cfg.geometry, cfg.grid, paths, t_target);
            rec.nmse_db_stale = nmse(stale, truth).db;
            if (est_ok) {
                const ComplexTensor predicted =
                    predict_channel(est, cfg.geometry, cfg.grid, t_target);
                rec.nmse_db_mdmp = nmse(predicted, truth).db;
            } else {
                rec.error_code = est_error;
            }
        } catch (const Error &e) {
            rec.error_code = error_code_name(e.code());
        }
    }
}

std::vector<double> head_or_empty(const std::vector<double> &values) {
    if (values.empty()) return {};
    return {values.front()};
}

} // namespace

Nmse nmse(const ComplexTensor &est, const ComplexTensor &truth) {
    if (est.axes().labels != truth.axes().labels ||
        est.axes().sizes != truth.axes().sizes)
        throw DimMismatchError("nmse: estimate and reference shapes differ");
    const double denom = truth.squared_norm();
    if (denom == 0.0)
        throw ZeroTruthError("nmse: reference tensor has no energy");
    double num = 0.0;
    const auto &e = est.data();
    const auto &t = truth.data();
    for (std::size_t i = 0; i < e.size(); ++i) num += std::norm(e[i] - t[i]);
    Nmse out;
    out.ratio = num / denom;
    out.db = out.ratio > 0.0 ? 10.0 * std::log10(out.ratio)
                             : -std::numeric_limits<double>::infinity();
    return out;
}

std::vector<PathTruth> draw_paths(const PathGenSpec &spec,
                                  const ArrayGeometry &geom, Rng &rng) {
    if (spec.count < 1) throw ConfigError("path count must be >= 1");
    if (!spec.doppler_hz.empty() &&
        static_cast<int>(spec.doppler_hz.size()) != spec.count)
        throw ConfigError("doppler_hz list length must equal the path count");
    if (!(spec.delay_max_s >= spec.delay_min_s) || spec.delay_min_s < 0.0)
        throw ConfigError("delay range invalid: need 0 <= delay_min_s <= "
                          "delay_max_s");

    // Angles first (rejection sampling against the separation floor), then
    // the per-path marginals, so the draw order is well defined.
    const double angle_limit = kPi / 3.0;
    constexpr int kMaxAttempts = 2000;
    std::vector<std::pair<double, double>> angles;
    angles.reserve(static_cast<std::size_t>(spec.count));
    for (int p = 0; p < spec.count; ++p) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            const double theta = rng.uniform(-angle_limit, angle_limit);
            const double phi = rng.uniform(-angle_limit, angle_limit);
            bool separated = true;
            for (const auto &[t0, p0] : angles) {
                if (std::abs(theta - t0) + std::abs(phi - p0) <
                    spec.min_angle_separation_rad) {
                    separated = false;
                    break;
                }
            }
            if (separated) {
                angles.emplace_back(theta, phi);
                placed = true;
            }
        }
        if (!placed)
            throw ConfigError(
                "could not draw " + std::to_string(spec.count) +
                " paths with pairwise angle separation >= " +
                std::to_string(spec.min_angle_separation_rad) + " rad");
    }

    const double lambda = geom.wavelength_m();
    std::vector<PathTruth> paths(static_cast<std::size_t>(spec.count));
    for (int p = 0; p < spec.count; ++p) {
        PathTruth &path = paths[static_cast<std::size_t>(p)];
        path.theta_rad = angles[static_cast<std::size_t>(p)].first;
        path.phi_rad = angles[static_cast<std::size_t>(p)].second;
        path.delay0_s = rng.uniform(spec.delay_min_s, spec.delay_max_s);
        path.doppler_hz =
            spec.doppler_hz.empty()
                ? (spec.speed_mps / lambda) * rng.uniform(-1.0, 1.0)
                : spec.doppler_hz[static_cast<std::size_t>(p)];
        path.delay_rate = -path.doppler_hz / geom.carrier_hz;
        const double magnitude = rng.uniform(0.5, 1.0);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        path.gain = std::polar(magnitude, phase);
    }
    return paths;
}

EstimateSet estimate_trajectory(const ComplexTensor &trajectory,
                                const ArrayGeometry &geom,
                                const SamplingGrid &grid,
                                const PencilConfig &pencil) {
    const AxisSpec &axes = trajectory.axes();
    if (axes.rank() != 4 || axes.labels[0] != Axis::ant_h ||
        axes.labels[1] != Axis::ant_v || axes.labels[2] != Axis::freq ||
        axes.labels[3] != Axis::time)
        throw DimMismatchError(
            "estimate_trajectory: expected axes [ant_h, ant_v, freq, time]");
    if (axes.sizes[0] != static_cast<std::size_t>(geom.n_h) ||
        axes.sizes[1] != static_cast<std::size_t>(geom.n_v) ||
        axes.sizes[2] != static_cast<std::size_t>(grid.n_subcarriers) ||
        axes.sizes[3] != grid.sample_times_s.size())
        throw DimMismatchError("estimate_trajectory: trajectory extents do "
                               "not match the geometry/grid");
    if (grid.sample_times_s.size() < 2)
        throw DimMismatchError(
            "estimate_trajectory: need at least two snapshots");

    const std::vector<double> &times = grid.sample_times_s;
    const std::size_t last = times.size() - 1;
    const ComplexTensor snap_first = trajectory_snapshot(trajectory, 0);
    const ComplexTensor snap_last = trajectory_snapshot(trajectory, last);

    const AngleDelayEstimates ad = estimate_angle_delay(
        snap_first, snap_last, times[0], times[last], geom, grid, pencil);
    const ComplexTensor slice = trajectory_subcarrier(trajectory, 0);
    const AngleDopplerEstimates dop =
        estimate_angle_doppler(slice, times, geom, pencil, ad.n_paths());

    std::vector<std::pair<double, double>> angles_ad, angles_dop;
    for (int p = 0; p < ad.n_paths(); ++p)
        angles_ad.emplace_back(ad.theta_rad[p], ad.phi_rad[p]);
    for (int p = 0; p < dop.n_paths(); ++p)
        angles_dop.emplace_back(dop.theta_rad[p], dop.phi_rad[p]);
    const PairingResult pairing = pair_paths(angles_ad, angles_dop);
    const std::vector<double> omega_hz = correct_doppler(
        dop.omega_tau_hz, pairing, ad.k_tau, grid.first_subcarrier_hz);

    EstimateSet est;
    est.reference_s = ad.t2_s;
    est.offdiag_residual = std::max(ad.offdiag_residual, dop.offdiag_residual);
    est.subspace_gap = ad.subspace_gap;
    for (int p = 0; p < ad.n_paths(); ++p) {
        PathEstimate path;
        path.theta_rad = ad.theta_rad[p];
        path.phi_rad = ad.phi_rad[p];
        path.tau_ref_s = ad.tau_t2_s[p];
        path.k_tau = ad.k_tau[p];
        path.omega_hz = omega_hz[p];
        est.paths.push_back(path);
    }

    const std::vector<TimedSnapshot> samples = {{&snap_first, times[0]},
                                                {&snap_last, times[last]}};
    const std::vector<std::complex<double>> gains =
        estimate_gains(samples, est, geom, grid);
    for (int p = 0; p < est.n_paths(); ++p) est.paths[p].gain = gains[p];
    return est;
}

std::vector<MetricsRecord> run_scenario(const ScenarioConfig &cfg,
                                        int workers) {
    cfg.validate();
    if (workers < 1) throw ConfigError("workers must be >= 1");

    const std::size_t n_snr = cfg.snr_db.size();
    const std::size_t n_delay = cfg.csi_delay_s.size();
    const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
    const std::size_t n_cells = n_snr * n_trials;
    if (n_cells == 0 || n_delay == 0) return {};

    // Records are preallocated and each cell writes only its own slots, so
    // the output order is (snr index, trial, delay index) for any worker
    // count.
    std::vector<MetricsRecord> records(n_cells * n_delay);
    const auto run_one = [&](std::size_t cell) {
        const std::size_t snr_idx = cell / n_trials;
        const int trial = static_cast<int>(cell % n_trials);
        run_cell(cfg, snr_idx, trial, &records[cell * n_delay]);
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(workers), n_cells);
    if (n_threads <= 1) {
        for (std::size_t cell = 0; cell < n_cells; ++cell) run_one(cell);
        return records;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t cell = next.fetch_add(1);
                if (cell >= n_cells) return;
                try {
                    run_one(cell);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!first_failure)
                        first_failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread &worker : pool) worker.join();
    if (first_failure) std::rethrow_exception(first_failure);
    return records;
}

SweepAxis parse_sweep_axis(const std::string &name) {
    if (name == "snr") return SweepAxis::snr;
    if (name == "csi_delay") return SweepAxis::csi_delay;
    if (name == "antennas") return SweepAxis::antennas;
    if (name == "samples") return SweepAxis::samples;
    throw ConfigError("unknown sweep axis '" + name +
                      "'; expected snr, csi_delay, antennas, or samples");
}

const char *sweep_axis_name(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::snr: return "snr";
    case SweepAxis::csi_delay: return "csi_delay";
    case SweepAxis::antennas: return "antennas";
    case SweepAxis::samples: return "samples";
    }
    return "unknown";
}

std::vector<MetricsRecord> sweep_records(const ScenarioConfig &cfg,
                                         SweepAxis axis, int workers) {
    switch (axis) {
    case SweepAxis::snr: {
        ScenarioConfig varied = cfg;
        varied.csi_delay_s = head_or_empty(cfg.csi_delay_s);
        return run_scenario(varied, workers);
    }
    case SweepAxis::csi_delay: {
        ScenarioConfig varied = cfg;
        varied.snr_db = head_or_empty(cfg.snr_db);
        return run_scenario(varied, workers);
    }
    case SweepAxis::antennas: {
        std::vector<MetricsRecord> all;
        for (int n_t : cfg.antenna_sweep) {
            const int side =
                static_cast<int>(std::lround(std::sqrt(static_cast<double>(
                    std::max(n_t, 0)))));
            if (n_t < 4 || side * side != n_t)
                throw ConfigError("antenna_sweep entries must be perfect "
                                  "squares >= 4, got " + std::to_string(n_t));
            ScenarioConfig varied = cfg;
            varied.snr_db = head_or_empty(cfg.snr_db);
            varied.csi_delay_s = head_or_empty(cfg.csi_delay_s);
            varied.geometry.n_h = side;
            varied.geometry.n_v = side;
            varied.pencil.L = std::max(2, std::min(cfg.pencil.L, side / 2));
            varied.pencil.R = std::max(2, std::min(cfg.pencil.R, side / 2));
            const std::vector<MetricsRecord> part =
                run_scenario(varied, workers);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    case SweepAxis::samples: {
        std::vector<MetricsRecord> all;
        for (int n_s : cfg.sample_sweep) {
            if (n_s < 2)
                throw ConfigError("sample_sweep entries must be >= 2, got " +
                                  std::to_string(n_s));
            ScenarioConfig varied = cfg;
            varied.snr_db = head_or_empty(cfg.snr_db);
            varied.csi_delay_s = head_or_empty(cfg.csi_delay_s);
            varied.grid.sample_times_s = uniform_sample_times(
                0.0, cfg.grid.sample_interval_s, n_s);
            varied.pencil.Q = std::max(2, std::min(cfg.pencil.Q, n_s / 2));
            const std::vector<MetricsRecord> part =
                run_scenario(varied, workers);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    }
    throw DomainError("unhandled sweep axis");
}

void sweep(const ScenarioConfig &cfg, SweepAxis axis,
           const std::string &csv_path, int workers) {
    write_metrics_csv(sweep_records(cfg, axis, workers), csv_path);
}

std::string metrics_csv_header() {
    return "scenario_id,trial,snr_db,csi_delay_s,n_t,n_samples,n_paths_true,"
           "n_paths_detected,nmse_db_mdmp,nmse_db_stale,err_theta_rad,"
           "err_phi_rad,err_tau_s,err_omega_hz,offdiag_residual,subspace_gap,"
           "error_code";
}

std::string metrics_csv_row(const MetricsRecord &record) {
    std::ostringstream out;
    out << record.scenario_id << ',' << record.trial << ','
        << fmt_field(record.snr_db) << ',' << fmt_field(record.csi_delay_s)
        << ',' << record.n_t << ',' << record.n_samples << ','
        << record.n_paths_true << ',' << record.n_paths_detected << ','
        << fmt_field(record.nmse_db_mdmp) << ','
        << fmt_field(record.nmse_db_stale) << ','
        << fmt_field(record.err_theta_rad) << ','
        << fmt_field(record.err_phi_rad) << ',' << fmt_field(record.err_tau_s)
        << ',' << fmt_field(record.err_omega_hz) << ','
        << fmt_field(record.offdiag_residual) << ','
        << fmt_field(record.subspace_gap) << ',' << record.error_code;
    return out.str();
}

void write_metrics_csv(const std::vector<MetricsRecord> &records,
                       const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open metrics file for writing: " + path);
    out << metrics_csv_header() << '\n';
    for (const MetricsRecord &record : records)
        out << metrics_csv_row(record) << '\n';
    out.flush();
    if (!out) throw IoError("failed writing metrics file: " + path);
}

} // namespace mdmp
