// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration: desk-scale defaults, the flat key = value text
// format, the documented schema, and semantic validation run before any
// trial starts.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mdmp/errors.hpp"
#include "mdmp/harness.hpp"

namespace mdmp {

namespace {

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string &value) {
    std::vector<std::string> items;
    std::string current;
    std::istringstream stream(value);
    while (std::getline(stream, current, ',')) {
        const std::string item = trim(current);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

double parse_double(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        const double out = std::stod(value, &used);
        if (trim(value.substr(used)).empty()) return out;
    } catch (const std::exception &) {
    }
    throw ConfigError("config key '" + key + "' expects a number, got '" +
                      value + "'");
}

long long parse_int(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        const long long out = std::stoll(value, &used);
        if (trim(value.substr(used)).empty()) return out;
    } catch (const std::exception &) {
    }
    throw ConfigError("config key '" + key + "' expects an integer, got '" +
                      value + "'");
}

std::uint64_t parse_u64(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        const std::uint64_t out = std::stoull(value, &used);
        if (trim(value.substr(used)).empty()) return out;
    } catch (const std::exception &) {
    }
    throw ConfigError("config key '" + key +
                      "' expects an unsigned integer, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string &key,
                                      const std::string &value) {
    std::vector<double> out;
    for (const std::string &item : split_list(value))
        out.push_back(parse_double(key, item));
    return out;
}

std::vector<int> parse_int_list(const std::string &key,
                                const std::string &value) {
    std::vector<int> out;
    for (const std::string &item : split_list(value))
        out.push_back(static_cast<int>(parse_int(key, item)));
    return out;
}

std::string join(const std::vector<std::string> &lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += "; ";
        out += lines[i];
    }
    return out;
}

} // namespace

ScenarioConfig default_scenario_config() {
    ScenarioConfig cfg;

    ArrayGeometry geom;
    geom.n_h = 8;
    geom.n_v = 8;
    geom.carrier_hz = 3.5e9;
    geom.spacing_h_m = 0.5 * geom.wavelength_m();
    geom.spacing_v_m = 0.5 * geom.wavelength_m();
    cfg.geometry = geom;

    SamplingGrid grid;
    grid.subcarrier_spacing_hz = 240e3;
    grid.n_subcarriers = 64;
    grid.first_subcarrier_hz =
        geom.carrier_hz - (grid.n_subcarriers / 2) * grid.subcarrier_spacing_hz;
    grid.sample_interval_s = 5e-4;
    grid.sample_times_s =
        uniform_sample_times(0.0, grid.sample_interval_s, 16);
    cfg.grid = grid;

    cfg.paths = PathGenSpec{};

    PencilConfig pencil;
    pencil.L = 6;
    pencil.R = 5;
    pencil.K = 32;
    pencil.Q = 8;
    pencil.gamma1 = 0.05;
    cfg.pencil = pencil;

    cfg.snr_db = {20.0};
    cfg.csi_delay_s = {0.016};
    cfg.antenna_sweep = {16, 64, 256};
    cfg.sample_sweep = {8, 16, 32};
    cfg.trials = 10;
    cfg.seed = 1;
    return cfg;
}

ScenarioConfig parse_scenario_config(const std::string &text) {
    // Raw values that need other keys before they can become library types.
    std::string scenario_id = "desk";
    int n_h = 8, n_v = 8;
    double spacing_h_wl = 0.5, spacing_v_wl = 0.5;
    double carrier_hz = 3.5e9;
    int n_subcarriers = 64;
    double subcarrier_spacing_hz = 240e3;
    double first_subcarrier_hz = 0.0; // <= 0 selects the centered band
    int n_samples = 16;
    double sample_interval_s = 5e-4;
    PathGenSpec paths;
    PencilConfig pencil;
    pencil.L = 6;
    pencil.R = 5;
    pencil.K = 32;
    pencil.Q = 8;
    pencil.gamma1 = 0.05;
    std::vector<double> snr_db = {20.0};
    std::vector<double> csi_delay_s = {0.016};
    std::vector<int> antenna_sweep = {16, 64, 256};
    std::vector<int> sample_sweep = {8, 16, 32};
    int trials = 10;
    std::uint64_t seed = 1;

    std::istringstream stream(text);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(stream, raw_line)) {
        ++line_no;
        std::string line = raw_line;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value' on line " +
                              std::to_string(line_no) + ": '" + raw_line +
                              "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("missing key on line " + std::to_string(line_no));
        }

        if (key == "scenario_id") {
            scenario_id = value;
        } else if (key == "n_h") {
            n_h = static_cast<int>(parse_int(key, value));
        } else if (key == "n_v") {
            n_v = static_cast<int>(parse_int(key, value));
        } else if (key == "spacing_h_wavelengths") {
            spacing_h_wl = parse_double(key, value);
        } else if (key == "spacing_v_wavelengths") {
            spacing_v_wl = parse_double(key, value);
        } else if (key == "carrier_hz") {
            carrier_hz = parse_double(key, value);
        } else if (key == "n_subcarriers") {
            n_subcarriers = static_cast<int>(parse_int(key, value));
        } else if (key == "subcarrier_spacing_hz") {
            subcarrier_spacing_hz = parse_double(key, value);
        } else if (key == "first_subcarrier_hz") {
            first_subcarrier_hz = parse_double(key, value);
        } else if (key == "n_samples") {
            n_samples = static_cast<int>(parse_int(key, value));
        } else if (key == "sample_interval_s") {
            sample_interval_s = parse_double(key, value);
        } else if (key == "paths") {
            paths.count = static_cast<int>(parse_int(key, value));
        } else if (key == "min_angle_separation_rad") {
            paths.min_angle_separation_rad = parse_double(key, value);
        } else if (key == "delay_min_s") {
            paths.delay_min_s = parse_double(key, value);
        } else if (key == "delay_max_s") {
            paths.delay_max_s = parse_double(key, value);
        } else if (key == "speed_mps") {
            paths.speed_mps = parse_double(key, value);
        } else if (key == "doppler_hz") {
            paths.doppler_hz = parse_double_list(key, value);
        } else if (key == "l_window") {
            pencil.L = static_cast<int>(parse_int(key, value));
        } else if (key == "r_window") {
            pencil.R = static_cast<int>(parse_int(key, value));
        } else if (key == "k_window") {
            pencil.K = static_cast<int>(parse_int(key, value));
        } else if (key == "q_window") {
            pencil.Q = static_cast<int>(parse_int(key, value));
        } else if (key == "gamma1") {
            pencil.gamma1 = parse_double(key, value);
        } else if (key == "snr_db") {
            snr_db = parse_double_list(key, value);
        } else if (key == "csi_delay_s") {
            csi_delay_s = parse_double_list(key, value);
        } else if (key == "antenna_sweep") {
            antenna_sweep = parse_int_list(key, value);
        } else if (key == "sample_sweep") {
            sample_sweep = parse_int_list(key, value);
        } else if (key == "trials") {
            trials = static_cast<int>(parse_int(key, value));
        } else if (key == "seed") {
            seed = parse_u64(key, value);
        } else {
            throw ConfigError("unknown config key '" + key + "' on line " +
                              std::to_string(line_no));
        }
    }

    if (carrier_hz <= 0.0) {
        throw ConfigError("carrier_hz must be positive");
    }

    ScenarioConfig cfg;
    cfg.scenario_id = scenario_id;

    ArrayGeometry geom;
    geom.n_h = n_h;
    geom.n_v = n_v;
    geom.carrier_hz = carrier_hz;
    geom.spacing_h_m = spacing_h_wl * geom.wavelength_m();
    geom.spacing_v_m = spacing_v_wl * geom.wavelength_m();
    cfg.geometry = geom;

    SamplingGrid grid;
    grid.subcarrier_spacing_hz = subcarrier_spacing_hz;
    grid.n_subcarriers = n_subcarriers;
    grid.first_subcarrier_hz =
        first_subcarrier_hz > 0.0
            ? first_subcarrier_hz
            : carrier_hz - (n_subcarriers / 2) * subcarrier_spacing_hz;
    grid.sample_interval_s = sample_interval_s;
    if (n_samples < 1) {
        throw ConfigError("n_samples must be >= 1");
    }
    grid.sample_times_s =
        uniform_sample_times(0.0, sample_interval_s, n_samples);
    cfg.grid = grid;

    cfg.paths = paths;
    cfg.pencil = pencil;
    cfg.snr_db = snr_db;
    cfg.csi_delay_s = csi_delay_s;
    cfg.antenna_sweep = antenna_sweep;
    cfg.sample_sweep = sample_sweep;
    cfg.trials = trials;
    cfg.seed = seed;
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading config file: " + path);
    }
    return parse_scenario_config(buffer.str());
}

std::string scenario_config_schema() {
    return R"(# Scenario configuration: flat `key = value` lines, '#' comments,
# lists comma-separated. Unknown keys are rejected. Defaults in brackets.
#
# scenario_id              label for the CSV rows; no commas [desk]
#
# -- panel geometry --
# n_h                      horizontal antenna count [8]
# n_v                      vertical antenna count [8]
# spacing_h_wavelengths    horizontal element spacing / wavelength [0.5]
# spacing_v_wavelengths    vertical element spacing / wavelength [0.5]
# carrier_hz               carrier frequency in Hz [3.5e9]
#
# -- sampling grid --
# n_subcarriers            subcarrier count [64]
# subcarrier_spacing_hz    subcarrier spacing in Hz [240e3]
# first_subcarrier_hz      lowest subcarrier; <= 0 centers the band on the
#                          carrier [0 -> centered]
# n_samples                time snapshots per trial [16]
# sample_interval_s        snapshot spacing in seconds [5e-4]
#
# -- random path generation (per trial) --
# paths                    path count [3]
# min_angle_separation_rad pairwise |dTheta|+|dPhi| floor [0.15]
# delay_min_s              smallest initial delay [1e-7]
# delay_max_s              largest initial delay [1.2e-6]
# speed_mps                mobile speed; per-path Doppler is drawn uniformly
#                          in +-speed/wavelength [8.3]
# doppler_hz               explicit per-path Doppler list; overrides
#                          speed_mps when non-empty, length must equal
#                          `paths` [empty]
#
# -- pencil windows --
# l_window                 horizontal antenna window L [6]
# r_window                 vertical antenna window R [5]
# k_window                 frequency window K [32]
# q_window                 time window Q [8]
# gamma1                   relative singular-value detection threshold,
#                          in (0, 1] [0.05]; raise toward 0.25 at low SNR,
#                          drop toward 1e-8 for noise-free runs
#
# -- sweep axes --
# snr_db                   per-element SNR list; `inf` means noise-free [20]
# csi_delay_s              prediction horizons t_tau in seconds [0.016]
# antenna_sweep            total element counts for the antennas axis; each
#                          must be a perfect square [16, 64, 256]
# sample_sweep             snapshot counts for the samples axis [8, 16, 32]
#
# -- execution --
# trials                   Monte-Carlo trials per cell [10]
# seed                     RNG seed; (config, seed) fixes every byte of
#                          output [1]
)";
}

void ScenarioConfig::validate() const {
    try {
        geometry.validate();
        grid.validate();
    } catch (const Error &e) {
        throw ConfigError(std::string("invalid geometry or grid: ") +
                          e.what());
    }
    if (scenario_id.find_first_of(",\r\n") != std::string::npos) {
        throw ConfigError("scenario_id must not contain commas or line breaks");
    }
    if (trials < 1) {
        throw ConfigError("trials must be >= 1");
    }
    if (paths.count < 1) {
        throw ConfigError("paths must be >= 1");
    }
    if (!(paths.min_angle_separation_rad >= 0.0) ||
        !std::isfinite(paths.min_angle_separation_rad)) {
        throw ConfigError("min_angle_separation_rad must be finite and >= 0");
    }
    if (!(paths.delay_min_s >= 0.0) ||
        !(paths.delay_max_s >= paths.delay_min_s)) {
        throw ConfigError("delay range invalid: need 0 <= delay_min_s <= "
                          "delay_max_s");
    }
    if (!std::isfinite(paths.speed_mps) || paths.speed_mps < 0.0) {
        throw ConfigError("speed_mps must be finite and >= 0");
    }
    if (!paths.doppler_hz.empty() &&
        static_cast<int>(paths.doppler_hz.size()) != paths.count) {
        throw ConfigError("doppler_hz list length must equal `paths`");
    }
    for (double w : paths.doppler_hz) {
        if (!std::isfinite(w)) {
            throw ConfigError("doppler_hz entries must be finite");
        }
    }
    if (!(pencil.gamma1 > 0.0) || pencil.gamma1 > 1.0) {
        throw ConfigError("gamma1 must lie in (0, 1]");
    }
    for (double s : snr_db) {
        if (std::isnan(s)) {
            throw ConfigError("snr_db entries must not be NaN");
        }
    }
    for (double d : csi_delay_s) {
        if (!std::isfinite(d) || d < 0.0) {
            throw ConfigError("csi_delay_s entries must be finite and >= 0");
        }
    }

    // Angle identifiability: spacings above half a wavelength alias.
    const double half_wave = 0.5 * geometry.wavelength_m();
    if (geometry.spacing_h_m > half_wave * (1.0 + 1e-9)) {
        throw ConfigError("horizontal element spacing exceeds half a "
                          "wavelength; angles would alias");
    }
    if (geometry.spacing_v_m > half_wave * (1.0 + 1e-9)) {
        throw ConfigError("vertical element spacing exceeds half a "
                          "wavelength; angles would alias");
    }

    // Structural window bounds (the two-snapshot time regime Q == N_s == 2
    // is the one allowed boundary case).
    const int n_s = static_cast<int>(grid.n_samples());
    if (pencil.L < 2 || pencil.L > geometry.n_h - 1) {
        throw ConfigError("l_window must satisfy 2 <= L <= N_h - 1");
    }
    if (pencil.R < 2 || pencil.R > geometry.n_v - 1) {
        throw ConfigError("r_window must satisfy 2 <= R <= N_v - 1");
    }
    if (pencil.K < 2 || pencil.K > grid.n_subcarriers - 1) {
        throw ConfigError("k_window must satisfy 2 <= K <= N_f - 1");
    }
    const bool two_sample = pencil.Q == 2 && n_s == 2;
    if (!two_sample && (pencil.Q < 2 || pencil.Q > n_s - 1)) {
        throw ConfigError("q_window must satisfy 2 <= Q <= N_s - 1 "
                          "(or Q == N_s == 2)");
    }

    // Pencil rank feasibility for the configured path count on both axes.
    const FeasibilityReport freq = feasibility_check(
        pencil, geometry.n_h, geometry.n_v, grid.n_subcarriers, paths.count,
        PencilMode::frequency);
    if (!freq.ok) {
        throw ConfigError("frequency-axis pencil infeasible: " +
                          join(freq.violations));
    }
    const FeasibilityReport time = feasibility_check(
        pencil, geometry.n_h, geometry.n_v, n_s, paths.count,
        PencilMode::temporal);
    if (!time.ok) {
        throw ConfigError("time-axis pencil infeasible: " +
                          join(time.violations));
    }

    // Doppler and delay identifiability over the whole prediction horizon.
    double omega_max = 0.0;
    if (paths.doppler_hz.empty()) {
        omega_max = paths.speed_mps / geometry.wavelength_m();
    } else {
        for (double w : paths.doppler_hz)
            omega_max = std::max(omega_max, std::abs(w));
    }
    if (omega_max * grid.sample_interval_s >= 0.5) {
        throw ConfigError("Doppler exceeds the time-axis alias limit "
                          "|omega| * T < 1/2");
    }
    double horizon = grid.sample_times_s.empty() ? 0.0
                                                 : grid.sample_times_s.back();
    for (double d : csi_delay_s) horizon = std::max(horizon,
        (grid.sample_times_s.empty() ? 0.0 : grid.sample_times_s.back()) + d);
    const double delay_window = 0.5 / grid.subcarrier_spacing_hz;
    const double rate_max = omega_max / geometry.carrier_hz;
    if (paths.delay_max_s + rate_max * horizon >= delay_window) {
        throw ConfigError("path delays can leave the unambiguous delay "
                          "window 1/(2*subcarrier_spacing) over the "
                          "prediction horizon");
    }
}

} // namespace mdmp
