// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: channel simulation, estimation, prediction, the
// antenna lower bound, and Monte-Carlo sweeps. Subcommands exchange data
// through CCT1 tensor files, versioned JSON documents, and CSV tables, so
// every stage can be scripted and reproduced byte-for-byte from
// (config, seed).

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdmp/bounds.hpp"
#include "mdmp/errors.hpp"
#include "mdmp/harness.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char *kEstimateSchema = "mdmp.estimate.v1";
constexpr const char *kBoundsSchema = "mdmp.bounds.v1";

// Shared scenario options: a config file, generic `--set key=value`
// overrides (any schema key), and a seed shortcut. Overrides are applied as
// extra config lines, so they get exactly the schema's parsing and checks.
struct ScenarioArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App *cmd) {
        cmd->add_option("--config", config_path,
                        "Scenario config file (see --print-schema)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--set", sets,
                        "Override any config key, e.g. --set trials=50")
            ->type_name("KEY=VALUE");
        cmd->add_option("--seed", seed, "Override the scenario seed");
    }

    mdmp::ScenarioConfig load() const {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in)
                throw mdmp::IoError("cannot open config file: " + config_path);
            std::ostringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }
        for (const std::string &kv : sets) {
            if (kv.find('=') == std::string::npos)
                throw mdmp::ConfigError("--set expects KEY=VALUE, got '" + kv +
                                        "'");
            text += "\n" + kv;
        }
        if (seed) text += "\nseed = " + std::to_string(*seed);
        return mdmp::parse_scenario_config(text);
    }
};

void write_text(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mdmp::IoError("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw mdmp::IoError("failed writing: " + path);
}

double json_number(const ordered_json &j, const char *key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw mdmp::FormatError(std::string("estimate JSON: missing numeric "
                                            "field '") + key + "'");
    return j.at(key).get<double>();
}

ordered_json estimate_to_json(const mdmp::EstimateSet &est) {
    ordered_json j;
    j["schema"] = kEstimateSchema;
    j["reference_s"] = est.reference_s;
    j["offdiag_residual"] = est.offdiag_residual;
    j["subspace_gap"] = est.subspace_gap;
    j["paths"] = ordered_json::array();
    for (const mdmp::PathEstimate &p : est.paths) {
        ordered_json path;
        path["theta_rad"] = p.theta_rad;
        path["phi_rad"] = p.phi_rad;
        path["tau_ref_s"] = p.tau_ref_s;
        path["k_tau"] = p.k_tau;
        path["omega_hz"] = p.omega_hz;
        path["gain_re"] = p.gain.real();
        path["gain_im"] = p.gain.imag();
        j["paths"].push_back(path);
    }
    return j;
}

mdmp::EstimateSet estimate_from_json(const ordered_json &j) {
    if (!j.contains("schema") || !j.at("schema").is_string() ||
        j.at("schema").get<std::string>() != kEstimateSchema)
        throw mdmp::FormatError(std::string("estimate JSON: expected schema "
                                            "'") + kEstimateSchema + "'");
    mdmp::EstimateSet est;
    est.reference_s = json_number(j, "reference_s");
    est.offdiag_residual = json_number(j, "offdiag_residual");
    est.subspace_gap = json_number(j, "subspace_gap");
    if (!j.contains("paths") || !j.at("paths").is_array())
        throw mdmp::FormatError("estimate JSON: missing 'paths' array");
    for (const ordered_json &p : j.at("paths")) {
        mdmp::PathEstimate path;
        path.theta_rad = json_number(p, "theta_rad");
        path.phi_rad = json_number(p, "phi_rad");
        path.tau_ref_s = json_number(p, "tau_ref_s");
        path.k_tau = json_number(p, "k_tau");
        path.omega_hz = json_number(p, "omega_hz");
        path.gain = {json_number(p, "gain_re"), json_number(p, "gain_im")};
        est.paths.push_back(path);
    }
    return est;
}

ordered_json load_json(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mdmp::IoError("cannot open JSON file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception &e) {
        throw mdmp::FormatError(std::string("malformed JSON in ") + path +
                                ": " + e.what());
    }
    return j;
}

// Replaces non-finite doubles by null explicitly, so skipped bound
// candidates serialize the same way on every platform.
ordered_json finite_or_null(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

int run_simulate(const ScenarioArgs &args, double snr_db, int trial,
                 const std::string &out_path) {
    const mdmp::ScenarioConfig cfg = args.load();
    cfg.validate();
    mdmp::Rng path_rng(mdmp::derive_stream(
        cfg.seed, {1000 + static_cast<std::uint64_t>(trial)}));
    const std::vector<mdmp::PathTruth> paths =
        mdmp::draw_paths(cfg.paths, cfg.geometry, path_rng);
    const mdmp::ComplexTensor clean =
        mdmp::channel_trajectory(cfg.geometry, cfg.grid, paths);
    const mdmp::ComplexTensor noisy = mdmp::add_awgn(
        clean, snr_db,
        mdmp::derive_stream(cfg.seed,
                            {7, 0, static_cast<std::uint64_t>(trial)}));
    mdmp::write_cct(noisy, out_path);
    std::cerr << "wrote " << out_path << " (" << cfg.geometry.n_h << "x"
              << cfg.geometry.n_v << " panel, " << cfg.grid.n_subcarriers
              << " subcarriers, " << cfg.grid.n_samples() << " snapshots)\n";
    return 0;
}

int run_estimate(const ScenarioArgs &args, const std::string &in_path,
                 const std::string &out_path) {
    const mdmp::ScenarioConfig cfg = args.load();
    cfg.validate();
    const mdmp::ComplexTensor trajectory = mdmp::read_cct(in_path);
    const mdmp::EstimateSet est = mdmp::estimate_trajectory(
        trajectory, cfg.geometry, cfg.grid, cfg.pencil);
    write_text(out_path, estimate_to_json(est).dump(2) + "\n");
    return 0;
}

int run_predict(const ScenarioArgs &args, const std::string &in_path,
                double t_target_s, const std::string &out_path) {
    const mdmp::ScenarioConfig cfg = args.load();
    cfg.validate();
    const mdmp::EstimateSet est = estimate_from_json(load_json(in_path));
    const mdmp::ComplexTensor predicted =
        mdmp::predict_channel(est, cfg.geometry, cfg.grid, t_target_s);
    mdmp::write_cct(predicted, out_path);
    return 0;
}

int run_bounds(int n_v, int n_s, int q, int p, std::optional<int> oracle_max,
               const std::string &out_path) {
    mdmp::BoundInputs inputs;
    inputs.n_v = n_v;
    inputs.n_s = n_s;
    inputs.q = q;
    inputs.p = p;
    const mdmp::BoundReport report = mdmp::lower_bound_nt(inputs);

    ordered_json j;
    j["schema"] = kBoundsSchema;
    j["inputs"] = {{"n_v", n_v}, {"n_s", n_s}, {"q", q}, {"p", p}};
    j["f1"] = report.f1;
    j["f2"] = report.f2;
    j["bound_n_t"] = report.bound;
    j["n_h_lower_bound"] =
        static_cast<int>(std::ceil(report.bound / n_v - 1e-12));
    j["extreme_points"] = ordered_json::array();
    for (const mdmp::BoundCandidate &c : report.extreme_points) {
        ordered_json cand;
        cand["label"] = c.label;
        cand["l"] = finite_or_null(c.l);
        cand["r"] = finite_or_null(c.r);
        cand["value"] = finite_or_null(c.value);
        cand["used"] = c.used;
        cand["note"] = c.note;
        j["extreme_points"].push_back(cand);
    }
    j["notes"] = report.notes;
    if (oracle_max) {
        const std::optional<int> oracle =
            mdmp::smallest_feasible_n_h(inputs, *oracle_max);
        j["oracle_n_h"] = oracle ? ordered_json(*oracle) : nullptr;
        j["oracle_n_h_max"] = *oracle_max;
    }
    write_text(out_path, j.dump(2) + "\n");
    return 0;
}

int run_sweep(const ScenarioArgs &args, const std::string &axis_name,
              const std::string &out_path, int workers) {
    const mdmp::ScenarioConfig cfg = args.load();
    const mdmp::SweepAxis axis = mdmp::parse_sweep_axis(axis_name);
    mdmp::sweep(cfg, axis, out_path, workers);
    std::cerr << "wrote " << out_path << " (axis " << axis_name << ", "
              << cfg.trials << " trial(s) per cell)\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{
        "mdmp: matrix-pencil channel estimation and prediction toolkit"};
    app.require_subcommand(0, 1);
    bool print_schema = false;
    app.add_flag("--print-schema", print_schema,
                 "Print the scenario config key reference and exit");

    // simulate
    CLI::App *sim = app.add_subcommand(
        "simulate", "Synthesize a (noisy) channel trajectory as a CCT1 file");
    ScenarioArgs sim_args;
    sim_args.attach(sim);
    double sim_snr = std::numeric_limits<double>::infinity();
    int sim_trial = 0;
    std::string sim_out;
    sim->add_option("--snr", sim_snr,
                    "Per-element SNR in dB (default: noise-free)");
    sim->add_option("--trial", sim_trial,
                    "Trial index selecting the path draw (default 0)");
    sim->add_option("--out", sim_out, "Output CCT1 path")->required();

    // estimate
    CLI::App *est = app.add_subcommand(
        "estimate",
        "Run the full estimation pipeline on a CCT1 trajectory, emit JSON");
    ScenarioArgs est_args;
    est_args.attach(est);
    std::string est_in, est_out = "-";
    est->add_option("--in", est_in, "Input CCT1 trajectory")
        ->required()
        ->check(CLI::ExistingFile);
    est->add_option("--out", est_out, "Output JSON path ('-' for stdout)");

    // predict
    CLI::App *pred = app.add_subcommand(
        "predict", "Reconstruct the channel at a target time from an "
                   "estimate JSON, emit CCT1");
    ScenarioArgs pred_args;
    pred_args.attach(pred);
    std::string pred_in, pred_out;
    double pred_at = 0.0;
    pred->add_option("--in", pred_in, "Input estimate JSON")
        ->required()
        ->check(CLI::ExistingFile);
    pred->add_option("--at", pred_at, "Target time in seconds")->required();
    pred->add_option("--out", pred_out, "Output CCT1 path")->required();

    // bounds
    CLI::App *bnd = app.add_subcommand(
        "bounds", "Antenna lower bound for given N_v, N_s, Q, P, as JSON");
    int bnd_nv = 0, bnd_ns = 0, bnd_q = 0, bnd_p = 0;
    std::optional<int> bnd_oracle_max;
    std::string bnd_out = "-";
    bnd->add_option("--n-v", bnd_nv, "Vertical antenna count")->required();
    bnd->add_option("--n-s", bnd_ns, "Time sample count")->required();
    bnd->add_option("--q", bnd_q, "Time window Q")->required();
    bnd->add_option("--p", bnd_p, "Path count P")->required();
    bnd->add_option("--oracle-max", bnd_oracle_max,
                    "Also search the smallest feasible N_h up to this value");
    bnd->add_option("--out", bnd_out, "Output JSON path ('-' for stdout)");

    // sweep
    CLI::App *swp = app.add_subcommand(
        "sweep", "Monte-Carlo sweep over one axis, emit a metrics CSV");
    ScenarioArgs swp_args;
    swp_args.attach(swp);
    std::string swp_axis, swp_out;
    int swp_workers = 1;
    swp->add_option("--axis", swp_axis,
                    "Swept axis: snr, csi_delay, antennas, or samples")
        ->required();
    swp->add_option("--out", swp_out, "Output CSV path")->required();
    swp->add_option("--workers", swp_workers,
                    "Worker thread count (default 1)")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (print_schema) {
        std::cout << mdmp::scenario_config_schema();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 1;
    }

    try {
        if (*sim) return run_simulate(sim_args, sim_snr, sim_trial, sim_out);
        if (*est) return run_estimate(est_args, est_in, est_out);
        if (*pred) return run_predict(pred_args, pred_in, pred_at, pred_out);
        if (*bnd)
            return run_bounds(bnd_nv, bnd_ns, bnd_q, bnd_p, bnd_oracle_max,
                              bnd_out);
        if (*swp) return run_sweep(swp_args, swp_axis, swp_out, swp_workers);
    } catch (const mdmp::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
