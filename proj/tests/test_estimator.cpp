// SPDX-License-Identifier: Apache-2.0
//
// Tests for path detection, subspace extraction, the shift-invariance solves,
// joint diagonalization, the eigenvalue decoders, and the two estimation
// runs. Closed-form single-path tangents and brute-force assignment
// enumeration serve as independent oracles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include <doctest.h>
#include <Eigen/Dense>

#include "mdmp/channel.hpp"
#include "mdmp/errors.hpp"
#include "mdmp/estimator.hpp"
#include "mdmp/matching.hpp"
#include "mdmp/pencil.hpp"
#include "mdmp/rng.hpp"
#include "mdmp/unitary.hpp"

using namespace mdmp;

namespace {

constexpr double kPi = std::numbers::pi;

double deg(double d) { return d * kPi / 180.0; }

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

ArrayGeometry half_wave_panel(int n_h, int n_v, double carrier_hz = 3.5e9) {
    ArrayGeometry geom;
    geom.n_h = n_h;
    geom.n_v = n_v;
    geom.carrier_hz = carrier_hz;
    geom.spacing_h_m = 0.5 * geom.wavelength_m();
    geom.spacing_v_m = 0.5 * geom.wavelength_m();
    return geom;
}

SamplingGrid make_grid(int n_subcarriers, double spacing_hz = 240e3,
                       double first_hz = 3.5e9) {
    SamplingGrid grid;
    grid.first_subcarrier_hz = first_hz;
    grid.subcarrier_spacing_hz = spacing_hz;
    grid.n_subcarriers = n_subcarriers;
    return grid;
}

PathTruth make_path(double theta_deg, double phi_deg, double tau_us,
                    double doppler_hz, std::complex<double> gain,
                    double carrier_hz = 3.5e9) {
    PathTruth p;
    p.theta_rad = deg(theta_deg);
    p.phi_rad = deg(phi_deg);
    p.delay0_s = tau_us * 1e-6;
    p.doppler_hz = doppler_hz;
    p.delay_rate = -doppler_hz / carrier_hz;
    p.gain = gain;
    return p;
}

// Frequency-domain subspace of a snapshot, exercising the production chain
// up to (but not including) the shift solves.
SubspaceBundle freq_subspace(const ComplexTensor &snapshot,
                             const PencilConfig &cfg) {
    const Eigen::MatrixXcd g = build_G3_freq(snapshot, cfg, 1);
    return signal_subspace(to_real_pencil(g), cfg.gamma1);
}

std::vector<double> sorted_real_eigenvalues(const Eigen::MatrixXd &m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        CHECK(std::abs(es.eigenvalues()(i).imag()) <
              1e-9 * std::max(1.0, std::abs(es.eigenvalues()(i))));
        out.push_back(es.eigenvalues()(i).real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Exhaustive minimum-cost assignment for small n.
double brute_force_assignment_cost(const Eigen::MatrixXd &cost) {
    std::vector<int> perm(static_cast<std::size_t>(cost.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (Eigen::Index i = 0; i < cost.rows(); ++i)
            total += cost(i, perm[static_cast<std::size_t>(i)]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace

TEST_CASE("path count detection follows the relative threshold") {
    Eigen::VectorXd s1(3);
    s1 << 1.0, 1e-14, 1e-15;
    CHECK(detect_paths(s1, 1e-6) == 1);

    Eigen::VectorXd s2(4);
    s2 << 1.0, 0.5, 0.3, 1e-12;
    CHECK(detect_paths(s2, 1e-6) == 3);

    Eigen::VectorXd zeros = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(detect_paths(zeros, 1e-6), AllZeroError);

    SUBCASE("threshold boundary is inclusive") {
        Eigen::VectorXd s(2);
        s << 1.0, 0.5;
        CHECK(detect_paths(s, 0.5) == 2);
        CHECK(detect_paths(s, 0.5000001) == 1);
    }
    SUBCASE("malformed input is rejected") {
        Eigen::VectorXd increasing(2);
        increasing << 0.5, 1.0;
        CHECK_THROWS_AS(detect_paths(increasing, 1e-3), DomainError);
        Eigen::VectorXd negative(2);
        negative << 1.0, -0.1;
        CHECK_THROWS_AS(detect_paths(negative, 1e-3), DomainError);
        Eigen::VectorXd empty(0);
        CHECK_THROWS_AS(detect_paths(empty, 1e-3), DomainError);
        Eigen::VectorXd fine(1);
        fine << 1.0;
        CHECK_THROWS_AS(detect_paths(fine, 0.0), DomainError);
        CHECK_THROWS_AS(detect_paths(fine, 1.5), DomainError);
    }
}

TEST_CASE("assignment solver matches brute-force enumeration") {
    SUBCASE("identity and anti-diagonal structure") {
        Eigen::MatrixXd c(2, 2);
        c << 0.0, 5.0, 5.0, 0.0;
        CHECK(min_cost_assignment(c) == std::vector<int>{0, 1});
        c << 5.0, 0.0, 0.0, 5.0;
        CHECK(min_cost_assignment(c) == std::vector<int>{1, 0});
    }
    SUBCASE("known 3x3 instance") {
        Eigen::MatrixXd c(3, 3);
        c << 4.0, 1.0, 3.0, //
            2.0, 0.0, 5.0,  //
            3.0, 2.0, 2.0;
        const std::vector<int> sigma = min_cost_assignment(c);
        double total = 0.0;
        for (int i = 0; i < 3; ++i)
            total += c(i, sigma[static_cast<std::size_t>(i)]);
        CHECK(total == doctest::Approx(5.0));
    }
    SUBCASE("random instances equal the enumerated optimum") {
        Rng rng(421);
        for (int rep = 0; rep < 40; ++rep) {
            const int n = 1 + static_cast<int>(rng.uniform01() * 6.0);
            Eigen::MatrixXd c(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    c(i, j) = rng.uniform01() * 10.0;
            const std::vector<int> sigma = min_cost_assignment(c);
            std::vector<bool> used(static_cast<std::size_t>(n), false);
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                const int j = sigma[static_cast<std::size_t>(i)];
                REQUIRE(j >= 0);
                REQUIRE(j < n);
                CHECK(!used[static_cast<std::size_t>(j)]);
                used[static_cast<std::size_t>(j)] = true;
                total += c(i, j);
            }
            CHECK(total == doctest::Approx(brute_force_assignment_cost(c))
                               .epsilon(1e-12));
        }
    }
    SUBCASE("input validation") {
        CHECK(min_cost_assignment(Eigen::MatrixXd(0, 0)).empty());
        CHECK_THROWS_AS(min_cost_assignment(Eigen::MatrixXd::Zero(2, 3)),
                        DimMismatchError);
        Eigen::MatrixXd nan2 = Eigen::MatrixXd::Zero(2, 2);
        nan2(1, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(min_cost_assignment(nan2), NonFiniteError);
        CHECK_THROWS_AS(min_cost_assignment(Eigen::MatrixXd::Zero(21, 21)),
                        DomainError);
    }
}

TEST_CASE("single-path shift matrices reproduce the axis tangents") {
    const ArrayGeometry geom = half_wave_panel(4, 4);
    const SamplingGrid grid = make_grid(8);
    const PathTruth path =
        make_path(35.0, -25.0, 0.8, 0.0, {1.3, -0.4});
    const ComplexTensor snap = channel_snapshot(geom, grid, {path}, 0.0);

    PencilConfig cfg;
    cfg.L = 2;
    cfg.R = 2;
    cfg.K = 3;
    cfg.Q = 2;
    cfg.gamma1 = 1e-8;

    const SubspaceBundle bundle = freq_subspace(snap, cfg);
    REQUIRE(bundle.n_paths == 1);

    SUBCASE("subspace columns are orthonormal") {
        const Eigen::MatrixXd gram =
            bundle.u_s.transpose() * bundle.u_s;
        CHECK(std::abs(gram(0, 0) - 1.0) < 1e-10);
    }

    SUBCASE("delay axis") {
        const Eigen::MatrixXd psi =
            psi_matrix(bundle.u_s, selection_J(1, cfg.L, cfg.R, cfg.K));
        REQUIRE(psi.rows() == 1);
        REQUIRE(psi.cols() == 1);
        const double want =
            std::tan(kPi * grid.subcarrier_spacing_hz * path.delay0_s);
        CHECK(std::abs(psi(0, 0) - want) < 1e-10);
    }
    SUBCASE("horizontal antenna axis carries the opposite sign") {
        const Eigen::MatrixXd psi =
            psi_matrix(bundle.u_s, selection_J(2, cfg.L, cfg.R, cfg.K));
        const double want =
            -std::tan(kPi * geom.spacing_h_m * std::cos(path.theta_rad) *
                      std::sin(path.phi_rad) / geom.wavelength_m());
        CHECK(std::abs(psi(0, 0) - want) < 1e-10);
    }
    SUBCASE("vertical antenna axis carries the opposite sign") {
        const Eigen::MatrixXd psi =
            psi_matrix(bundle.u_s, selection_J(3, cfg.L, cfg.R, cfg.K));
        const double want = -std::tan(kPi * geom.spacing_v_m *
                                      std::sin(path.theta_rad) /
                                      geom.wavelength_m());
        CHECK(std::abs(psi(0, 0) - want) < 1e-10);
    }
}

TEST_CASE("shift solve is invariant under a change of subspace basis") {
    const ArrayGeometry geom = half_wave_panel(4, 4);
    const SamplingGrid grid = make_grid(8);
    const std::vector<PathTruth> paths = {
        make_path(20.0, 40.0, 0.5, 0.0, {1.0, 0.2}),
        make_path(-30.0, -10.0, 1.2, 0.0, {0.7, -0.9}),
    };
    const ComplexTensor snap = channel_snapshot(geom, grid, paths, 0.0);

    PencilConfig cfg;
    cfg.L = 2;
    cfg.R = 2;
    cfg.K = 3;
    cfg.Q = 2;
    cfg.gamma1 = 1e-8;

    const SubspaceBundle bundle = freq_subspace(snap, cfg);
    REQUIRE(bundle.n_paths == 2);
    const std::vector<std::size_t> sel = selection_J(1, cfg.L, cfg.R, cfg.K);

    Eigen::MatrixXd gamma(2, 2);
    gamma << 1.3, -0.4, 0.7, 2.1;
    const Eigen::MatrixXd psi_a = psi_matrix(bundle.u_s, sel);
    const Eigen::MatrixXd psi_b = psi_matrix(bundle.u_s * gamma, sel);

    const std::vector<double> za = sorted_real_eigenvalues(psi_a);
    const std::vector<double> zb = sorted_real_eigenvalues(psi_b);
    REQUIRE(za.size() == 2);
    for (std::size_t i = 0; i < za.size(); ++i)
        CHECK(std::abs(za[i] - zb[i]) < 1e-9);

    SUBCASE("eigenvalues decode to the true delays") {
        std::vector<double> taus;
        for (double z : za)
            taus.push_back(decode_delay(z, grid.subcarrier_spacing_hz).delay_s);
        std::sort(taus.begin(), taus.end());
        CHECK(rel_err(taus[0], 0.5e-6) < 1e-9);
        CHECK(rel_err(taus[1], 1.2e-6) < 1e-9);
    }
}

TEST_CASE("degenerate subspaces are rejected") {
    const ArrayGeometry geom = half_wave_panel(4, 4);
    const SamplingGrid grid = make_grid(8);
    PencilConfig cfg;
    cfg.L = 2;
    cfg.R = 2;
    cfg.K = 3;
    cfg.Q = 2;
    cfg.gamma1 = 1e-8;

    SUBCASE("duplicated basis column makes the solve singular") {
        const PathTruth path = make_path(35.0, -25.0, 0.8, 0.0, {1.0, 0.0});
        const ComplexTensor snap = channel_snapshot(geom, grid, {path}, 0.0);
        const SubspaceBundle bundle = freq_subspace(snap, cfg);
        Eigen::MatrixXd dup(bundle.u_s.rows(), 2);
        dup.col(0) = bundle.u_s.col(0);
        dup.col(1) = bundle.u_s.col(0);
        CHECK_THROWS_AS(
            psi_matrix(dup, selection_J(1, cfg.L, cfg.R, cfg.K)),
            RankDeficientError);
    }
    SUBCASE("two coincident paths do not span a second dimension") {
        const std::vector<PathTruth> twins = {
            make_path(35.0, -25.0, 0.8, 0.0, {1.0, 0.0}),
            make_path(35.0, -25.0, 0.8, 0.0, {-0.4, 0.6}),
        };
        const ComplexTensor snap = channel_snapshot(geom, grid, twins, 0.0);
        const Eigen::MatrixXd re =
            to_real_pencil(build_G3_freq(snap, cfg, 1));
        CHECK_THROWS_AS(signal_subspace_fixed(re, 2), RankDeficientError);
    }
    SUBCASE("selector validation") {
        Eigen::MatrixXd u = Eigen::MatrixXd::Identity(6, 2);
        CHECK_THROWS_AS(psi_matrix(u, {}), RankDeficientError);
        CHECK_THROWS_AS(psi_matrix(u, {0, 6}), DimMismatchError);
        CHECK_THROWS_AS(psi_matrix(Eigen::MatrixXd(0, 0), {0}),
                        DimMismatchError);
    }
    SUBCASE("fixed path count validation") {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
        CHECK_THROWS_AS(signal_subspace_fixed(m, 0), DomainError);
        CHECK_THROWS_AS(signal_subspace_fixed(m, 5), DomainError);
        CHECK_THROWS_AS(signal_subspace_fixed(Eigen::MatrixXd::Zero(4, 4), 1),
                        AllZeroError);
        CHECK(signal_subspace_fixed(m, 4).n_paths == 4);
    }
}

TEST_CASE("joint diagonalization recovers shared structure") {
    SUBCASE("already-diagonal pair") {
        Eigen::MatrixXd primary = Eigen::MatrixXd::Zero(2, 2);
        primary(0, 0) = 0.7;
        primary(1, 1) = -0.3;
        Eigen::MatrixXd secondary = Eigen::MatrixXd::Zero(2, 2);
        secondary(0, 0) = 2.0;
        secondary(1, 1) = -1.0;
        const EigenSolution sol = joint_diagonalize(primary, {secondary});
        REQUIRE(sol.z_primary.size() == 2);
        CHECK(sol.z_primary[0] == doctest::Approx(-0.3).epsilon(1e-14));
        CHECK(sol.z_primary[1] == doctest::Approx(0.7).epsilon(1e-14));
        CHECK(sol.z_secondary[0][0] == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(sol.z_secondary[0][1] == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(sol.offdiag_residual < 1e-14);
    }
    SUBCASE("similarity-scrambled pair") {
        Rng rng(99);
        Eigen::MatrixXd t(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t(i, j) = (i == j ? 1.0 : 0.0) + 0.3 * (rng.uniform01() - 0.5);
        const Eigen::MatrixXd t_inv = t.inverse();
        Eigen::VectorXd dp(3), ds(3);
        dp << -0.8, 0.1, 0.9;
        ds << 0.4, -0.6, 0.2;
        const Eigen::MatrixXd primary = t * dp.asDiagonal() * t_inv;
        const Eigen::MatrixXd secondary = t * ds.asDiagonal() * t_inv;
        const EigenSolution sol = joint_diagonalize(primary, {secondary});
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(sol.z_primary[static_cast<std::size_t>(i)] -
                           dp(i)) < 1e-10);
            CHECK(std::abs(sol.z_secondary[0][static_cast<std::size_t>(i)] -
                           ds(i)) < 1e-10);
        }
        CHECK(sol.offdiag_residual < 1e-10);
    }
    SUBCASE("one-by-one system and empty secondary list") {
        Eigen::MatrixXd p(1, 1);
        p << 0.5;
        const EigenSolution sol = joint_diagonalize(p, {});
        CHECK(sol.z_primary[0] == doctest::Approx(0.5));
        CHECK(sol.z_secondary.empty());
    }
    SUBCASE("rotation matrix has complex eigenvalues") {
        Eigen::MatrixXd rot(2, 2);
        rot << 0.0, -1.0, 1.0, 0.0;
        CHECK_THROWS_AS(joint_diagonalize(rot, {}), ComplexEigenvaluesError);
    }
    SUBCASE("defective matrix yields a singular eigenvector set") {
        Eigen::MatrixXd jordan(2, 2);
        jordan << 0.0, 1.0, 0.0, 0.0;
        CHECK_THROWS_AS(joint_diagonalize(jordan, {}), RankDeficientError);
    }
    SUBCASE("shape validation") {
        Eigen::MatrixXd p = Eigen::MatrixXd::Identity(2, 2);
        CHECK_THROWS_AS(joint_diagonalize(Eigen::MatrixXd(0, 0), {}),
                        DimMismatchError);
        CHECK_THROWS_AS(
            joint_diagonalize(p, {Eigen::MatrixXd::Identity(3, 3)}),
            DimMismatchError);
    }
}

TEST_CASE("decoders follow the closed forms") {
    SUBCASE("delay") {
        CHECK(decode_delay(0.0, 30e3).delay_s == 0.0);
        CHECK(!decode_delay(0.0, 30e3).saturated);

        const double z = std::tan(kPi * 30e3 * 2e-6);
        CHECK(z == doctest::Approx(0.19076).epsilon(1e-4));
        const DelayDecode d = decode_delay(z, 30e3);
        CHECK(rel_err(d.delay_s, 2e-6) < 1e-12);
        CHECK(!d.saturated);

        const DelayDecode hi = decode_delay(2e12, 30e3);
        CHECK(hi.saturated);
        CHECK(hi.delay_s == 0.5 / 30e3);
        const DelayDecode lo =
            decode_delay(-std::numeric_limits<double>::infinity(), 30e3);
        CHECK(lo.saturated);
        CHECK(lo.delay_s == -0.5 / 30e3);

        CHECK_THROWS_AS(
            decode_delay(std::numeric_limits<double>::quiet_NaN(), 30e3),
            NonFiniteError);
        CHECK_THROWS_AS(decode_delay(0.0, 0.0), DomainError);
    }
    SUBCASE("angles round-trip") {
        ArrayGeometry geom = half_wave_panel(4, 4);
        geom.spacing_v_m = 0.8 * geom.wavelength_m();
        geom.spacing_h_m = 0.5 * geom.wavelength_m();
        const auto [t0, p0] = decode_angles(0.0, 0.0, geom);
        CHECK(t0 == 0.0);
        CHECK(p0 == 0.0);

        const double theta = deg(30.0);
        const double phi = deg(20.0);
        const double z_theta = std::tan(kPi * geom.spacing_v_m *
                                        std::sin(theta) / geom.wavelength_m());
        const double z_phi =
            std::tan(kPi * geom.spacing_h_m * std::cos(theta) *
                     std::sin(phi) / geom.wavelength_m());
        const auto [th, ph] = decode_angles(z_theta, z_phi, geom);
        CHECK(std::abs(th - theta) < 1e-10);
        CHECK(std::abs(ph - phi) < 1e-10);
    }
    SUBCASE("angles outside the unit disc are rejected") {
        ArrayGeometry geom = half_wave_panel(4, 4);
        geom.spacing_v_m = 0.3 * geom.wavelength_m();
        geom.spacing_h_m = 0.3 * geom.wavelength_m();
        // arctan(z)·λ/(π d_v) = 1.5 for this spacing.
        const double z_bad = std::tan(1.5 * kPi * 0.3);
        CHECK_THROWS_AS(decode_angles(z_bad, 0.0, geom), DomainError);
        CHECK_THROWS_AS(decode_angles(0.0, z_bad, geom), DomainError);
        CHECK_THROWS_AS(
            decode_angles(std::numeric_limits<double>::quiet_NaN(), 0.0,
                          geom),
            NonFiniteError);
        // Within the clip tolerance: decodes to the window edge.
        const double z_edge = std::tan(kPi * 0.3 * (1.0 + 1e-10));
        const auto [th, ph] = decode_angles(z_edge, 0.0, geom);
        CHECK(th == doctest::Approx(kPi / 2).epsilon(1e-6));
        CHECK(ph == 0.0);
    }
    SUBCASE("composite Doppler") {
        CHECK(decode_doppler(0.0, 5e-4) == 0.0);
        const double z = -std::tan(kPi * 200.0 * 5e-4);
        CHECK(rel_err(decode_doppler(z, 5e-4), 200.0) < 1e-10);
        // Saturation is monotone and silent.
        const double near_edge = decode_doppler(1e15, 5e-4);
        CHECK(std::abs(near_edge) <= 0.5 / 5e-4);
        CHECK(std::abs(near_edge) > 0.4999 / 5e-4);
        CHECK_THROWS_AS(
            decode_doppler(std::numeric_limits<double>::quiet_NaN(), 5e-4),
            NonFiniteError);
        CHECK_THROWS_AS(decode_doppler(0.0, 0.0), DomainError);
    }
}

TEST_CASE("two-snapshot estimation recovers a static path exactly") {
    const ArrayGeometry geom = half_wave_panel(4, 4);
    const SamplingGrid grid = make_grid(8);
    const PathTruth path = make_path(25.0, -40.0, 0.9, 0.0, {0.8, 0.45});

    PencilConfig cfg;
    cfg.L = 2;
    cfg.R = 2;
    cfg.K = 3;
    cfg.Q = 2;
    cfg.gamma1 = 1e-8;

    const ComplexTensor s1 = channel_snapshot(geom, grid, {path}, 0.0);
    const ComplexTensor s2 = channel_snapshot(geom, grid, {path}, 1e-3);
    const AngleDelayEstimates est =
        estimate_angle_delay(s1, s2, 0.0, 1e-3, geom, grid, cfg);

    REQUIRE(est.n_paths() == 1);
    CHECK(std::abs(est.theta_rad[0] - path.theta_rad) < 1e-9);
    CHECK(std::abs(est.phi_rad[0] - path.phi_rad) < 1e-9);
    CHECK(rel_err(est.tau_t1_s[0], path.delay0_s) < 1e-9);
    CHECK(rel_err(est.tau_t2_s[0], path.delay0_s) < 1e-9);
    CHECK(std::abs(est.k_tau[0]) < 1e-12);
    CHECK(est.t1_s == 0.0);
    CHECK(est.t2_s == 1e-3);
    CHECK(est.subspace_gap < 1e-8);
    CHECK(!est.delay_saturated);
}

TEST_CASE("three moving paths decode within relative tolerance") {
    const ArrayGeometry geom = half_wave_panel(8, 8);
    const SamplingGrid grid = make_grid(32);
    const std::vector<PathTruth> paths = {
        make_path(-40.0, -60.0, 0.3, 300.0, {1.2, -0.7}),
        make_path(10.0, 20.0, 0.9, -200.0, {0.8, 0.45}),
        make_path(45.0, 70.0, 1.5, 120.0, {-0.5, 1.1}),
    };

    PencilConfig cfg;
    cfg.L = 4;
    cfg.R = 4;
    cfg.K = 8;
    cfg.Q = 2;
    cfg.gamma1 = 1e-8;

    const double t1 = 0.0;
    const double t2 = 1e-3;
    const ComplexTensor s1 = channel_snapshot(geom, grid, paths, t1);
    const ComplexTensor s2 = channel_snapshot(geom, grid, paths, t2);
    const AngleDelayEstimates est =
        estimate_angle_delay(s1, s2, t1, t2, geom, grid, cfg);

    REQUIRE(est.n_paths() == 3);
    CHECK(est.offdiag_residual < 1e-8);
    // Output order is ascending delay; the truth list is already sorted so.
    for (int p = 0; p < 3; ++p) {
        const std::size_t i = static_cast<std::size_t>(p);
        const PathTruth &truth = paths[i];
        CHECK(rel_err(est.theta_rad[i], truth.theta_rad) < 1e-6);
        CHECK(rel_err(est.phi_rad[i], truth.phi_rad) < 1e-6);
        CHECK(rel_err(est.tau_t1_s[i], path_delay_at(truth, t1)) < 1e-6);
        CHECK(rel_err(est.tau_t2_s[i], path_delay_at(truth, t2)) < 1e-6);
        CHECK(rel_err(est.k_tau[i], truth.delay_rate) < 1e-6);
    }
}

TEST_CASE("estimation input validation") {
    const ArrayGeometry geom = half_wave_panel(4, 4);
    const SamplingGrid grid = make_grid(8);
    const PathTruth path = make_path(25.0, -40.0, 0.9, 0.0, {1.0, 0.0});
    const ComplexTensor snap = channel_snapshot(geom, grid, {path}, 0.0);

    PencilConfig cfg;
    cfg.L = 2;
    cfg.R = 2;
    cfg.K = 3;
    cfg.Q = 2;
    cfg.gamma1 = 1e-8;

    SUBCASE("identical timestamps") {
        CHECK_THROWS_AS(
            estimate_angle_delay(snap, snap, 1e-3, 1e-3, geom, grid, cfg),
            DomainError);
    }
    SUBCASE("non-finite timestamps") {
        CHECK_THROWS_AS(
            estimate_angle_delay(snap, snap, 0.0,
                                 std::numeric_limits<double>::infinity(),
                                 geom, grid, cfg),
            NonFiniteError);
    }
    SUBCASE("geometry mismatch") {
        const ArrayGeometry other = half_wave_panel(5, 4);
        CHECK_THROWS_AS(
            estimate_angle_delay(snap, snap, 0.0, 1e-3, other, grid, cfg),
            DimMismatchError);
    }
    SUBCASE("detected path counts must agree") {
        const std::vector<PathTruth> pair = {
            make_path(20.0, 40.0, 0.5, 0.0, {1.0, 0.0}),
            make_path(-30.0, -10.0, 1.2, 0.0, {1.0, 0.0}),
        };
        const ComplexTensor one = channel_snapshot(geom, grid, {pair[0]}, 0.0);
        const ComplexTensor two = channel_snapshot(geom, grid, pair, 1e-3);
        CHECK_THROWS_AS(
            estimate_angle_delay(one, two, 0.0, 1e-3, geom, grid, cfg),
            PathCountMismatchError);
    }
    SUBCASE("temporal slice validation") {
        CHECK_THROWS_AS(
            estimate_angle_doppler(snap, {0.0, 1e-3}, geom, cfg, 1),
            DimMismatchError);
    }
}

TEST_CASE("path pairing is angle-based, not order-based") {
    // Two paths whose delays cross between the snapshots: index order by
    // delay swaps, so an index-based pairing would flip the drift signs.
    const ArrayGeometry geom = half_wave_panel(4, 4);
    const SamplingGrid grid = make_grid(32);
    const double f_c = geom.carrier_hz;
    std::vector<PathTruth> paths = {
        make_path(30.0, 50.0, 0.9000, -0.2e-6 * f_c, {1.0, 0.3}),
        make_path(-20.0, -45.0, 0.90005, 0.2e-6 * f_c, {0.6, -0.8}),
    };
    // delay_rate = ∓2e-7 set through the Doppler consistency rule.
    REQUIRE(paths[0].delay_rate == doctest::Approx(2e-7));
    REQUIRE(paths[1].delay_rate == doctest::Approx(-2e-7));

    PencilConfig cfg;
    cfg.L = 2;
    cfg.R = 2;
    cfg.K = 8;
    cfg.Q = 2;
    cfg.gamma1 = 1e-8;

    const double t1 = 0.0;
    const double t2 = 1e-3;
    const ComplexTensor s1 = channel_snapshot(geom, grid, paths, t1);
    const ComplexTensor s2 = channel_snapshot(geom, grid, paths, t2);
    // Sanity: the crossing actually happens.
    REQUIRE(path_delay_at(paths[0], t1) < path_delay_at(paths[1], t1));
    REQUIRE(path_delay_at(paths[0], t2) > path_delay_at(paths[1], t2));

    const AngleDelayEstimates est =
        estimate_angle_delay(s1, s2, t1, t2, geom, grid, cfg);
    REQUIRE(est.n_paths() == 2);
    // Output order follows snapshot-1 delays: paths[0] first.
    CHECK(std::abs(est.theta_rad[0] - paths[0].theta_rad) < 1e-8);
    CHECK(std::abs(est.theta_rad[1] - paths[1].theta_rad) < 1e-8);
    CHECK(rel_err(est.k_tau[0], paths[0].delay_rate) < 1e-4);
    CHECK(rel_err(est.k_tau[1], paths[1].delay_rate) < 1e-4);
}

TEST_CASE("temporal run recovers the composite Doppler") {
    const ArrayGeometry geom = half_wave_panel(4, 4);
    SamplingGrid grid = make_grid(4);
    grid.sample_interval_s = 5e-4;
    grid.sample_times_s = uniform_sample_times(0.0, 5e-4, 8);

    const PathTruth path = make_path(25.0, -40.0, 0.6, 150.0, {0.8, 0.45});
    const ComplexTensor traj = channel_trajectory(geom, grid, {path});
    const ComplexTensor slice = trajectory_subcarrier(traj, 0);

    PencilConfig cfg;
    cfg.L = 2;
    cfg.R = 2;
    cfg.K = 2;
    cfg.Q = 4;
    cfg.gamma1 = 1e-8;

    const AngleDopplerEstimates est = estimate_angle_doppler(
        slice, grid.sample_times_s, geom, cfg, 1);
    REQUIRE(est.n_paths() == 1);
    const double omega_tau =
        path.doppler_hz - grid.first_subcarrier_hz * path.delay_rate;
    CHECK(rel_err(est.omega_tau_hz[0], omega_tau) < 1e-9);
    CHECK(std::abs(est.theta_rad[0] - path.theta_rad) < 1e-9);
    CHECK(std::abs(est.phi_rad[0] - path.phi_rad) < 1e-9);
    CHECK(est.sample_spacing_s == doctest::Approx(5e-4));

    SUBCASE("non-uniform timestamps are rejected") {
        std::vector<double> warped = grid.sample_times_s;
        warped.back() += 1e-4;
        CHECK_THROWS_AS(
            estimate_angle_doppler(slice, warped, geom, cfg, 1), DomainError);
        CHECK_THROWS_AS(
            estimate_angle_doppler(slice, {0.0, 1e-3}, geom, cfg, 1),
            DimMismatchError);
        CHECK_THROWS_AS(
            estimate_angle_doppler(slice, grid.sample_times_s, geom, cfg, 0),
            DomainError);
    }
}

TEST_CASE("two-sample temporal regime distinguishes paths by angle") {
    const ArrayGeometry geom = half_wave_panel(4, 4);
    SamplingGrid grid = make_grid(4);
    grid.sample_interval_s = 2.5e-3;
    grid.sample_times_s = {0.0, 2.5e-3};

    PencilConfig cfg;
    cfg.L = 2;
    cfg.R = 2;
    cfg.K = 2;
    cfg.Q = 2;
    cfg.gamma1 = 1e-8;

    SUBCASE("distinct angles: exact recovery from two samples") {
        const std::vector<PathTruth> paths = {
            make_path(20.0, 40.0, 0.5, 30.0, {1.0, 0.2}),
            make_path(-35.0, -10.0, 1.1, -22.0, {0.7, -0.9}),
        };
        const ComplexTensor traj = channel_trajectory(geom, grid, paths);
        const ComplexTensor slice = trajectory_subcarrier(traj, 0);
        const AngleDopplerEstimates est = estimate_angle_doppler(
            slice, grid.sample_times_s, geom, cfg, 2);
        REQUIRE(est.n_paths() == 2);
        for (const PathTruth &truth : paths) {
            const double omega_tau =
                truth.doppler_hz - grid.first_subcarrier_hz * truth.delay_rate;
            // Associate by nearest composite Doppler.
            std::size_t best = 0;
            for (std::size_t i = 1; i < est.omega_tau_hz.size(); ++i)
                if (std::abs(est.omega_tau_hz[i] - omega_tau) <
                    std::abs(est.omega_tau_hz[best] - omega_tau))
                    best = i;
            CHECK(rel_err(est.omega_tau_hz[best], omega_tau) < 1e-9);
            CHECK(std::abs(est.theta_rad[best] - truth.theta_rad) < 1e-9);
            CHECK(std::abs(est.phi_rad[best] - truth.phi_rad) < 1e-9);
        }
    }
    SUBCASE("identical angles: the pencil loses rank") {
        const std::vector<PathTruth> paths = {
            make_path(20.0, 40.0, 0.5, 30.0, {1.0, 0.2}),
            make_path(20.0, 40.0, 0.5, -22.0, {0.7, -0.9}),
        };
        const ComplexTensor traj = channel_trajectory(geom, grid, paths);
        const ComplexTensor slice = trajectory_subcarrier(traj, 0);
        CHECK_THROWS_AS(estimate_angle_doppler(slice, grid.sample_times_s,
                                               geom, cfg, 2),
                        RankDeficientError);
    }
}

TEST_CASE("global time shift leaves motion parameters invariant") {
    const ArrayGeometry geom = half_wave_panel(4, 4);
    const SamplingGrid grid = make_grid(16);
    const std::vector<PathTruth> paths = {
        make_path(20.0, 40.0, 0.5, 260.0, {1.0, 0.2}),
        make_path(-30.0, -10.0, 1.2, -310.0, {0.7, -0.9}),
    };

    PencilConfig cfg;
    cfg.L = 2;
    cfg.R = 2;
    cfg.K = 4;
    cfg.Q = 2;
    cfg.gamma1 = 1e-8;

    const double shift = 1e-2;
    const AngleDelayEstimates base = estimate_angle_delay(
        channel_snapshot(geom, grid, paths, 0.0),
        channel_snapshot(geom, grid, paths, 1e-3), 0.0, 1e-3, geom, grid,
        cfg);
    const AngleDelayEstimates moved = estimate_angle_delay(
        channel_snapshot(geom, grid, paths, shift),
        channel_snapshot(geom, grid, paths, shift + 1e-3), shift,
        shift + 1e-3, geom, grid, cfg);

    REQUIRE(base.n_paths() == 2);
    REQUIRE(moved.n_paths() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(base.theta_rad[i] - moved.theta_rad[i]) < 1e-9);
        CHECK(std::abs(base.phi_rad[i] - moved.phi_rad[i]) < 1e-9);
        CHECK(rel_err(moved.k_tau[i], base.k_tau[i]) < 1e-6);
        // The delay itself drifts by exactly k·shift.
        const double want = base.tau_t1_s[i] + base.k_tau[i] * shift;
        CHECK(rel_err(moved.tau_t1_s[i], want) < 1e-9);
    }
}
