#include <doctest.h>

#include <cmath>

#include "ppcover/blahut_arimoto.hpp"
#include "ppcover/frontier.hpp"

using namespace ppcover;

TEST_CASE("distortion matrix construction") {
    const auto m = build_distortion_matrix(ReconSet::finite({0.0, 1.0}), 0.01);
    REQUIRE(m.columns() == 2);
    CHECK(m.d[0][0] == 0.0);
    CHECK(m.d[0][1] == 1.0);
    CHECK(std::isinf(m.d[1][0]));
    CHECK(m.d[1][1] == 1.0);

    const auto single = build_distortion_matrix(ReconSet::finite({1.0}), 0.01);
    REQUIRE(single.columns() == 1);
    CHECK(single.d[0][0] == 1.0);
    CHECK(single.d[1][0] == 1.0);

    const auto grid = build_distortion_matrix(ReconSet::interval(0.5, 2.0), 0.01, 3);
    REQUIRE(grid.columns() == 3);
    CHECK(grid.recon_values[0] == doctest::Approx(0.5));
    CHECK(grid.recon_values[1] == doctest::Approx(1.0));
    CHECK(grid.recon_values[2] == doctest::Approx(2.0));

    const auto all = build_distortion_matrix(ReconSet::all_non_negative(), 0.01, 16, 1e-3, 1e3);
    CHECK(all.recon_values.front() == 0.0);
    CHECK(all.columns() == 17);
}

TEST_CASE("zero slope returns the zero-rate endpoint") {
    const auto m = build_distortion_matrix(ReconSet::finite({0.0, 1.0}), 0.01);
    const auto p = ba_point({0.6, 0.4}, m, 0.0);
    CHECK(p.converged);
    CHECK(p.I_per_symbol == 0.0);
    // column 0 is excluded for the occupied row, so min E[dbar] = 1
    CHECK(p.E_dbar == doctest::Approx(1.0));
}

TEST_CASE("steep slopes approach lossless coding of the occupancy bit") {
    const auto m = build_distortion_matrix(ReconSet::finite({0.0, 1.0}), 1.0);
    const double q = 0.3;
    const auto p = ba_point({1 - q, q}, m, -40.0);
    REQUIRE(p.converged);
    const double hq = -(phi(q) + phi(1 - q));
    CHECK(std::abs(p.I_per_symbol - hq) <= 1e-3);
    CHECK(std::abs(p.E_dbar - q) <= 1e-3);
}

TEST_CASE("lagrangian never increases and sweeps are monotone") {
    const auto m = build_distortion_matrix(ReconSet::finite({0.0, 1.0}), 1e-3);
    const double q1 = -std::expm1(-1e-3);
    double last_I = -1, last_D = 2;
    for (double s : ba_slope_grid_for_window(1.0, 1e-3, 0.1, 0.9, 9)) {
        const auto p = ba_point({1 - q1, q1}, m, s);
        REQUIRE(p.converged);
        CHECK(p.max_lagrangian_increase <= 1e-12);
        // |s| decreasing along the grid: D increases, I decreases
        const bool i_monotone = p.I_per_symbol <= last_I + 1e-12 || last_I < 0;
        const bool d_monotone = p.E_dbar >= last_D - 1e-12 || last_D > 1;
        CHECK(i_monotone);
        CHECK(d_monotone);
        last_I = p.I_per_symbol;
        last_D = p.E_dbar;
    }
}

TEST_CASE("ba frontier matches the covering curve within two percent") {
    const double lambda = 1.0, delta = 1e-3;
    const auto rows = ba_frontier(lambda, ReconSet::finite({0.0, 1.0}), delta,
                                  ba_slope_grid_for_window(lambda, delta, 0.1, 0.9, 9));
    int checked = 0;
    for (const auto& r : rows) {
        if (!r.converged || r.D < 0.1 || r.D > 0.9) continue;
        ++checked;
        CHECK(std::abs(r.R_per_time - rc(lambda, r.D)) <= 0.02 * rc(lambda, r.D));
    }
    CHECK(checked >= 5);
}

TEST_CASE("ba frontier for the unconstrained set sits near the line") {
    const double lambda = 2.0, delta = 1e-3;
    // slopes around -delta trace the interior of the R + D = xi(lambda) line;
    // on a 129-column grid the Lagrangian stop leaves a certified gap around
    // 1e-5 nats/symbol, which is still far below the 2% band
    const DistortionMatrix m =
        build_distortion_matrix(ReconSet::all_non_negative(), delta, 128, lambda * 1e-3, lambda * 1e3);
    const double q1 = -std::expm1(-lambda * delta);
    int checked = 0;
    for (double s : {-delta, -0.85 * delta, -0.7 * delta}) {
        const auto p = ba_point({1 - q1, q1}, m, s);
        REQUIRE(p.duality_gap <= 1e-5);
        CHECK(std::abs(p.I_per_symbol / delta + p.E_dbar - xi(lambda)) <= 0.02 * xi(lambda));
        ++checked;
    }
    CHECK(checked == 3);
}

TEST_CASE("ba frontier against the parametric frontier on an interval set") {
    // dual route: operational oracle vs region optimizer on A = [0.5, 2]
    const double lambda = 1.0, delta = 1e-3;
    const auto A = ReconSet::interval(0.5, 2.0);
    OptimizerOptions opt;
    opt.tol = 1e-14;
    const Frontier f = constrained_frontier(lambda, A, default_weight_grid(48), 1e-5, opt);
    const auto rows =
        ba_frontier(lambda, A, delta, {-3e-3, -2e-3, -1.5e-3, -1.2e-3, -1e-3}, 128);
    int checked = 0;
    for (const auto& r : rows) {
        const double param = frontier_rate_at(f, r.D);
        if (param < 1e-3) continue;
        ++checked;
        // converse: the region optimizer can never beat the oracle beyond
        // discretization error, and the two routes agree within a few percent
        CHECK(param <= r.R_per_time * 1.02 + 1e-9);
        CHECK(std::abs(r.R_per_time - param) <= 0.035 * param);
    }
    CHECK(checked >= 4);
}

TEST_CASE("parametric converse is never beaten beyond discretization error") {
    const double lambda = 1.0, delta = 1e-3;
    const auto rows = ba_frontier(lambda, ReconSet::finite({0.0, 1.0}), delta,
                                  ba_slope_grid_for_window(lambda, delta, 0.15, 0.85, 7));
    for (const auto& r : rows) {
        if (!r.converged || r.D <= 0.0 || r.D >= 1.0) continue;
        CHECK(rc(lambda, r.D) <= r.R_per_time * 1.02 + 1e-9);
    }
}

TEST_CASE("duplicate slopes give identical points") {
    const auto m = build_distortion_matrix(ReconSet::finite({0.0, 1.0}), 1e-3);
    const double q1 = -std::expm1(-1e-3);
    const auto a = ba_point({1 - q1, q1}, m, -0.004);
    const auto b = ba_point({1 - q1, q1}, m, -0.004);
    CHECK(a.I_per_symbol == b.I_per_symbol);
    CHECK(a.E_dbar == b.E_dbar);
}

TEST_CASE("slope validation") {
    const auto m = build_distortion_matrix(ReconSet::finite({0.0, 1.0}), 1e-3);
    CHECK_THROWS_AS(ba_point({0.5, 0.5}, m, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(ba_point({0.5, 0.6}, m, -1.0), std::invalid_argument);
}
