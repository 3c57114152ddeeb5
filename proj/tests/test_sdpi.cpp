#include <doctest.h>

#include <cmath>

#include "ppcover/sdpi.hpp"

using namespace ppcover;

TEST_CASE("exact mutual information") {
    CHECK(exact_mi({{0.25, 0.25}, {0.25, 0.25}}) == 0.0);

    std::vector<std::vector<double>> copy4(4, std::vector<double>(4, 0.0));
    for (int i = 0; i < 4; ++i) copy4[i][i] = 0.25;
    CHECK(exact_mi(copy4) == doctest::Approx(std::log(4.0)).epsilon(1e-15));

    CHECK(exact_mi({{0.4, 0.1}, {0.1, 0.4}}) ==
          doctest::Approx(0.19274475702175748).epsilon(1e-13));

    CHECK_THROWS_AS(exact_mi({{0.5, 0.2}, {0.1, 0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(exact_mi({{0.7, -0.2}, {0.3, 0.2}}), std::invalid_argument);
}

TEST_CASE("model MI agrees with direct joint enumeration") {
    RngStream rng(31);
    const FiniteModel m = random_marginal_poisson_model(1.0, 0.01, 2, 3, 4, rng);
    // build the flat joint over (message, count vector) and feed exact_mi
    const int levels = m.cmax() + 1;
    std::vector<std::vector<double>> joint(m.messages(),
                                           std::vector<double>(levels * levels, 0.0));
    for (std::size_t mm = 0; mm < m.messages(); ++mm)
        for (int c0 = 0; c0 < levels; ++c0)
            for (int c1 = 0; c1 < levels; ++c1)
                joint[mm][c0 * levels + c1] =
                    m.message_pmf[mm] * m.counts[mm][0][c0] * m.counts[mm][1][c1];
    CHECK(model_mi(m) == doctest::Approx(exact_mi(joint)).epsilon(1e-12));
}

TEST_CASE("binomial thinning kernel") {
    FiniteModel m;
    m.delta = 1;
    m.message_pmf = {1.0};
    m.counts = {{{0.5, 0.5}}};
    CHECK(apply_thinning(m, 0.0).counts[0][0][1] == 0.5);
    CHECK(apply_thinning(m, 1.0).counts[0][0][0] == 1.0);
    const auto half = apply_thinning(m, 0.5);
    CHECK(half.counts[0][0][0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(half.counts[0][0][1] == doctest::Approx(0.25).epsilon(1e-15));

    // mass is conserved and means scale by (1-p)
    RngStream rng(8);
    const FiniteModel big = random_marginal_poisson_model(2.0, 0.05, 3, 4, 8, rng);
    const FiniteModel thinned = apply_thinning(big, 0.3);
    for (std::size_t mm = 0; mm < big.messages(); ++mm)
        for (std::size_t j = 0; j < big.slots(); ++j) {
            double s = 0, mean_in = 0, mean_out = 0;
            for (int c = 0; c <= big.cmax(); ++c) {
                s += thinned.counts[mm][j][c];
                mean_in += c * big.counts[mm][j][c];
                mean_out += c * thinned.counts[mm][j][c];
            }
            CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(mean_out == doctest::Approx(0.7 * mean_in).epsilon(1e-12));
        }
}

TEST_CASE("generated models are marginally poisson per slot") {
    RngStream rng(12);
    const double lambda = 1.0, delta = 0.01;
    const FiniteModel m = random_marginal_poisson_model(lambda, delta, 4, 4, 4, rng);
    const auto target = truncated_poisson(lambda * delta, 4);
    for (std::size_t j = 0; j < m.slots(); ++j)
        for (int c = 0; c <= 4; ++c) {
            double avg = 0;
            for (std::size_t mm = 0; mm < m.messages(); ++mm)
                avg += m.message_pmf[mm] * m.counts[mm][j][c];
            CHECK(avg == doctest::Approx(target[c]).epsilon(1e-12));
        }
}

TEST_CASE("thinning SDPI trivial endpoints") {
    RngStream rng(3);
    const FiniteModel m = random_marginal_poisson_model(0.8, 0.01, 3, 2, 4, rng);
    const auto at0 = thinning_sdpi_check(m, 0.0);
    CHECK(at0.slack == doctest::Approx(0.0).epsilon(1e-14));
    const auto at1 = thinning_sdpi_check(m, 1.0);
    CHECK(at1.lhs == 0.0);
    CHECK(at1.slack == 0.0);
}

TEST_CASE("thinning SDPI holds on random marginally-poisson models") {
    int checked = 0;
    for (int id = 0; id < 25; ++id) {
        RngStream rng = RngStream::substream(1001, id);
        const double mean = 0.002 + 0.008 * rng.next_double();
        const FiniteModel m = random_marginal_poisson_model(mean / 0.01, 0.01,
                                                            1 + rng.next_u64() % 6,
                                                            2 + rng.next_u64() % 3, 4, rng);
        const double iy = model_mi(m);
        double prev_norm = -1e18;
        for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto c = thinning_sdpi_check(m, p);
            ++checked;
            CHECK(c.slack >= -1e-12);
            // weak DPI
            CHECK(c.lhs <= iy + 1e-12);
            // normalized slack I(M;Y) - I(M;Z_p)/(1-p) is non-decreasing in p
            const double norm = iy - c.lhs / (1 - p);
            CHECK(norm >= prev_norm - 1e-12);
            prev_norm = norm;
        }
    }
    CHECK(checked == 125);
}

TEST_CASE("matching slot marginals alone does not give the thinning SDPI") {
    // Two messages, two slots, each slot's message-average equal to the
    // truncated Poisson law -- but the slots are correlated through the
    // message, so the joint count law is not a discretized Poisson process
    // and the (1-p) contraction fails.  This is why the generator uses
    // independent per-slot sub-messages.
    FiniteModel m;
    m.delta = 0.1;
    m.message_pmf = {0.5, 0.5};
    m.counts = {
        {{0.90068243682260363, 0.095833650625368888, 0.003426949635134297,
          5.6206812731182616e-05, 7.5610416185487659e-07},
         {0.98599955019431695, 0.013703067534790794, 0.0002765250325656699,
          2.021903888416051e-05, 6.3819944236306e-07}},
        {{0.97768379625111579, 0.022024089652571563, 0.0002705313722548828,
          2.1125773530655519e-05, 4.5695052713338199e-07},
         {0.89236668287940246, 0.10415467274314966, 0.0034209559748235099,
          5.7113547377677622e-05, 5.7485524662519858e-07}}};
    m.validate();
    // per-slot marginals match the mean-0.0627448... truncated Poisson
    const auto target = truncated_poisson(0.062744814191575696, 4);
    for (int j = 0; j < 2; ++j)
        for (int c = 0; c <= 4; ++c)
            CHECK(0.5 * (m.counts[0][j][c] + m.counts[1][j][c]) ==
                  doctest::Approx(target[c]).epsilon(1e-12));
    const auto check = thinning_sdpi_check(m, 0.5);
    CHECK(check.slack < -1e-6);
}

TEST_CASE("superposition model exact MI and ceiling") {
    SuperpositionModel m;
    m.lambda = 1.0;
    m.horizon = 0.2;
    m.channel = {{0.9, 0.2}, {0.1, 0.8}};
    m.validate();

    // mu = 0: the total count S reveals K exactly, so I(M;Z) = I(M;K)
    CHECK(superposition_mi(m, 0.0) ==
          doctest::Approx(superposition_mi_ceiling(m)).epsilon(1e-12));
    // noise can only hurt
    CHECK(superposition_mi(m, 0.5) <= superposition_mi_ceiling(m) + 1e-12);
    CHECK(superposition_mi(m, 2.0) <= superposition_mi(m, 0.5) + 1e-12);
}

TEST_CASE("superposition bound check trends") {
    SuperpositionModel m;
    m.lambda = 1.0;
    m.horizon = 0.2;
    m.channel = {{0.9, 0.2}, {0.1, 0.8}};

    const std::vector<double> deltas{0.05, 0.02, 0.01};
    const auto rows = superposition_bound_check(m, 0.5, deltas);
    REQUIRE(rows.size() == 3);
    const double ceiling = superposition_mi_ceiling(m);
    for (const auto& r : rows) {
        CHECK(r.lhs <= ceiling + 1e-12);
        CHECK(r.lhs == rows[0].lhs);  // exact MI does not depend on the slotting
    }
    // the discrete bound converges from the Delta-refined side: Richardson
    // extrapolation of rhs must dominate lhs
    const double rhs0 = rows[2].rhs + (rows[2].rhs - rows[1].rhs) * deltas[2] / (deltas[1] - deltas[2]);
    CHECK(rhs0 >= rows[2].lhs - 1e-9);
    // fitted correction c: slack >= -c delta with a stable c
    const double c_fit = std::max({0.0, -rows[0].slack / rows[0].delta,
                                   -rows[1].slack / rows[1].delta, -rows[2].slack / rows[2].delta});
    CHECK(std::isfinite(c_fit));

    // message independent of the path: lhs is exactly zero and the bound
    // collapses at the O(delta) surrogate error
    SuperpositionModel ind = m;
    ind.channel = {{0.6, 0.6}, {0.4, 0.4}};
    const auto rows_ind = superposition_bound_check(ind, 0.5, deltas);
    for (const auto& r : rows_ind) CHECK(r.lhs == 0.0);
    CHECK(std::abs(rows_ind[2].rhs) < std::abs(rows_ind[0].rhs));

    // mu = 0 reduces toward the MI identity: slack -> 0
    const auto rows_mu0 = superposition_bound_check(m, 0.0, deltas);
    CHECK(std::abs(rows_mu0[2].slack) < std::abs(rows_mu0[0].slack));
    CHECK(std::abs(rows_mu0[2].slack) <= 0.2 * std::abs(rows_mu0[2].lhs) + 1e-9);
}

TEST_CASE("superposition batch emits consistent rows") {
    const auto rows = superposition_batch(5, 99, 0.5, {0.05, 0.02, 0.01});
    REQUIRE(rows.size() == 15);
    for (const auto& r : rows) {
        CHECK(r.p_or_mu == 0.5);
        CHECK(std::isfinite(r.lhs));
        CHECK(std::isfinite(r.rhs));
        CHECK(r.slack == r.rhs - r.lhs);
    }
    // deterministic
    const auto again = superposition_batch(5, 99, 0.5, {0.05, 0.02, 0.01});
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].lhs == again[i].lhs);
}

TEST_CASE("thinning batch is deterministic") {
    const auto a = thinning_batch(5, 7, {0.25, 0.75});
    const auto b = thinning_batch(5, 7, {0.25, 0.75});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].lhs == b[i].lhs);
        CHECK(a[i].rhs == b[i].rhs);
    }
}
