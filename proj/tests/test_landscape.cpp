#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <swarm/landscape.hpp>

#include "oracles.hpp"
#include "support.hpp"

using swarm::Matrix;
using swarm::Vector;

namespace {

swarm::EnergyLandscape two_state() {
    Matrix L(2, 2);
    L << -1.0, 1.0, 1.0, -1.0;
    Vector ell(2), U(2);
    ell << 0.5, 0.5;
    U << 0.0, 1.0;
    return swarm::build_landscape(L, ell, U);
}

} // namespace

TEST_CASE("build validates structure") {
    const auto land = two_state();
    CHECK(land.size() == 2);
    CHECK(std::abs(land.L.row(0).sum()) <= 1e-12);
    CHECK(std::abs(land.L.row(1).sum()) <= 1e-12);

    SECTION("detailed-balance violation is rejected") {
        Matrix L(3, 3);
        L << -1, 1, 0, 2, -2, 0, 0, 0, 0;
        L(2, 1) = 1.0;
        L(1, 2) = 1.0;
        L(1, 1) = -3.0;
        L(2, 2) = -1.0;
        Vector ell = Vector::Constant(3, 1.0 / 3.0), U = Vector::Zero(3);
        CHECK_THROWS_AS(swarm::build_landscape(L, ell, U), swarm::NotReversible);
    }
    SECTION("disconnected graph is rejected") {
        const std::vector<std::tuple<int, int, double>> edges = {{0, 1, 1.0}, {1, 0, 1.0},
                                                                 {2, 3, 1.0}, {3, 2, 1.0}};
        Vector ell = Vector::Constant(4, 0.25), U = Vector::Zero(4);
        CHECK_THROWS_AS(swarm::build_landscape(edges, ell, U), swarm::NotIrreducible);
    }
    SECTION("bad reference measure is rejected") {
        Matrix L(2, 2);
        L << -1.0, 1.0, 1.0, -1.0;
        Vector bad(2), U = Vector::Zero(2);
        bad << 0.7, 0.7;
        CHECK_THROWS_AS(swarm::build_landscape(L, bad, U), swarm::BadMeasure);
        bad << 1.5, -0.5;
        CHECK_THROWS_AS(swarm::build_landscape(L, bad, U), swarm::BadMeasure);
    }
    SECTION("negative off-diagonal rate is rejected") {
        Matrix L(2, 2);
        L << 1.0, -1.0, 1.0, -1.0;
        Vector ell = Vector::Constant(2, 0.5), U = Vector::Zero(2);
        CHECK_THROWS(swarm::build_landscape(L, ell, U));
    }
}

TEST_CASE("edge list and matrix construction agree") {
    swarm::Rng rng(21);
    const auto land = testing_support::random_landscape(rng, 7);
    std::vector<std::tuple<int, int, double>> edges;
    for (int x = 0; x < 7; ++x)
        for (int y = 0; y < 7; ++y)
            if (x != y && land.L(x, y) > 0.0) edges.emplace_back(x, y, land.L(x, y));
    const auto rebuilt = swarm::build_landscape(edges, land.ell, land.U);
    CHECK((rebuilt.L - land.L).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("minimizer set") {
    const auto ring = swarm::ring20();
    const auto mins = swarm::minimizer_set(ring, 0.0);
    REQUIRE(mins.size() == 1);
    CHECK(mins[0] == 7);

    Matrix L(3, 3);
    L << -1, 1, 0, 1, -2, 1, 0, 1, -1;
    Vector ell = Vector::Constant(3, 1.0 / 3.0);
    Vector U(3);
    U << 0.0, 1.0, 0.0;
    const auto land = swarm::build_landscape(L, ell, U);
    const auto ties = swarm::minimizer_set(land, 0.0);
    REQUIRE(ties.size() == 2);
    CHECK(ties[0] == 0);
    CHECK(ties[1] == 2);
    CHECK(swarm::minimizer_set(land, 2.0).size() == 3); // monotone in tol

    const auto constant = swarm::build_landscape(L, ell, Vector::Zero(3));
    CHECK(swarm::minimizer_set(constant, 0.0).size() == 3);
}

TEST_CASE("spectral gap closed forms") {
    CHECK(swarm::spectral_gap(two_state().L, two_state().ell) ==
          Catch::Approx(2.0).epsilon(1e-12));

    for (const int n : {5, 8, 20}) {
        std::vector<std::tuple<int, int, double>> edges;
        for (int i = 0; i < n; ++i) {
            edges.emplace_back(i, (i + 1) % n, 1.0);
            edges.emplace_back((i + 1) % n, i, 1.0);
        }
        const Vector ell = Vector::Constant(n, 1.0 / n);
        const auto cyc = swarm::build_landscape(edges, ell, Vector::Zero(n));
        const double expected = 2.0 * (1.0 - std::cos(2.0 * M_PI / n));
        CHECK(swarm::spectral_gap(cyc.L, cyc.ell) == Catch::Approx(expected).epsilon(1e-12));
    }

    Matrix K3 = Matrix::Constant(3, 3, 1.0);
    K3.diagonal().setConstant(-2.0);
    CHECK(swarm::spectral_gap(K3, Vector::Constant(3, 1.0 / 3.0)) ==
          Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("spectral gap matches the Jacobi oracle on random instances") {
    swarm::Rng rng(22);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform() * 10.0);
        const auto land = testing_support::random_landscape(rng, n);
        const double lib = swarm::spectral_gap(land.L, land.ell);
        const double ora = oracles::oracle_spectral_gap(land.L, land.ell);
        CHECK(lib == Catch::Approx(ora).epsilon(1e-9));
        CHECK(lib > 0.0);
    }
}

TEST_CASE("oscillation") {
    CHECK(swarm::osc(Vector::Zero(4)) == 0.0);
    Vector U(3);
    U << 0.0, 3.0, 1.0;
    CHECK(swarm::osc(U) == 3.0);
}

TEST_CASE("builtin ring landscape frozen facts") {
    const auto ring = swarm::ring20();
    REQUIRE(ring.size() == 20);
    CHECK(ring.U[7] == Catch::Approx(-2.8199525712929745).epsilon(1e-14));
    CHECK(swarm::osc(ring.U) == Catch::Approx(6.7387279512055436).epsilon(1e-13));
    CHECK(swarm::spectral_gap(ring.L, ring.ell) ==
          Catch::Approx(0.097886967409692938).epsilon(1e-12));
    for (int i = 0; i < 20; ++i) {
        CHECK(ring.ell[i] == Catch::Approx(0.05).epsilon(1e-14));
        CHECK(ring.L(i, (i + 1) % 20) == 1.0);
        CHECK(ring.L(i, (i + 19) % 20) == 1.0);
    }
}

TEST_CASE("density validation") {
    const auto ring = swarm::ring20();
    CHECK_NOTHROW(swarm::validate_density(ring, swarm::uniform_density(20)));

    swarm::Density off = swarm::uniform_density(20);
    off[3] += 0.5; // mass no longer one
    CHECK_THROWS_AS(swarm::validate_density(ring, off), swarm::BadMeasure);

    swarm::Density neg = swarm::uniform_density(20);
    neg[3] = -neg[3];
    neg[4] += 2.0 * 1.0; // restore mass, keep a negative entry
    CHECK_THROWS_AS(swarm::validate_density(ring, neg), swarm::BadMeasure);
}

TEST_CASE("mass on a state set") {
    const auto ring = swarm::ring20();
    const auto rho = swarm::uniform_density(20);
    CHECK(swarm::mass_on(ring, rho, {0, 1, 2, 3}) == Catch::Approx(0.2).epsilon(1e-13));
    CHECK(swarm::mass_on(ring, rho, {}) == 0.0);
}
