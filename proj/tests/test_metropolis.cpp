#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "swarm/entropy.hpp"
#include "swarm/functionals.hpp"
#include "swarm/landscape.hpp"
#include "swarm/metropolis.hpp"

#include "oracles.hpp"
#include "support.hpp"

using swarm::Density;
using swarm::EdgeField;
using swarm::EnergyLandscape;
using swarm::EntropyFamily;
using swarm::Matrix;
using swarm::MetropolisSetup;
using swarm::Vector;

namespace {

MetropolisSetup three_state_setup() {
    Matrix L(3, 3);
    L << -0.8, 0.3, 0.5,
          0.2, -0.7, 0.5,
          0.2, 0.3, -0.5;
    Vector ell(3), U(3);
    ell << 0.2, 0.3, 0.5;
    U << 0.0, 0.0, 0.0;
    Vector pi(3);
    pi << 0.5, 0.25, 0.25;
    return swarm::make_metropolis_setup(swarm::build_landscape(L, ell, U), pi);
}

MetropolisSetup random_setup(swarm::Rng& rng, int n) {
    EnergyLandscape land = testing_support::random_landscape(rng, n);
    Vector pi(n);
    for (int x = 0; x < n; ++x) pi[x] = 0.2 + rng.uniform();
    pi /= pi.sum();
    return swarm::make_metropolis_setup(std::move(land), std::move(pi));
}

Vector random_measure(swarm::Rng& rng, int n) {
    Vector mu(n);
    for (int x = 0; x < n; ++x) mu[x] = rng.exponential();
    mu /= mu.sum();
    return mu;
}

} // namespace

TEST_CASE("metropolis setup validation") {
    swarm::Rng rng(11);
    EnergyLandscape land = testing_support::random_landscape(rng, 3);
    Vector pi(3);
    pi << 0.5, 0.25, 0.25;

    CHECK_NOTHROW(swarm::make_metropolis_setup(land, pi));
    CHECK_THROWS_AS(swarm::make_metropolis_setup(land, Vector::Ones(4) / 4.0),
                    swarm::ValidationError);
    Vector zero = pi;
    zero[1] = 0.0;
    zero[0] = 0.75;
    CHECK_THROWS_AS(swarm::make_metropolis_setup(land, zero), swarm::ValidationError);
    CHECK_THROWS_AS(swarm::make_metropolis_setup(land, 2.0 * pi), swarm::ValidationError);
}

TEST_CASE("metropolis generator") {
    SECTION("min-acceptance entries on a worked instance") {
        const auto setup = three_state_setup();
        const Matrix Lpi = swarm::metropolis_generator(setup);
        CHECK(std::abs(Lpi(0, 1) - 0.1) <= 1e-15);
        CHECK(std::abs(Lpi(1, 0) - 0.2) <= 1e-15);
        CHECK(std::abs(Lpi(1, 2) - 0.3) <= 1e-15);
        CHECK(std::abs(Lpi(2, 1) - 0.3) <= 1e-15);
        CHECK(std::abs(Lpi(0, 2) - 0.1) <= 1e-15);
        CHECK(std::abs(Lpi(2, 0) - 0.2) <= 1e-15);
        CHECK(std::abs(Lpi(0, 0) + 0.2) <= 1e-15);
    }

    SECTION("pi is reversible and stationary") {
        swarm::Rng rng(313);
        for (int rep = 0; rep < 20; ++rep) {
            const int n = 3 + static_cast<int>(rng.uniform() * 4.0);
            const auto setup = random_setup(rng, n);
            const Matrix Lpi = swarm::metropolis_generator(setup);
            for (int x = 0; x < n; ++x) {
                double row = 0.0, col = 0.0;
                for (int y = 0; y < n; ++y) {
                    row += Lpi(x, y);
                    col += setup.pi[y] * Lpi(y, x);
                    if (y != x) {
                        CHECK(Lpi(x, y) >= 0.0);
                        CHECK(std::abs(setup.pi[x] * Lpi(x, y) - setup.pi[y] * Lpi(y, x)) <=
                              1e-14);
                    }
                }
                CHECK(std::abs(row) <= 1e-13);
                CHECK(std::abs(col) <= 1e-13);
            }
            CHECK(swarm::spectral_gap(Lpi, setup.pi) > 0.0);
        }
    }
}

TEST_CASE("markov-riemann map") {
    swarm::Rng rng(515);
    const EntropyFamily fam = swarm::EntropyFamily::spliced(-1.0);

    SECTION("reversible for mu with zero row sums") {
        for (int rep = 0; rep < 20; ++rep) {
            const int n = 3 + static_cast<int>(rng.uniform() * 4.0);
            const auto setup = random_setup(rng, n);
            const Vector mu = random_measure(rng, n);
            const Matrix K = swarm::markov_riemann_map(setup, fam, mu);
            for (int x = 0; x < n; ++x) {
                CHECK(std::abs(K.row(x).sum()) <= 1e-12);
                for (int y = x + 1; y < n; ++y)
                    CHECK(std::abs(mu[x] * K(x, y) - mu[y] * K(y, x)) <= 1e-13);
            }
        }
    }

    SECTION("at the target the mobility factor drops out") {
        const auto setup = three_state_setup();
        const Matrix K = swarm::markov_riemann_map(setup, fam, setup.pi);
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) {
                if (x == y || setup.land.L(x, y) == 0.0) continue;
                const double sel = std::min(setup.pi[x] / setup.land.ell[x],
                                            setup.pi[y] / setup.land.ell[y]);
                const double expected =
                    setup.land.ell[x] / setup.pi[x] * setup.land.L(x, y) * sel;
                CHECK(std::abs(K(x, y) - expected) <= 1e-14);
            }
    }

    SECTION("rejects boundary measures") {
        const auto setup = three_state_setup();
        Vector mu(3);
        mu << 0.5, 0.5, 0.0;
        CHECK_THROWS_AS(swarm::markov_riemann_map(setup, fam, mu), swarm::DomainError);
    }
}

TEST_CASE("phi-entropy of a measure against the target") {
    const auto setup = three_state_setup();
    const EntropyFamily fam = swarm::EntropyFamily::spliced(-1.0);

    CHECK(swarm::h_phi(setup, fam, setup.pi) == 0.0);

    swarm::Rng rng(717);
    for (int rep = 0; rep < 30; ++rep) {
        const Vector mu = random_measure(rng, 3);
        if ((mu - setup.pi).cwiseAbs().maxCoeff() < 1e-6) continue;
        CHECK(swarm::h_phi(setup, fam, mu) > 0.0);
        // convexity in the measure
        const Vector mid = 0.5 * (mu + setup.pi);
        CHECK(swarm::h_phi(setup, fam, mid) <=
              0.5 * swarm::h_phi(setup, fam, mu) + 1e-15);
    }

    // gradient field vanishes exactly at the target
    const EdgeField at_target = swarm::functional_gradient_K(setup, fam, setup.pi);
    CHECK(at_target.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("drift generator duality") {
    // mu[K_{mu,F} f] = <df, F>_{mu x K} for antisymmetric F: the positive-part
    // clamp is invisible under the pairing.
    swarm::Rng rng(919);
    const EntropyFamily fam = swarm::EntropyFamily::spliced(-0.5);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 3 + static_cast<int>(rng.uniform() * 4.0);
        const auto setup = random_setup(rng, n);
        const Vector mu = random_measure(rng, n);
        const Matrix K = swarm::markov_riemann_map(setup, fam, mu);
        const EdgeField F = testing_support::random_antisymmetric(rng, n);
        const Matrix KF = swarm::drift_generator(K, F);

        Vector f(n);
        for (int x = 0; x < n; ++x) f[x] = rng.uniform() * 2.0 - 1.0;

        double lhs = 0.0;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) lhs += mu[x] * KF(x, y) * f[y];

        const EdgeField df = swarm::grad(f);
        const double rhs = swarm::inner_mu_k(K, mu, df, F);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("steepest descent of the phi-entropy is the metropolis flow") {
    swarm::Rng rng(2121);
    const auto setup = random_setup(rng, 5);

    SECTION("vector-field identity for every entropy variant") {
        const EntropyFamily variants[] = {
            swarm::EntropyFamily::xlogx(),
            swarm::EntropyFamily::spliced(-0.5),
            swarm::EntropyFamily::spliced(-1.0),
            swarm::EntropyFamily::spliced(-2.0),
        };
        for (const auto& fam : variants) {
            const auto report = swarm::verify_prop_A3(setup, fam, 25);
            CHECK(report.trials == 25);
            CHECK(report.max_residual <= 1e-10);
            CHECK(report.pass);
        }
    }

    SECTION("pathwise agreement with the exact semigroup") {
        Vector mu0(5);
        mu0 << 0.55, 0.05, 0.15, 0.05, 0.20;
        for (const auto& fam :
             {swarm::EntropyFamily::spliced(-1.0), swarm::EntropyFamily::xlogx()}) {
            const auto report = swarm::metropolis_pathwise_check(setup, fam, mu0);
            CHECK(report.horizon > 0.0);
            CHECK(report.sup_distance <= 1e-8);
            CHECK(report.pass);
        }
    }
}

TEST_CASE("metropolis semigroup dissipates the phi-entropy") {
    const auto setup = three_state_setup();
    const EntropyFamily fam = swarm::EntropyFamily::spliced(-1.0);
    const Matrix Lpi = swarm::metropolis_generator(setup);

    Vector mu0(3);
    mu0 << 0.8, 0.15, 0.05;
    double prev = swarm::h_phi(setup, fam, mu0);
    CHECK(prev > 0.0);
    for (double t : {0.5, 1.0, 2.0, 4.0, 8.0, 32.0}) {
        const Vector mu = oracles::oracle_expm_measure(Lpi, setup.pi, mu0, t);
        const double h = swarm::h_phi(setup, fam, mu);
        CHECK(h <= prev + 1e-13);
        prev = h;
    }
    const Vector far = oracles::oracle_expm_measure(Lpi, setup.pi, mu0, 200.0);
    CHECK((far - setup.pi).cwiseAbs().maxCoeff() <= 1e-10);
}
