#pragma once

// Shared random-instance builders for the test suite. Landscapes are built
// from symmetric conductances so detailed balance holds by construction:
// L(x,y) = C(x,y)/ell(x).

#include <tuple>
#include <vector>

#include <swarm/functionals.hpp>
#include <swarm/landscape.hpp>
#include <swarm/rng.hpp>

namespace testing_support {

inline swarm::EnergyLandscape random_landscape(swarm::Rng& rng, int n, bool extra_chords = true) {
    swarm::Vector ell(n);
    for (int i = 0; i < n; ++i) ell[i] = 0.5 + rng.uniform();
    ell /= ell.sum();

    swarm::Matrix C = swarm::Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const double c = 0.3 + 0.7 * rng.uniform();
        C(i, j) = C(j, i) = c;
    }
    if (extra_chords && n > 3)
        for (int i = 0; i < n; ++i)
            for (int j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue; // ring edge already present
                if (rng.uniform() < 0.3) {
                    const double c = 0.3 + 0.7 * rng.uniform();
                    C(i, j) = C(j, i) = c;
                }
            }

    swarm::Matrix L = swarm::Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && C(i, j) > 0.0) L(i, j) = C(i, j) / ell[i];

    swarm::Vector U(n);
    for (int i = 0; i < n; ++i) U[i] = rng.uniform();
    return swarm::build_landscape(L, ell, U);
}

inline swarm::Density random_density(swarm::Rng& rng, const swarm::EnergyLandscape& land) {
    swarm::Vector mass(land.size());
    for (int i = 0; i < land.size(); ++i) mass[i] = rng.exponential();
    mass /= mass.sum();
    return mass.cwiseQuotient(land.ell);
}

// ell-mean-zero test function, not identically zero.
inline swarm::Vector random_mean_zero(swarm::Rng& rng, const swarm::EnergyLandscape& land) {
    swarm::Vector h(land.size());
    for (int i = 0; i < land.size(); ++i) h[i] = rng.uniform() - 0.5;
    h.array() -= h.dot(land.ell);
    if (h.cwiseAbs().maxCoeff() < 1e-12) h[0] += 1.0, h.array() -= h.dot(land.ell);
    return h;
}

inline swarm::EdgeField random_antisymmetric(swarm::Rng& rng, int n) {
    swarm::EdgeField F = swarm::EdgeField::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            F(x, y) = rng.uniform() - 0.5;
            F(y, x) = -F(x, y);
        }
    return F;
}

} // namespace testing_support
