#pragma once

// Min-acceptance sampler structure for an arbitrary positive target pi: the
// Metropolis generator L_pi, the matched Markov-Riemann map K_mu, functional
// gradients of the phi-entropy H_phi(mu) = sum pi phi(mu/pi), and the
// verification that steepest descent of H_phi in that structure IS the
// linear Metropolis flow, for every admissible phi.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "swarm/entropy.hpp"
#include "swarm/errors.hpp"
#include "swarm/flow.hpp"
#include "swarm/functionals.hpp"
#include "swarm/generators.hpp"
#include "swarm/landscape.hpp"
#include "swarm/rng.hpp"

namespace swarm {

struct MetropolisSetup {
    EnergyLandscape land;
    Vector pi; // positive probability target
};

inline MetropolisSetup make_metropolis_setup(EnergyLandscape land, Vector pi) {
    if (pi.size() != land.size()) throw ValidationError("target has wrong dimension");
    double total = 0.0;
    for (int x = 0; x < pi.size(); ++x) {
        if (!(pi[x] > 0.0)) throw ValidationError("target must be strictly positive");
        total += pi[x];
    }
    if (std::abs(total - 1.0) > tol::mass) throw ValidationError("target must sum to one");
    return {std::move(land), std::move(pi)};
}

// L_pi(x,y) = L(x,y) min(pi(y) ell(x) / (pi(x) ell(y)), 1): reversible for pi.
inline Matrix metropolis_generator(const MetropolisSetup& setup) {
    const int n = setup.land.size();
    Matrix out = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y || setup.land.L(x, y) == 0.0) continue;
            const double ratio =
                setup.pi[y] * setup.land.ell[x] / (setup.pi[x] * setup.land.ell[y]);
            out(x, y) = setup.land.L(x, y) * std::min(ratio, 1.0);
        }
    detail::fill_diagonal(out);
    return out;
}

// K_mu(x,y) = (ell(x)/mu(x)) L(x,y) min(pi/ell(x), pi/ell(y))
//             theta(mu(x)/pi(x), mu(y)/pi(y)); reversible for mu.
inline Matrix markov_riemann_map(const MetropolisSetup& setup, const EntropyFamily& fam,
                                 const Vector& mu) {
    const int n = setup.land.size();
    Matrix out = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        if (!(mu[x] > 0.0)) throw DomainError("mu must be interior");
        for (int y = 0; y < n; ++y) {
            if (x == y || setup.land.L(x, y) == 0.0) continue;
            const double sel = std::min(setup.pi[x] / setup.land.ell[x],
                                        setup.pi[y] / setup.land.ell[y]);
            const double th = fam.theta(mu[x] / setup.pi[x], mu[y] / setup.pi[y]);
            out(x, y) = setup.land.ell[x] / mu[x] * setup.land.L(x, y) * sel * th;
        }
    }
    detail::fill_diagonal(out);
    return out;
}

// H_phi(mu) = sum_x pi(x) phi(mu(x)/pi(x)).
inline double h_phi(const MetropolisSetup& setup, const EntropyFamily& fam, const Vector& mu) {
    double s = 0.0;
    for (int x = 0; x < setup.pi.size(); ++x) s += setup.pi[x] * fam.phi(mu[x] / setup.pi[x]);
    return s;
}

// Gradient of H_phi in the K_mu structure: the exact form d[phi'(mu/pi)].
inline EdgeField functional_gradient_K(const MetropolisSetup& setup, const EntropyFamily& fam,
                                       const Vector& mu) {
    const int n = setup.land.size();
    Vector v(n);
    for (int x = 0; x < n; ++x) v[x] = fam.phi_prime(mu[x] / setup.pi[x]);
    return grad(v);
}

// K_{mu,F}(x,y) = K_mu(x,y) (F(x,y))_+ off the diagonal: the generator whose
// measure flow moves mu along the field F.
inline Matrix drift_generator(const Matrix& K, const EdgeField& F) {
    const int n = static_cast<int>(K.rows());
    Matrix out = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y) out(x, y) = K(x, y) * pos_part(F(x, y));
    detail::fill_diagonal(out);
    return out;
}

// <F, G>_{mu x K} = 1/2 sum_{x,y} mu(x) K(x,y) F(x,y) G(x,y).
inline double inner_mu_k(const Matrix& K, const Vector& mu, const EdgeField& F,
                         const EdgeField& G) {
    const int n = static_cast<int>(K.rows());
    double s = 0.0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y) s += mu[x] * K(x, y) * F(x, y) * G(x, y);
    return 0.5 * s;
}

struct PropA3Report {
    int trials = 0;
    double max_residual = 0.0;
    bool pass = false;
};

// Steepest-descent vector field mu K_{mu, -grad H} against the Metropolis
// field mu L_pi, on random interior mu, tested on the full indicator basis.
inline PropA3Report verify_prop_A3(const MetropolisSetup& setup, const EntropyFamily& fam,
                                   int trials, std::uint64_t seed = 20240915) {
    if (trials < 1) throw DomainError("trials must be at least 1");
    const int n = setup.land.size();
    const Matrix Lpi = metropolis_generator(setup);
    Rng rng(seed);
    PropA3Report report;
    report.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        Vector mu(n);
        for (int x = 0; x < n; ++x) mu[x] = rng.exponential();
        mu /= mu.sum();
        const Matrix K = markov_riemann_map(setup, fam, mu);
        const EdgeField F = -functional_gradient_K(setup, fam, mu);
        const Matrix KF = drift_generator(K, F);
        for (int z = 0; z < n; ++z) {
            double r = 0.0;
            for (int x = 0; x < n; ++x) r += mu[x] * (KF(x, z) - Lpi(x, z));
            report.max_residual = std::max(report.max_residual, std::abs(r));
        }
    }
    report.pass = report.max_residual <= 1e-10;
    return report;
}

struct PathwiseReport {
    double horizon = 0.0;
    double sup_distance = 0.0;
    bool pass = false;
};

namespace detail {

// exp(t L_pi) acting on measures, via the pi-symmetrization.
struct MetropolisSemigroup {
    Vector sqrt_pi;
    Eigen::SelfAdjointEigenSolver<Matrix> eig;

    MetropolisSemigroup(const Matrix& Lpi, const Vector& pi) {
        const int n = static_cast<int>(pi.size());
        sqrt_pi = pi.cwiseSqrt();
        Matrix B(n, n);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) B(x, y) = sqrt_pi[x] * Lpi(x, y) / sqrt_pi[y];
        B = 0.5 * (B + B.transpose()).eval();
        eig.compute(B);
    }

    Vector measure_at(const Vector& mu0, double t) const {
        const Vector w = eig.eigenvectors().transpose() * mu0.cwiseQuotient(sqrt_pi);
        const Vector scaled =
            (eig.eigenvalues().array() * t).exp().matrix().cwiseProduct(w);
        return sqrt_pi.cwiseProduct(eig.eigenvectors() * scaled);
    }
};

} // namespace detail

// End-to-end check that the H_phi descent trajectory coincides with the
// linear Metropolis flow. The descent side runs through the general flow
// integrator on the derived reversible structure
//   L'(x,y) = (ell(x)/pi(x)) L(x,y) min(pi/ell(x), pi/ell(y)),
// with weight pi and zero objective, in the coordinates rho = mu/pi; the
// linear side is the exact spectral semigroup.
inline PathwiseReport metropolis_pathwise_check(const MetropolisSetup& setup,
                                                const EntropyFamily& fam, const Vector& mu0,
                                                int checks = 33) {
    const int n = setup.land.size();
    const Matrix Lpi = metropolis_generator(setup);
    const double lambda = spectral_gap(Lpi, setup.pi);
    PathwiseReport report;
    report.horizon = 10.0 / lambda;

    Matrix rates = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y || setup.land.L(x, y) == 0.0) continue;
            const double sel = std::min(setup.pi[x] / setup.land.ell[x],
                                        setup.pi[y] / setup.land.ell[y]);
            rates(x, y) = setup.land.ell[x] / setup.pi[x] * setup.land.L(x, y) * sel;
        }
    const EnergyLandscape derived = build_landscape(rates, setup.pi, Vector::Zero(n));

    FlowControls controls;
    controls.snapshot_times.resize(static_cast<std::size_t>(checks));
    for (int i = 0; i < checks; ++i)
        controls.snapshot_times[static_cast<std::size_t>(i)] =
            report.horizon * i / (checks - 1);

    const Density rho0 = mu0.cwiseQuotient(setup.pi);
    const Trajectory traj = integrate_homogeneous(derived, fam, 0.0, rho0, report.horizon,
                                                  controls);

    const detail::MetropolisSemigroup semigroup(Lpi, setup.pi);
    for (const auto& s : traj.snapshots) {
        const Vector mu_flow = s.rho.cwiseProduct(setup.pi);
        const Vector mu_lin = semigroup.measure_at(mu0, s.t);
        report.sup_distance =
            std::max(report.sup_distance, (mu_flow - mu_lin).cwiseAbs().maxCoeff());
    }
    report.pass = report.sup_distance <= 1e-8;
    return report;
}

} // namespace swarm
