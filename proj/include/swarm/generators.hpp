#pragma once

// The measure-dependent jump generators realizing the gradient flow as a
// nonlinear Markov process: the descent kind (moves only downhill in the
// instantaneous potential), the exploration kind (dominates the base
// generator), their convex hybrid, the linearization at the minimizer, and
// the comparison generator used by the functional inequality with an
// arbitrary reference density.

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "swarm/entropy.hpp"
#include "swarm/errors.hpp"
#include "swarm/functionals.hpp"
#include "swarm/landscape.hpp"
#include "swarm/schedule.hpp"
#include "swarm/stationary.hpp"

namespace swarm {

enum class GeneratorKind { descent, exploration, hybrid };

namespace detail {
inline void fill_diagonal(Matrix& G) {
    for (Eigen::Index x = 0; x < G.rows(); ++x) {
        G(x, x) = 0.0;
        G(x, x) = -G.row(x).sum();
    }
}
} // namespace detail

// Descent kind: off-diagonal entry
//   L(x,y) * (theta(rho_x,rho_y)/rho_x) * (beta dU + d phi'(rho))_-  .
// The mobility identity turns the entropy part into rho_y/rho_x - 1, so at
// beta = 0 the entry is L(x,y) (1 - rho_y/rho_x)_+ exactly.
inline Matrix descent_generator(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                                const Density& rho) {
    const int n = land.size();
    Matrix G = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y || land.L(x, y) == 0.0) continue;
            const double th = fam.theta(rho[x], rho[y]);
            const double drift =
                beta * (land.U[y] - land.U[x]) + (fam.phi_prime(rho[y]) - fam.phi_prime(rho[x]));
            G(x, y) = land.L(x, y) * (th / rho[x]) * neg_part(drift);
        }
    detail::fill_diagonal(G);
    return G;
}

// Exploration kind: off-diagonal entry
//   L(x,y) * (1 + (theta/rho_x) * beta * (U(y)-U(x))_-) >= L(x,y).
inline Matrix exploration_generator(const EnergyLandscape& land, const EntropyFamily& fam,
                                    double beta, const Density& rho) {
    const int n = land.size();
    Matrix G = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y || land.L(x, y) == 0.0) continue;
            const double th = fam.theta(rho[x], rho[y]);
            G(x, y) = land.L(x, y) * (1.0 + (th / rho[x]) * beta * neg_part(land.U[y] - land.U[x]));
        }
    detail::fill_diagonal(G);
    return G;
}

inline Matrix hybrid_generator(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                               const Density& rho, double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("hybrid weight must lie in [0,1]");
    return ((1.0 - a) * descent_generator(land, fam, beta, rho) +
            a * exploration_generator(land, fam, beta, rho))
        .eval();
}

inline Matrix make_generator(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                             const Density& rho, GeneratorKind kind, double hybrid_a = 0.5) {
    switch (kind) {
    case GeneratorKind::descent: return descent_generator(land, fam, beta, rho);
    case GeneratorKind::exploration: return exploration_generator(land, fam, beta, rho);
    case GeneratorKind::hybrid: return hybrid_generator(land, fam, beta, rho, hybrid_a);
    }
    throw DomainError("unknown generator kind");
}

// Linearization at the minimizer: pair (Q, w) with
//   Q(x,y) = phi''(eta_x) L(x,y) theta(eta_x, eta_y),
//   w(x) proportional to ell(x)/phi''(eta_x), normalized;
// w is reversible for Q.
inline std::pair<Matrix, Vector> linearized_generator(const EnergyLandscape& land,
                                                      const EntropyFamily& fam, double beta) {
    const auto prof = solve_eta(land, fam, beta);
    const int n = land.size();
    Matrix Q = Matrix::Zero(n, n);
    Vector w(n);
    for (int x = 0; x < n; ++x) {
        const double dd = fam.phi_second(prof.eta[x]);
        w[x] = land.ell[x] / dd;
        for (int y = 0; y < n; ++y)
            if (x != y && land.L(x, y) > 0.0)
                Q(x, y) = dd * land.L(x, y) * fam.theta(prof.eta[x], prof.eta[y]);
    }
    detail::fill_diagonal(Q);
    w /= w.sum();
    return {Q, w};
}

// The sharp constant bounding the dissipation-to-gap ratio from above:
// the minimum over ell-mean-zero directions h of the limiting Rayleigh
// quotient at the minimizer, which equals twice the spectral gap of the
// linearized pair.
inline double lambda_linearized(const EnergyLandscape& land, const EntropyFamily& fam,
                                double beta) {
    const auto [Q, w] = linearized_generator(land, fam, beta);
    return 2.0 * spectral_gap(Q, w);
}

// Comparison pair (K, mu) for a density rho against a reference ref:
//   mu(x) = ell(x) theta(rho_x, ref_x)   (not normalized),
//   K(x,y) = L(x,y) theta(rho_x, rho_y) / theta(rho_x, ref_x),
// so that mu(x) K(x,y) = ell(x) L(x,y) theta(rho_x, rho_y) is symmetric and
// mu is reversible for K by construction. The variant dividing by
// theta(rho_x, ref_y) instead is kept for comparison; it is not reversible
// in general.
struct ComparisonPair {
    Matrix K;
    Vector mu; // unnormalized weight
    double total_mass = 0.0;
};

inline ComparisonPair comparison_generator(const EnergyLandscape& land, const EntropyFamily& fam,
                                           const Density& rho, const Density& ref,
                                           bool cross_reference_denominator = false) {
    const int n = land.size();
    ComparisonPair out;
    out.K = Matrix::Zero(n, n);
    out.mu.resize(n);
    for (int x = 0; x < n; ++x) out.mu[x] = land.ell[x] * fam.theta(rho[x], ref[x]);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y || land.L(x, y) == 0.0) continue;
            const double denom =
                cross_reference_denominator ? fam.theta(rho[x], ref[y]) : fam.theta(rho[x], ref[x]);
            out.K(x, y) = land.L(x, y) * fam.theta(rho[x], rho[y]) / denom;
        }
    detail::fill_diagonal(out.K);
    out.total_mass = out.mu.sum();
    return out;
}

// Large-time entry classification for both generator kinds once the density
// tracks the instantaneous minimizer.
enum class EntryLimit { exact_base, finite, zero, infinite, indeterminate };

struct EdgeLimitReport {
    int x = 0, y = 0;
    EntryLimit exploration_class = EntryLimit::exact_base;
    double exploration_limit = 0.0; // meaningful for exact_base / finite
    EntryLimit descent_class = EntryLimit::zero;
    double exploration_now = 0.0;
    double descent_now = 0.0;
};

inline std::vector<EdgeLimitReport> large_time_limits(const EnergyLandscape& land,
                                                      const EntropyFamily& fam,
                                                      const Schedule& schedule, double t,
                                                      const Density& rho) {
    const double beta = schedule.beta(t);
    const double m = fam.exponent();
    const double u_min = land.U.minCoeff();
    const Matrix Qnow = exploration_generator(land, fam, beta, rho);
    const Matrix Lnow = descent_generator(land, fam, beta, rho);
    std::vector<EdgeLimitReport> out;
    for (int x = 0; x < land.size(); ++x)
        for (int y = 0; y < land.size(); ++y) {
            if (x == y || land.L(x, y) == 0.0) continue;
            EdgeLimitReport rep;
            rep.x = x;
            rep.y = y;
            rep.exploration_now = Qnow(x, y);
            rep.descent_now = Lnow(x, y);
            const double ux = land.U[x], uy = land.U[y];
            if (uy >= ux) {
                rep.exploration_class = EntryLimit::exact_base;
                rep.exploration_limit = land.L(x, y);
            } else if (uy > u_min) {
                rep.exploration_class = EntryLimit::finite;
                rep.exploration_limit =
                    land.L(x, y) * std::pow((uy - u_min) / (ux - u_min), 1.0 / (m - 1.0));
            } else {
                rep.exploration_class = EntryLimit::infinite;
            }
            rep.descent_class = (ux > uy && uy == u_min) ? EntryLimit::indeterminate : EntryLimit::zero;
            out.push_back(rep);
        }
    return out;
}

} // namespace swarm
