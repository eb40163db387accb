#pragma once

// Discrete calculus on the landscape (gradient, divergence, inner products)
// and the variational quantities of the penalized objective: entropy, cost,
// the value gap I, and the dissipation G, each with a reference-density
// generalization.

#include <Eigen/Dense>
#include <cmath>

#include "swarm/entropy.hpp"
#include "swarm/errors.hpp"
#include "swarm/landscape.hpp"

namespace swarm {

using EdgeField = Eigen::MatrixXd; // F(x,y), zero diagonal; forms are antisymmetric

inline double pos_part(double v) { return v > 0.0 ? v : 0.0; }
inline double neg_part(double v) { return v < 0.0 ? -v : 0.0; }

inline EdgeField grad(const Vector& f) {
    const auto n = f.size();
    EdgeField out(n, n);
    for (Eigen::Index x = 0; x < n; ++x)
        for (Eigen::Index y = 0; y < n; ++y) out(x, y) = f[y] - f[x];
    return out;
}

// div Psi(x) = 1/2 sum_y gen(x,y) (Psi(x,y) - Psi(y,x)).
inline Vector divergence(const Matrix& gen, const EdgeField& Psi) {
    const auto n = gen.rows();
    Vector out = Vector::Zero(n);
    for (Eigen::Index x = 0; x < n; ++x)
        for (Eigen::Index y = 0; y < n; ++y)
            if (x != y) out[x] += 0.5 * gen(x, y) * (Psi(x, y) - Psi(y, x));
    return out;
}

inline double inner_l2(const Vector& measure, const Vector& f, const Vector& g) {
    return (measure.array() * f.array() * g.array()).sum();
}

inline double norm_l2(const Vector& measure, const Vector& f) {
    return std::sqrt(inner_l2(measure, f, f));
}

// 1/2 sum_{x,y} ell(x) L(x,y) F(x,y) G(x,y).
inline double inner_edge(const EnergyLandscape& land, const EdgeField& F, const EdgeField& G) {
    double s = 0.0;
    for (const auto& e : land.edges) s += e.weight * (F(e.x, e.y) * G(e.x, e.y) + F(e.y, e.x) * G(e.y, e.x));
    return 0.5 * s;
}

// Mobility-weighted edge product: 1/2 sum ell(x) L(x,y) theta(rho(x),rho(y)) F G.
inline double inner_rho(const EnergyLandscape& land, const EntropyFamily& fam, const Density& rho,
                        const EdgeField& F, const EdgeField& G) {
    double s = 0.0;
    for (const auto& e : land.edges) {
        const double th = fam.theta(rho[e.x], rho[e.y]);
        s += e.weight * th * (F(e.x, e.y) * G(e.x, e.y) + F(e.y, e.x) * G(e.y, e.x));
    }
    return 0.5 * s;
}

// H(rho) = sum phi(rho(x)) ell(x).
inline double entropy(const EnergyLandscape& land, const EntropyFamily& fam, const Density& rho) {
    double s = 0.0;
    for (int x = 0; x < land.size(); ++x) s += fam.phi(rho[x]) * land.ell[x];
    return s;
}

inline double mean_energy(const EnergyLandscape& land, const Density& rho) {
    return (land.U.array() * rho.array() * land.ell.array()).sum();
}

// Penalized cost: beta * ell[U rho] + H(rho).
inline double cost(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                   const Density& rho) {
    if (!(beta >= 0.0)) throw DomainError("cost requires beta >= 0");
    return beta * mean_energy(land, rho) + entropy(land, fam, rho);
}

// Bregman gap against an arbitrary interior reference density:
// sum ell(x) [phi(rho) - phi(ref) - phi'(ref)(rho - ref)]. Each summand is
// nonnegative by convexity; roundoff negatives are clamped per term.
inline double gap_I_ref(const EnergyLandscape& land, const EntropyFamily& fam, const Density& rho,
                        const Density& ref) {
    double s = 0.0;
    for (int x = 0; x < land.size(); ++x) {
        const double term =
            fam.phi(rho[x]) - fam.phi(ref[x]) - fam.phi_prime(ref[x]) * (rho[x] - ref[x]);
        s += land.ell[x] * pos_part(term);
    }
    return s;
}

// Value gap I(beta, rho) = U_beta(rho) - U_beta(eta), evaluated in Bregman
// form for stability. eta must be the minimizer: beta*U + phi'(eta) must be
// constant on states (first-order condition), asserted to 1e-8.
inline double gap_I(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                    const Density& rho, const Density& eta) {
    // ell-weighted mean of the stationarity residual, then max deviation
    double mean = 0.0;
    for (int x = 0; x < land.size(); ++x)
        mean += land.ell[x] * (beta * land.U[x] + fam.phi_prime(eta[x]));
    for (int x = 0; x < land.size(); ++x) {
        const double dev = std::abs(beta * land.U[x] + fam.phi_prime(eta[x]) - mean);
        if (dev > 1e-8)
            throw NotMinimizer("reference density fails the first-order condition by " +
                               std::to_string(dev));
    }
    return gap_I_ref(land, fam, rho, eta);
}

// Dissipation against a reference: 1/2 sum ell L theta(rho_x,rho_y)
// (phi'(rho_x) - phi'(ref_x) - phi'(rho_y) + phi'(ref_y))^2.
inline double gap_G_ref(const EnergyLandscape& land, const EntropyFamily& fam, const Density& rho,
                        const Density& ref) {
    double s = 0.0;
    for (const auto& e : land.edges) {
        const double th = fam.theta(rho[e.x], rho[e.y]);
        const double d = (fam.phi_prime(rho[e.x]) - fam.phi_prime(ref[e.x])) -
                         (fam.phi_prime(rho[e.y]) - fam.phi_prime(ref[e.y]));
        s += e.weight * th * d * d;
    }
    return s; // ordered-pair half factor cancels against counting each edge once
}

// Dissipation G(beta, rho) = 1/2 sum ell L theta (beta grad U + grad phi'(rho))^2.
inline double gap_G(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                    const Density& rho) {
    double s = 0.0;
    for (const auto& e : land.edges) {
        const double th = fam.theta(rho[e.x], rho[e.y]);
        const double d = beta * (land.U[e.y] - land.U[e.x]) +
                         (fam.phi_prime(rho[e.y]) - fam.phi_prime(rho[e.x]));
        s += e.weight * th * d * d;
    }
    return s;
}

// Metric-gradient edge fields of the two elementary functionals: a linear
// potential gives grad R, an entropy gives grad of the derivative composed
// with the density.
inline EdgeField potential_gradient(const Vector& R) { return grad(R); }

inline EdgeField entropy_gradient(const EntropyFamily& fam, const Density& rho) {
    Vector v(rho.size());
    for (Eigen::Index x = 0; x < rho.size(); ++x) v[x] = fam.phi_prime(rho[x]);
    return grad(v);
}

} // namespace swarm
