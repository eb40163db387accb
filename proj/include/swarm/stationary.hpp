#pragma once

// The unique minimizer of the penalized cost at a fixed penalty strength:
// the normalizing constant c solves sum ell(x) g(c - beta U(x)) = 1, the
// minimizing density is eta(x) = g(c - beta U(x)), and zeta = ell * eta is
// the corresponding probability. Also the zero-temperature limit measure
// and the large-beta asymptotics checks.

#include <cmath>
#include <vector>

#include "swarm/entropy.hpp"
#include "swarm/errors.hpp"
#include "swarm/landscape.hpp"

namespace swarm {

struct StationaryProfile {
    double beta = 0.0;
    double c = 0.0;
    Density eta;
    Vector zeta;
};

// Root of the strictly increasing map c -> sum ell g(c - beta U) - 1.
// Bracketed Newton with bisection safeguard; residual below 1e-13.
inline double solve_c(const EnergyLandscape& land, const EntropyFamily& fam, double beta) {
    if (!(beta >= 0.0)) throw DomainError("solve_c requires beta >= 0");
    if (beta == 0.0) return 0.0; // eta = 1 exactly: phi'(1) = 0 for every variant
    const int n = land.size();
    const double ell_min = land.ell.minCoeff();
    const double u_min = land.U.minCoeff(), u_max = land.U.maxCoeff();

    const auto value = [&](double c) {
        double s = 0.0;
        for (int x = 0; x < n; ++x) s += land.ell[x] * fam.g_inverse(c - beta * land.U[x]);
        return s - 1.0;
    };
    const auto slope = [&](double c) {
        double s = 0.0;
        for (int x = 0; x < n; ++x) s += land.ell[x] * fam.g_prime(c - beta * land.U[x]);
        return s;
    };

    double lo = fam.phi_prime(ell_min) + beta * u_min - 1.0;
    double hi = beta * u_max + fam.phi_prime(1.0 / ell_min) + 1.0;
    double flo = value(lo), fhi = value(hi);
    for (int tries = 0; (flo > 0.0 || fhi < 0.0) && tries < 64; ++tries) {
        const double width = std::max(1.0, hi - lo);
        if (flo > 0.0) lo -= width;
        if (fhi < 0.0) hi += width;
        flo = value(lo);
        fhi = value(hi);
    }
    if (flo > 0.0 || fhi < 0.0) throw NoBracket("solve_c could not bracket the root");

    double c = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = value(c);
        if (std::abs(f) <= 1e-14) return c;
        if (f > 0.0)
            hi = c;
        else
            lo = c;
        const double d = slope(c);
        double next = c - f / d;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        c = next;
    }
    if (std::abs(value(c)) <= 1e-13) return c;
    throw NoBracket("solve_c did not converge");
}

inline StationaryProfile solve_eta(const EnergyLandscape& land, const EntropyFamily& fam,
                                   double beta) {
    StationaryProfile out;
    out.beta = beta;
    out.c = solve_c(land, fam, beta);
    out.eta.resize(land.size());
    out.zeta.resize(land.size());
    if (beta == 0.0) {
        out.eta.setOnes();
        out.zeta = land.ell;
        return out;
    }
    for (int x = 0; x < land.size(); ++x) {
        out.eta[x] = fam.g_inverse(out.c - beta * land.U[x]);
        out.zeta[x] = land.ell[x] * out.eta[x];
    }
    return out;
}

// Limit of zeta as the penalty strength grows: ell restricted to the
// minimizer set, renormalized.
inline Vector limit_measure(const EnergyLandscape& land) {
    const auto mins = minimizer_set(land, 0.0);
    double total = 0.0;
    for (int x : mins) total += land.ell[x];
    Vector out = Vector::Zero(land.size());
    for (int x : mins) out[x] = land.ell[x] / total;
    return out;
}

struct AsymptoticsReport {
    std::vector<double> beta_grid;
    // For each off-minimum state: the sequence beta * eta^{1-m} and its limit target.
    std::vector<int> off_states;
    std::vector<std::vector<double>> scaled; // [state][grid]
    std::vector<double> target;              // 1 / ((1-m)(U(x)-minU))
    std::vector<double> extrapolated;        // Richardson in 1/beta
    bool lower_bound_ok = true;  // eta^{1-m} >= 1/(beta(1-m) oscU + 1) at every grid point
    bool monotone_on_min = true; // eta nondecreasing in beta on minimizers
    double final_rel_error = 0.0;
    bool pass = false; // final_rel_error <= 5%
};

inline AsymptoticsReport eta_asymptotics_check(const EnergyLandscape& land,
                                               const EntropyFamily& fam,
                                               const std::vector<double>& beta_grid) {
    if (beta_grid.size() < 2) throw DomainError("asymptotics check needs at least two betas");
    const double m = fam.exponent();
    const double u_min = land.U.minCoeff();
    const double osc_u = osc(land.U);
    const auto mins = minimizer_set(land, 0.0);
    AsymptoticsReport rep;
    rep.beta_grid = beta_grid;
    for (int x = 0; x < land.size(); ++x)
        if (land.U[x] > u_min) rep.off_states.push_back(x);

    std::vector<StationaryProfile> profiles;
    for (double b : beta_grid) profiles.push_back(solve_eta(land, fam, b));

    for (int x : rep.off_states) {
        std::vector<double> seq;
        for (std::size_t k = 0; k < beta_grid.size(); ++k)
            seq.push_back(beta_grid[k] * std::pow(profiles[k].eta[x], 1.0 - m));
        rep.scaled.push_back(seq);
        rep.target.push_back(1.0 / ((1.0 - m) * (land.U[x] - u_min)));
        const std::size_t K = beta_grid.size();
        // Richardson on 1/beta: value ~ limit + C/beta
        const double b1 = beta_grid[K - 2], b2 = beta_grid[K - 1];
        const double v1 = seq[K - 2], v2 = seq[K - 1];
        rep.extrapolated.push_back(v2 + (v2 - v1) * (1.0 / b2) / ((1.0 / b1) - (1.0 / b2)));
    }

    for (std::size_t k = 0; k < beta_grid.size(); ++k) {
        const double b = beta_grid[k];
        for (int x = 0; x < land.size(); ++x) {
            const double lhs = std::pow(profiles[k].eta[x], 1.0 - m);
            if (lhs < 1.0 / (b * (1.0 - m) * osc_u + 1.0) - 1e-12) rep.lower_bound_ok = false;
        }
    }
    for (int x : mins)
        for (std::size_t k = 1; k < beta_grid.size(); ++k)
            if (profiles[k].eta[x] < profiles[k - 1].eta[x] - 1e-12) rep.monotone_on_min = false;

    double worst = 0.0;
    for (std::size_t i = 0; i < rep.off_states.size(); ++i) {
        const double at_last = rep.scaled[i].back();
        worst = std::max(worst, std::abs(at_last - rep.target[i]) / rep.target[i]);
    }
    rep.final_rel_error = worst;
    rep.pass = rep.lower_bound_ok && rep.monotone_on_min && worst <= 0.05;
    return rep;
}

} // namespace swarm
