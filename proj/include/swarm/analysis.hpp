#pragma once

// Numerical verification of the functional inequalities: upper estimation of
// the dissipation-to-gap constant chi(beta), its spectral ceiling, the
// comparison-generator inequality chain, and exponential-decay certificates
// extracted from trajectories.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "swarm/entropy.hpp"
#include "swarm/errors.hpp"
#include "swarm/flow.hpp"
#include "swarm/functionals.hpp"
#include "swarm/generators.hpp"
#include "swarm/landscape.hpp"
#include "swarm/rng.hpp"
#include "swarm/stationary.hpp"

namespace swarm {

// Limiting ratio of dissipation to gap along the ray rho = eta + eps h as
// eps -> 0: both quantities are quadratic in eps to leading order and the
// half weights cancel, leaving the ordered-pair quotient
//   sum_{x,y} ell(x)L(x,y) theta(eta_x,eta_y) (phi''(eta_x)h_x - phi''(eta_y)h_y)^2
//   / sum_x ell(x) phi''(eta_x) h_x^2.
inline double rayleigh_quotient_limit(const EnergyLandscape& land, const EntropyFamily& fam,
                                      double beta, const Vector& h) {
    const int n = land.size();
    if (h.size() != n) throw DomainError("direction has wrong dimension");
    const double hnorm = h.cwiseAbs().maxCoeff();
    if (!(hnorm > 0.0)) throw DomainError("direction must be nonzero");
    if (std::abs(land.ell.dot(h)) > 1e-10 * hnorm)
        throw DomainError("direction must have ell-mean zero");
    const auto prof = solve_eta(land, fam, beta);
    Vector g(n);
    for (int x = 0; x < n; ++x) g[x] = fam.phi_second(prof.eta[x]) * h[x];
    double num = 0.0, den = 0.0;
    for (const auto& e : land.edges) {
        const double d = g[e.x] - g[e.y];
        num += 2.0 * e.weight * fam.theta(prof.eta[e.x], prof.eta[e.y]) * d * d;
    }
    for (int x = 0; x < n; ++x) den += land.ell[x] * fam.phi_second(prof.eta[x]) * h[x] * h[x];
    return num / den;
}

struct ChiBudget {
    int starts = 32;
    int evals_per_start = 2000;
    std::uint64_t seed = 1234;
};

struct InequalityReport {
    double beta = 0.0;
    double chi_estimate = 0.0; // upper estimate: the infimum can only be approached from above
    double lambda_linearized = 0.0;
    Density witness;
    double witness_ratio = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool pass = false; // chi_estimate > 0 and <= lambda + 1e-6
};

namespace detail {

// Derivative-free Nelder-Mead on R^d. Returns best value found; best point
// written back into x.
inline double nelder_mead(const std::function<double(const Vector&)>& f, Vector& x,
                          double init_step, int max_evals, int& evals) {
    const int d = static_cast<int>(x.size());
    std::vector<Vector> pts;
    std::vector<double> vals;
    pts.push_back(x);
    vals.push_back(f(x));
    ++evals;
    for (int i = 0; i < d; ++i) {
        Vector p = x;
        p[i] += init_step;
        pts.push_back(p);
        vals.push_back(f(p));
        ++evals;
    }
    const auto order = [&] {
        std::vector<int> idx(pts.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)]; });
        std::vector<Vector> p2;
        std::vector<double> v2;
        for (int i : idx) {
            p2.push_back(pts[static_cast<std::size_t>(i)]);
            v2.push_back(vals[static_cast<std::size_t>(i)]);
        }
        pts.swap(p2);
        vals.swap(v2);
    };
    while (evals < max_evals) {
        order();
        if (vals.back() - vals.front() < 1e-12 * (1.0 + std::abs(vals.front()))) break;
        Vector centroid = Vector::Zero(d);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) centroid += pts[i];
        centroid /= static_cast<double>(d);
        const Vector& worst = pts.back();
        Vector refl = centroid + (centroid - worst);
        double frefl = f(refl);
        ++evals;
        if (frefl < vals.front()) {
            Vector expa = centroid + 2.0 * (centroid - worst);
            double fexpa = f(expa);
            ++evals;
            if (fexpa < frefl) {
                pts.back() = expa;
                vals.back() = fexpa;
            } else {
                pts.back() = refl;
                vals.back() = frefl;
            }
        } else if (frefl < vals[vals.size() - 2]) {
            pts.back() = refl;
            vals.back() = frefl;
        } else {
            Vector contr = centroid + 0.5 * ((frefl < vals.back() ? refl : worst) - centroid);
            double fcontr = f(contr);
            ++evals;
            if (fcontr < std::min(frefl, vals.back())) {
                pts.back() = contr;
                vals.back() = fcontr;
            } else {
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    pts[i] = pts.front() + 0.5 * (pts[i] - pts.front());
                    vals[i] = f(pts[i]);
                    ++evals;
                }
            }
        }
    }
    order();
    x = pts.front();
    return vals.front();
}

} // namespace detail

// Multi-start upper estimation of chi(beta) = inf G/I over interior
// densities. Any evaluation bounds the infimum from above; the spectral
// ceiling lambda_linearized(beta) bounds it too, and the report checks the
// estimate stays below that ceiling.
inline InequalityReport estimate_chi(const EnergyLandscape& land, const EntropyFamily& fam,
                                     double beta, const ChiBudget& budget = {}) {
    if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
    const int n = land.size();
    const auto prof = solve_eta(land, fam, beta);

    InequalityReport report;
    report.beta = beta;
    report.lambda_linearized = lambda_linearized(land, fam, beta);

    const auto ratio_at = [&](const Density& rho) {
        const double I = gap_I_ref(land, fam, rho, prof.eta);
        if (!(I > 1e-14)) return std::numeric_limits<double>::infinity();
        return gap_G(land, fam, beta, rho) / I;
    };
    const auto consider = [&](const Density& rho, double value) {
        if (value < report.witness_ratio) {
            report.witness_ratio = value;
            report.witness = rho;
        }
    };

    // Unconstrained coordinates: rho(z) = exp(z) / sum ell exp(z), last
    // coordinate gauge-fixed to zero.
    const auto density_of = [&](const Vector& z) {
        Density rho(n);
        double zmax = 0.0;
        for (int i = 0; i + 1 < n; ++i) zmax = std::max(zmax, z[i]);
        double mass = 0.0;
        for (int i = 0; i < n; ++i) {
            rho[i] = std::exp((i + 1 < n ? z[i] : 0.0) - zmax);
            mass += land.ell[i] * rho[i];
        }
        rho /= mass;
        return rho;
    };
    const auto objective = [&](const Vector& z) { return ratio_at(density_of(z)); };
    const auto coords_of = [&](const Density& rho) {
        Vector z(n - 1);
        for (int i = 0; i + 1 < n; ++i) z[i] = std::log(rho[i] / rho[n - 1]);
        return z;
    };

    // Spectral direction: eigenvector of the linearized pair mapped back to a
    // density perturbation, automatically ell-mean-zero.
    const auto [Q, w] = linearized_generator(land, fam, beta);
    Matrix B(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) B(x, y) = -std::sqrt(w[x] / w[y]) * Q(x, y);
    B = 0.5 * (B + B.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(B);
    Vector h(n);
    for (int x = 0; x < n; ++x)
        h[x] = eig.eigenvectors().col(1)[x] / std::sqrt(w[x]) / fam.phi_second(prof.eta[x]);

    const double hscale = prof.eta.minCoeff() / (2.0 * h.cwiseAbs().maxCoeff());
    for (const double eps : {1e-2, 1e-3, 1e-4}) {
        const Density rho = prof.eta + (eps * hscale) * h;
        consider(rho, ratio_at(rho));
        ++report.evaluations;
    }

    Rng rng(budget.seed);
    for (int start = 0; start < budget.starts; ++start) {
        Density rho0(n);
        if (start == 0) {
            rho0 = prof.eta + hscale * h;
        } else if (start % 4 == 1) {
            // Dirichlet(1,...,1) mass vector
            Vector mass(n);
            for (int i = 0; i < n; ++i) mass[i] = rng.exponential();
            mass /= mass.sum();
            rho0 = mass.cwiseQuotient(land.ell);
        } else if (start % 4 == 2) {
            // near-minimizer perturbation at a random radius
            Vector d(n);
            for (int i = 0; i < n; ++i) d[i] = rng.uniform() - 0.5;
            d -= land.ell * (land.ell.dot(d) / land.ell.squaredNorm());
            const double r = std::pow(10.0, -1.0 - 2.0 * rng.uniform());
            rho0 = prof.eta + (r * prof.eta.minCoeff() / (0.5 + d.cwiseAbs().maxCoeff())) * d;
        } else {
            // near-boundary: crush one state
            Vector mass(n);
            for (int i = 0; i < n; ++i) mass[i] = 0.1 + rng.uniform();
            mass[static_cast<int>(rng.uniform() * n) % n] = 1e-4;
            mass /= mass.sum();
            rho0 = mass.cwiseQuotient(land.ell);
        }
        for (int i = 0; i < n; ++i) rho0[i] = std::max(rho0[i], 1e-12);
        rho0 /= rho0.dot(land.ell);

        Vector z = coords_of(rho0);
        int evals = 0;
        const double best = detail::nelder_mead(objective, z, 0.05, budget.evals_per_start, evals);
        report.evaluations += evals;
        consider(density_of(z), best);
    }

    report.chi_estimate = report.witness_ratio;
    report.pass = report.chi_estimate > 0.0 &&
                  report.chi_estimate <= report.lambda_linearized + 1e-6;
    return report;
}

struct ComparisonReport {
    double gap_G_star = 0.0;
    double gap_I_star = 0.0;
    double lambda_comparison = 0.0; // spectral gap of the comparison pair
    double lower_bound = 0.0;       // lambda(L) phi''(1/ell_min)/phi''(rho_min)
    double slack_upper = 0.0;       // G* - Lambda I*
    double slack_lower = 0.0;       // (Lambda - bound) I*
    bool pass = false;
};

// The inequality chain G_* >= Lambda(rho) I_* >= lambda phi''(1/ell_min) /
// phi''(rho_min) I_* for an arbitrary interior reference.
inline ComparisonReport comparison_inequality_check(const EnergyLandscape& land,
                                                    const EntropyFamily& fam, const Density& rho,
                                                    const Density& rho_star) {
    validate_density(land, rho);
    validate_density(land, rho_star);
    ComparisonReport report;
    report.gap_G_star = gap_G_ref(land, fam, rho, rho_star);
    report.gap_I_star = gap_I_ref(land, fam, rho, rho_star);
    const auto pair = comparison_generator(land, fam, rho, rho_star);
    report.lambda_comparison = spectral_gap(pair.K, pair.mu);
    const double lambda_base = spectral_gap(land.L, land.ell);
    report.lower_bound = lambda_base * fam.phi_second(1.0 / land.ell.minCoeff()) /
                         fam.phi_second(rho.minCoeff());
    report.slack_upper = report.gap_G_star - report.lambda_comparison * report.gap_I_star;
    report.slack_lower = (report.lambda_comparison - report.lower_bound) * report.gap_I_star;
    const double scale_u = std::max({1.0, report.gap_G_star,
                                     report.lambda_comparison * report.gap_I_star});
    const double scale_l = std::max(1.0, report.lambda_comparison * report.gap_I_star);
    report.pass = report.slack_upper >= -1e-9 * scale_u && report.slack_lower >= -1e-9 * scale_l;
    return report;
}

struct DecayReport {
    double chi_input = 0.0;
    double chi_tilde = std::numeric_limits<double>::infinity(); // largest rate the grid supports
    bool holds_for_input = true;
    int points = 0;
};

// Largest exponential rate chi~ with gap(t) <= exp(-chi~ t) gap(0) across
// the stored grid, and whether the supplied chi satisfies the envelope.
inline DecayReport decay_certificate(const Trajectory& traj, double chi) {
    if (!traj.homogeneous) throw DomainError("decay certificate applies to homogeneous runs");
    if (traj.snapshots.empty()) throw DomainError("trajectory has no snapshots");
    DecayReport report;
    report.chi_input = chi;
    const double I0 = traj.snapshots.front().gap_I;
    for (const auto& s : traj.snapshots) {
        if (s.t <= 0.0) continue;
        ++report.points;
        if (s.gap_I > I0 * std::exp(-chi * s.t) * (1.0 + 1e-9) + 1e-300)
            report.holds_for_input = false;
        if (s.gap_I > 0.0 && I0 > 0.0)
            report.chi_tilde = std::min(report.chi_tilde, std::log(I0 / s.gap_I) / s.t);
    }
    return report;
}

} // namespace swarm
