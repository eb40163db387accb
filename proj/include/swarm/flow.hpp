#pragma once

// Deterministic integration of the mobility-weighted steepest-descent flow
// on the interior of the density simplex, at fixed penalty strength or
// under a ramp schedule. Embedded Runge-Kutta 4(5) stepping, advancing the
// fourth-order solution; steps that lose positivity or drift in mass are
// halved, accepted steps are renormalized; diagnostics are stored on a
// geometric time grid that steps land on exactly.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "swarm/entropy.hpp"
#include "swarm/errors.hpp"
#include "swarm/functionals.hpp"
#include "swarm/landscape.hpp"
#include "swarm/schedule.hpp"
#include "swarm/stationary.hpp"

namespace swarm {

struct FlowControls {
    double atol = 1e-11;
    double rtol = 1e-9;
    double max_step_factor = 0.1; // step cap: factor / (|L|_inf (1 + beta_t))
    double initial_step = 1e-6;
    double mass_drift_tol = 1e-10;
    double lyapunov_slack = 1e-10;
    int max_rejects = 200;
    double snapshot_first = 0.01;                    // first positive snapshot time
    double snapshot_ratio = std::pow(10.0, 0.125);   // geometric grid ratio
    std::vector<double> snapshot_times;              // explicit grid override
};

struct Snapshot {
    double t = 0.0;
    double beta = 0.0;
    double c = 0.0;
    Density rho;
    Density nu; // instantaneous minimizer at this beta
    double cost = 0.0;
    double gap_I = 0.0;
    double gap_G = 0.0;
    double mass_on_min = 0.0;
    double rho_min = 0.0;
    double anneal_bound = std::numeric_limits<double>::quiet_NaN(); // osc U (beta-beta0) + I(0)
    double floor_margin = std::numeric_limits<double>::quiet_NaN(); // rho_min^{-m} K (beta+1) - 1
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    bool homogeneous = true;
    double beta = 0.0;                                          // homogeneous runs
    double alpha = std::numeric_limits<double>::quiet_NaN();    // ramp runs
    double m = std::numeric_limits<double>::quiet_NaN();
    long long accepted = 0;
    long long rejected = 0;
    bool lyapunov_ok = true;
    double max_cost_increase = 0.0;
    double floor_constant = std::numeric_limits<double>::quiet_NaN();
    double gap_I_initial = 0.0;
    Density rho_final;
    double t_final = 0.0;
};

// Flow vector field: out(x) = sum_y L(x,y) theta(rho_x, rho_y)
// (beta (U(y)-U(x)) + phi'(rho_y) - phi'(rho_x)); ell-weighted mean zero.
inline Vector rhs(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                  const Density& rho) {
    const int n = land.size();
    Vector f(n), out = Vector::Zero(n);
    for (int x = 0; x < n; ++x) f[x] = beta * land.U[x] + fam.phi_prime(rho[x]);
    for (const auto& e : land.edges) {
        const double flux = fam.theta(rho[e.x], rho[e.y]) * (f[e.y] - f[e.x]);
        out[e.x] += (e.weight / land.ell[e.x]) * flux;
        out[e.y] -= (e.weight / land.ell[e.y]) * flux;
    }
    return out;
}

namespace detail {

struct FlowWorkspace {
    struct FastEdge {
        int x, y;
        double Lxy, Lyx;
    };
    std::vector<FastEdge> edges;
    double Lnorm = 0.0;
    Vector f, k1, k2, k3, k4, k5, k6, y4, y5, ytmp;

    FlowWorkspace(const EnergyLandscape& land) {
        for (const auto& e : land.edges)
            edges.push_back({e.x, e.y, e.weight / land.ell[e.x], e.weight / land.ell[e.y]});
        for (int x = 0; x < land.size(); ++x) Lnorm = std::max(Lnorm, std::abs(land.L(x, x)));
        const int n = land.size();
        for (Vector* v : {&f, &k1, &k2, &k3, &k4, &k5, &k6, &y4, &y5, &ytmp}) v->resize(n);
    }

    void rhs_into(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                  const Vector& rho, Vector& out) {
        const int n = land.size();
        for (int x = 0; x < n; ++x) f[x] = beta * land.U[x] + fam.phi_prime(rho[x]);
        out.setZero();
        for (const auto& e : edges) {
            const double flux = fam.theta(rho[e.x], rho[e.y]) * (f[e.y] - f[e.x]);
            out[e.x] += e.Lxy * flux;
            out[e.y] -= e.Lyx * flux;
        }
    }
};

inline Trajectory integrate_core(const EnergyLandscape& land, const EntropyFamily& fam,
                                 const Schedule& schedule, const Density& rho0, double horizon,
                                 const FlowControls& controls, bool homogeneous) {
    validate_density(land, rho0);
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");

    Trajectory traj;
    traj.homogeneous = homogeneous;
    traj.m = fam.exponent();
    if (homogeneous) traj.beta = schedule.beta(0.0);
    if (schedule.form() == Schedule::Form::power) traj.alpha = schedule.alpha();

    // Snapshot grid: {0} + geometric + {horizon}.
    std::vector<double> times = controls.snapshot_times;
    if (times.empty()) {
        times.push_back(0.0);
        for (double s = controls.snapshot_first; s < horizon * (1.0 - 1e-12);
             s *= controls.snapshot_ratio)
            times.push_back(s);
        times.push_back(horizon);
    }

    FlowWorkspace ws(land);
    const auto mins = minimizer_set(land, 0.0);
    const double beta0 = schedule.beta(0.0);
    const double osc_u = osc(land.U);
    const double m = fam.exponent();

    Density rho = rho0 / rho0.dot(land.ell);
    const double I0 = gap_I(land, fam, beta0, rho, solve_eta(land, fam, beta0).eta);
    traj.gap_I_initial = I0;

    // Constructive interior-floor constant for ramp runs.
    if (!homogeneous) {
        const double ell_min = land.ell.minCoeff();
        const double C0 = std::max(osc_u, I0 - osc_u * beta0);
        const double C1 = C0 + osc_u;
        const double C2 = std::max((1.0 / ell_min - 1.0) / 2.0, osc_u / (-m));
        const double C3 = C1 + C2;
        traj.floor_constant = m * (m - 1.0) * C3 / ell_min + 1.0 - m;
    }

    StationaryProfile cached_prof;
    bool have_cached = false;

    const auto record = [&](double t) {
        Snapshot s;
        s.t = t;
        s.beta = schedule.beta(t);
        if (!have_cached || !homogeneous) {
            cached_prof = solve_eta(land, fam, s.beta);
            have_cached = true;
        }
        s.c = cached_prof.c;
        s.rho = rho;
        s.nu = cached_prof.eta;
        s.cost = cost(land, fam, s.beta, rho);
        s.gap_I = gap_I_ref(land, fam, rho, cached_prof.eta);
        s.gap_G = gap_G(land, fam, s.beta, rho);
        s.mass_on_min = mass_on(land, rho, mins);
        s.rho_min = rho.minCoeff();
        if (!homogeneous) {
            s.anneal_bound = osc_u * (s.beta - beta0) + I0;
            s.floor_margin =
                std::pow(s.rho_min, -m) * traj.floor_constant * (s.beta + 1.0) - 1.0;
        }
        traj.snapshots.push_back(std::move(s));
    };

    double t = 0.0;
    std::size_t next_time = 0;
    double h_err = controls.initial_step;
    double cost_now = cost(land, fam, schedule.beta(0.0), rho);

    // Fehlberg 4(5) coefficients.
    static constexpr double a21 = 1.0 / 4.0;
    static constexpr double a31 = 3.0 / 32.0, a32 = 9.0 / 32.0;
    static constexpr double a41 = 1932.0 / 2197.0, a42 = -7200.0 / 2197.0, a43 = 7296.0 / 2197.0;
    static constexpr double a51 = 439.0 / 216.0, a52 = -8.0, a53 = 3680.0 / 513.0,
                            a54 = -845.0 / 4104.0;
    static constexpr double a61 = -8.0 / 27.0, a62 = 2.0, a63 = -3544.0 / 2565.0,
                            a64 = 1859.0 / 4104.0, a65 = -11.0 / 40.0;
    static constexpr double c2 = 1.0 / 4.0, c3 = 3.0 / 8.0, c4 = 12.0 / 13.0, c5 = 1.0,
                            c6 = 1.0 / 2.0;
    static constexpr double b1 = 25.0 / 216.0, b3 = 1408.0 / 2565.0, b4 = 2197.0 / 4104.0,
                            b5 = -1.0 / 5.0;
    static constexpr double d1 = 16.0 / 135.0, d3 = 6656.0 / 12825.0, d4 = 28561.0 / 56430.0,
                            d5 = -9.0 / 50.0, d6 = 2.0 / 55.0;

    const int n = land.size();

    while (true) {
        while (next_time < times.size() && t >= times[next_time] - 1e-12 * std::max(1.0, t)) {
            record(times[next_time]);
            ++next_time;
        }
        if (next_time >= times.size() && t >= horizon - 1e-12 * std::max(1.0, horizon)) break;

        const double target = next_time < times.size() ? times[next_time] : horizon;
        int rejects = 0;
        while (true) {
            const double cap =
                controls.max_step_factor / (ws.Lnorm * (1.0 + schedule.beta(t)));
            double h = std::min(h_err, cap);
            bool hit_target = false;
            if (t + h >= target) {
                h = target - t;
                hit_target = true;
            }
            if (!(h > 0.0) || h < 1e-15 * std::max(1.0, t))
                throw StepFailure("step size underflow at t=" + std::to_string(t));

            ws.rhs_into(land, fam, schedule.beta(t), rho, ws.k1);
            ws.ytmp = rho + h * a21 * ws.k1;
            ws.rhs_into(land, fam, schedule.beta(t + c2 * h), ws.ytmp, ws.k2);
            ws.ytmp = rho + h * (a31 * ws.k1 + a32 * ws.k2);
            ws.rhs_into(land, fam, schedule.beta(t + c3 * h), ws.ytmp, ws.k3);
            ws.ytmp = rho + h * (a41 * ws.k1 + a42 * ws.k2 + a43 * ws.k3);
            ws.rhs_into(land, fam, schedule.beta(t + c4 * h), ws.ytmp, ws.k4);
            ws.ytmp = rho + h * (a51 * ws.k1 + a52 * ws.k2 + a53 * ws.k3 + a54 * ws.k4);
            ws.rhs_into(land, fam, schedule.beta(t + c5 * h), ws.ytmp, ws.k5);
            ws.ytmp = rho + h * (a61 * ws.k1 + a62 * ws.k2 + a63 * ws.k3 + a64 * ws.k4 +
                                 a65 * ws.k5);
            ws.rhs_into(land, fam, schedule.beta(t + c6 * h), ws.ytmp, ws.k6);

            ws.y4 = rho + h * (b1 * ws.k1 + b3 * ws.k3 + b4 * ws.k4 + b5 * ws.k5);
            ws.y5 = rho + h * (d1 * ws.k1 + d3 * ws.k3 + d4 * ws.k4 + d5 * ws.k5 + d6 * ws.k6);

            // Stage values must stay meaningful; positivity of the advance is
            // checked below, intermediate negativity shows up as a large error.
            double err = 0.0;
            bool positive = true;
            for (int x = 0; x < n; ++x) {
                if (!(ws.y4[x] > 0.0)) positive = false;
                const double scale =
                    controls.atol + controls.rtol * std::max(std::abs(rho[x]), std::abs(ws.y4[x]));
                const double e = (ws.y5[x] - ws.y4[x]) / scale;
                err += e * e;
            }
            err = std::sqrt(err / n);
            const double mass = positive ? ws.y4.dot(land.ell) : 0.0;
            const bool mass_ok = positive && std::abs(mass - 1.0) <= controls.mass_drift_tol;

            if (!positive || !mass_ok) {
                h_err = 0.5 * h;
                ++traj.rejected;
                if (++rejects > controls.max_rejects)
                    throw StepFailure("positivity could not be maintained at t=" +
                                      std::to_string(t));
                continue;
            }
            if (err > 1.0 && !std::isnan(err)) {
                h_err = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                ++traj.rejected;
                if (++rejects > controls.max_rejects)
                    throw StepFailure("error control failed at t=" + std::to_string(t));
                continue;
            }

            rho = ws.y4 / mass;
            t = hit_target ? target : t + h;
            ++traj.accepted;
            if (!hit_target || h_err < h)
                h_err = h * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-12), -0.2)));

            if (homogeneous) {
                const double cost_next = cost(land, fam, schedule.beta(t), rho);
                const double rise = cost_next - cost_now;
                if (rise > controls.lyapunov_slack) {
                    traj.lyapunov_ok = false;
                    traj.max_cost_increase = std::max(traj.max_cost_increase, rise);
                }
                cost_now = cost_next;
            }
            break;
        }
    }

    traj.rho_final = rho;
    traj.t_final = t;
    return traj;
}

} // namespace detail

inline Trajectory integrate_homogeneous(const EnergyLandscape& land, const EntropyFamily& fam,
                                        double beta, const Density& rho0, double horizon,
                                        const FlowControls& controls = {}) {
    if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
    return detail::integrate_core(land, fam, Schedule::constant(beta), rho0, horizon, controls,
                                  true);
}

inline Trajectory integrate_annealed(const EnergyLandscape& land, const EntropyFamily& fam,
                                     const Schedule& schedule, const Density& rho0, double horizon,
                                     const FlowControls& controls = {}) {
    return detail::integrate_core(land, fam, schedule, rho0, horizon, controls, false);
}

struct RateFit {
    double slope_gap = std::numeric_limits<double>::quiet_NaN();
    double slope_mass_deficit = std::numeric_limits<double>::quiet_NaN();
    double target_gap = std::numeric_limits<double>::quiet_NaN();          // 2 alpha / kappa(m) - 2
    double target_mass_deficit = std::numeric_limits<double>::quiet_NaN(); // -alpha / (1-m)
    int points_gap = 0;
    int points_mass = 0;
};

// Log-log least-squares slopes of the gap and of the off-minimum mass over
// a time window spanning at least two decades.
inline RateFit convergence_rate_fit(const Trajectory& traj, double t_lo, double t_hi) {
    if (traj.homogeneous) throw DomainError("rate fit applies to ramp trajectories");
    std::vector<double> xg, yg, xm, ym;
    for (const auto& s : traj.snapshots) {
        if (s.t < t_lo || s.t > t_hi || s.t <= 0.0) continue;
        if (s.gap_I > 0.0) {
            xg.push_back(std::log(s.t));
            yg.push_back(std::log(s.gap_I));
        }
        const double deficit = 1.0 - s.mass_on_min;
        if (deficit > 0.0) {
            xm.push_back(std::log(s.t));
            ym.push_back(std::log(deficit));
        }
    }
    const auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
        const std::size_t k = x.size();
        if (k < 4) throw WindowTooShort("rate fit needs at least four usable snapshots");
        if (x.back() - x.front() < 2.0 * std::log(10.0) - 1e-9)
            throw WindowTooShort("rate fit needs a window of at least two decades");
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        const double kk = static_cast<double>(k);
        return (kk * sxy - sx * sy) / (kk * sxx - sx * sx);
    };
    RateFit fit;
    fit.slope_gap = slope(xg, yg);
    fit.slope_mass_deficit = slope(xm, ym);
    fit.points_gap = static_cast<int>(xg.size());
    fit.points_mass = static_cast<int>(xm.size());
    if (!std::isnan(traj.alpha) && !std::isnan(traj.m)) {
        fit.target_gap = 2.0 * traj.alpha / kappa(traj.m) - 2.0;
        fit.target_mass_deficit = -traj.alpha / (1.0 - traj.m);
    }
    return fit;
}

} // namespace swarm
