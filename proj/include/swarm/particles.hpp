#pragma once

// Stochastic samplers: exact paths of linear (in)homogeneous Markov jump
// processes, and the interacting-particle swarm whose empirical measure
// feeds back into the nonlinear generators. All draws go through Rng, so a
// seed fixes the event sequence exactly.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
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
#include "swarm/schedule.hpp"

namespace swarm {

struct SamplePath {
    std::vector<double> times;  // jump times, first entry 0
    std::vector<int> states;    // states[i] holds on [times[i], times[i+1])
    double horizon = 0.0;

    int state_at(double t) const {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        return states[static_cast<std::size_t>(it - times.begin()) - 1];
    }
    std::size_t jump_count() const { return times.size() - 1; }
};

namespace detail {

inline void check_generator_matrix(const Matrix& gen) {
    const int n = static_cast<int>(gen.rows());
    if (gen.cols() != n || n < 1) throw ValidationError("generator must be square");
    for (int x = 0; x < n; ++x) {
        double row = 0.0;
        for (int y = 0; y < n; ++y) {
            if (y != x && gen(x, y) < 0.0)
                throw ValidationError("generator off-diagonal entries must be nonnegative");
            row += gen(x, y);
        }
        if (std::abs(row) > 1e-9) throw ValidationError("generator rows must sum to zero");
    }
}

inline int draw_state(Rng& rng, const Vector& m0) {
    double total = 0.0;
    std::vector<double> w(static_cast<std::size_t>(m0.size()));
    for (int i = 0; i < m0.size(); ++i) {
        if (m0[i] < 0.0) throw ValidationError("initial law must be nonnegative");
        w[static_cast<std::size_t>(i)] = m0[i];
        total += m0[i];
    }
    return rng.pick(w, total);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate_rate(const std::function<double(double)>& f, double a, double b,
                             double tol) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

// First T > t with integral_t^T rate = target, or +inf if the mass up to
// the horizon falls short. Chunked march with a bisection finish.
inline double invert_rate_integral(const std::function<double(double)>& rate, double t,
                                   double target, double horizon) {
    double acc = 0.0, s = t;
    while (s < horizon) {
        const double r0 = rate(s);
        double h = std::min(horizon - s, 0.5 / (r0 + 0.25));
        h = std::max(h, 1e-9 * std::max(1.0, s));
        if (s + h > horizon) h = horizon - s;
        const double inc = integrate_rate(rate, s, s + h, 1e-14 * std::max(1.0, target));
        if (acc + inc < target) {
            acc += inc;
            s += h;
            continue;
        }
        double lo = s, hi = s + h;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double part = integrate_rate(rate, s, mid, 1e-15 * std::max(1.0, target));
            if (acc + part < target)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace detail

// Exact path of the homogeneous chain with generator `gen` started from the
// law m0. Zero-rate states absorb.
inline SamplePath sample_homogeneous(const Matrix& gen, const Vector& m0, double horizon,
                                     std::uint64_t seed) {
    detail::check_generator_matrix(gen);
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    const int n = static_cast<int>(gen.rows());
    Rng rng(seed);
    SamplePath path;
    path.horizon = horizon;
    int x = detail::draw_state(rng, m0);
    double t = 0.0;
    path.times.push_back(0.0);
    path.states.push_back(x);
    std::vector<double> w(static_cast<std::size_t>(n));
    while (true) {
        const double rate = -gen(x, x);
        if (!(rate > 0.0)) break;
        const double dt = rng.exponential() / rate;
        if (t + dt > horizon) break;
        t += dt;
        for (int y = 0; y < n; ++y)
            w[static_cast<std::size_t>(y)] = y == x ? 0.0 : std::max(0.0, gen(x, y));
        x = rng.pick(w, rate);
        path.times.push_back(t);
        path.states.push_back(x);
    }
    return path;
}

// Exact path of a time-inhomogeneous chain: jump times solve the
// integrated-rate equation for the current state's exit rate.
inline SamplePath sample_inhomogeneous(const std::function<Matrix(double)>& curve,
                                       const Vector& m0, double horizon, std::uint64_t seed) {
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    Rng rng(seed);
    SamplePath path;
    path.horizon = horizon;
    int x = detail::draw_state(rng, m0);
    double t = 0.0;
    path.times.push_back(0.0);
    path.states.push_back(x);
    while (t < horizon) {
        const double target = rng.exponential();
        const int here = x;
        const auto rate = [&](double s) { return -curve(s)(here, here); };
        const double T = detail::invert_rate_integral(rate, t, target, horizon);
        if (!(T < horizon)) break;
        const Matrix gen = curve(T);
        const int n = static_cast<int>(gen.rows());
        const double exit = -gen(x, x);
        std::vector<double> w(static_cast<std::size_t>(n));
        for (int y = 0; y < n; ++y)
            w[static_cast<std::size_t>(y)] = y == x ? 0.0 : std::max(0.0, gen(x, y));
        x = rng.pick(w, exit);
        t = T;
        path.times.push_back(t);
        path.states.push_back(x);
    }
    return path;
}

struct SwarmConfig {
    int N = 50;
    GeneratorKind kind = GeneratorKind::exploration;
    double hybrid_a = 0.5;
    Schedule schedule = Schedule::constant(0.0);
    double horizon = 1.0;
    std::uint64_t seed = 1;
    std::vector<double> snapshot_times; // empty: {0, horizon}
    double smoothing_eps = 0.5;
    bool literal_race = false; // per-particle clocks, for differential tests
    std::uint64_t max_logged_events = 1000000;
    Density rho0; // empty: uniform density, i.e. particles drawn from ell
};

struct SwarmEvent {
    double t = 0.0;
    int particle = -1, from = -1, to = -1;
};

struct SwarmResult {
    std::vector<double> snapshot_times;
    std::vector<Vector> empirical_mass; // per-state particle fraction
    std::vector<Density> empirical_rho; // mass / ell, no smoothing
    std::vector<Density> smoothed_rho;  // the density the generators saw
    std::vector<std::uint64_t> snapshot_jumps; // cumulative jumps at each snapshot
    std::vector<SwarmEvent> events;
    bool events_truncated = false;
    std::uint64_t total_jumps = 0;
    std::vector<int> final_positions;
};

namespace detail {

// Ordered-pair jump intensity with the empirical density frozen:
// rate(beta) = max(0, p_cl + q_cl beta) + p_un + q_un beta.
struct PairRate {
    int x = -1, y = -1;
    double p_cl = 0.0, q_cl = 0.0;
    bool has_cl = false;
    double p_un = 0.0, q_un = 0.0;

    double at(double beta) const {
        double r = p_un + q_un * beta;
        if (has_cl) r += std::max(0.0, p_cl + q_cl * beta);
        return r;
    }
};

inline std::vector<PairRate> build_pair_rates(const EnergyLandscape& land,
                                              const EntropyFamily& fam, const Density& rho,
                                              GeneratorKind kind, double hybrid_a,
                                              const std::vector<int>& counts) {
    std::vector<PairRate> pairs;
    const double a = kind == GeneratorKind::descent     ? 1.0
                     : kind == GeneratorKind::exploration ? 0.0
                                                          : hybrid_a;
    for (const auto& e : land.edges) {
        for (const auto [x, y] : {std::pair{e.x, e.y}, std::pair{e.y, e.x}}) {
            if (counts[static_cast<std::size_t>(x)] == 0) continue;
            const double Lxy = e.weight / land.ell[x];
            const double ratio = fam.theta(rho[x], rho[y]) / rho[x];
            PairRate pr;
            pr.x = x;
            pr.y = y;
            if (a > 0.0) {
                const double w = a * Lxy * ratio;
                pr.p_cl = -w * (fam.phi_prime(rho[y]) - fam.phi_prime(rho[x]));
                pr.q_cl = -w * (land.U[y] - land.U[x]);
                pr.has_cl = true;
            }
            if (a < 1.0) {
                pr.p_un = (1.0 - a) * Lxy;
                pr.q_un = (1.0 - a) * Lxy * ratio * neg_part(land.U[y] - land.U[x]);
            }
            pairs.push_back(pr);
        }
    }
    return pairs;
}

// Earliest T > t with integral_t^T sum_pairs count(x) rate(beta_s) ds = target,
// walking the activation kinks of the clamped parts. +inf when the mass up to
// the horizon is insufficient.
inline double swarm_jump_time(const std::vector<PairRate>& pairs, const std::vector<int>& counts,
                              const Schedule& schedule, double t, double target, double horizon) {
    const auto total_rate = [&](double beta) {
        double r = 0.0;
        for (const auto& pr : pairs) r += counts[static_cast<std::size_t>(pr.x)] * pr.at(beta);
        return r;
    };

    if (schedule.form() == Schedule::Form::constant) {
        const double R = total_rate(schedule.beta(t));
        if (!(R > 0.0)) return std::numeric_limits<double>::infinity();
        const double T = t + target / R;
        return T < horizon ? T : std::numeric_limits<double>::infinity();
    }

    if (schedule.form() == Schedule::Form::custom) {
        const auto rate_s = [&](double s) { return total_rate(schedule.beta(s)); };
        return invert_rate_integral(rate_s, t, target, horizon);
    }

    // Power form: beta_s increases, each clamped part crosses zero at most once.
    const double beta_now = schedule.beta(t);
    const double beta_end = schedule.beta(horizon);
    std::vector<double> kinks;
    for (const auto& pr : pairs) {
        if (!pr.has_cl || pr.q_cl == 0.0) continue;
        const double bstar = -pr.p_cl / pr.q_cl;
        if (bstar > beta_now * (1.0 + 1e-14) + 1e-14 && bstar < beta_end) kinks.push_back(bstar);
    }
    std::sort(kinks.begin(), kinks.end());
    kinks.push_back(beta_end);

    const double alpha = schedule.alpha();
    const double t0 = schedule.t0();
    const auto time_of_beta = [&](double beta) { return std::pow(1.0 + beta, 1.0 / alpha) - t0; };

    double acc = 0.0, t_seg = t, beta_seg = beta_now;
    for (const double beta_next : kinks) {
        const double t_next = std::min(horizon, time_of_beta(beta_next));
        if (t_next <= t_seg) {
            beta_seg = beta_next;
            continue;
        }
        const double beta_mid = 0.5 * (beta_seg + beta_next);
        double A = 0.0, B = 0.0;
        for (const auto& pr : pairs) {
            const double c = counts[static_cast<std::size_t>(pr.x)];
            A += c * pr.p_un;
            B += c * pr.q_un;
            if (pr.has_cl && pr.p_cl + pr.q_cl * beta_mid > 0.0) {
                A += c * pr.p_cl;
                B += c * pr.q_cl;
            }
        }
        const double seg_mass = A * (t_next - t_seg) + B * schedule.beta_integral(t_seg, t_next);
        if (acc + seg_mass < target) {
            acc += seg_mass;
            t_seg = t_next;
            beta_seg = beta_next;
            continue;
        }
        // Invert inside the segment: F is nondecreasing with F' = A + B beta.
        const double want = target - acc;
        double lo = t_seg, hi = t_next;
        double T = 0.5 * (lo + hi);
        for (int it = 0; it < 100; ++it) {
            const double F = A * (T - t_seg) + B * schedule.beta_integral(t_seg, T) - want;
            if (F > 0.0)
                hi = T;
            else
                lo = T;
            const double deriv = A + B * schedule.beta(T);
            double next = deriv > 0.0 ? T - F / deriv : 0.5 * (lo + hi);
            if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(F) <= 1e-12 * std::max(1.0, target) && it > 0) break;
            T = next;
        }
        return T;
    }
    return std::numeric_limits<double>::infinity();
}

inline Density smooth_counts(const EnergyLandscape& land, const std::vector<int>& counts, int N,
                             double eps) {
    const int n = land.size();
    Density rho(n);
    const double denom = static_cast<double>(N) + eps * n;
    for (int x = 0; x < n; ++x) rho[x] = (counts[static_cast<std::size_t>(x)] + eps) / (denom * land.ell[x]);
    return rho;
}

} // namespace detail

inline SwarmResult simulate_swarm(const EnergyLandscape& land, const EntropyFamily& fam,
                                  const SwarmConfig& config) {
    if (config.N < 1) throw ValidationError("particle count must be at least 1");
    if (!(config.horizon > 0.0)) throw ValidationError("horizon must be positive");
    if (!(config.smoothing_eps > 0.0)) throw ValidationError("smoothing epsilon must be positive");
    if (config.kind == GeneratorKind::hybrid &&
        !(config.hybrid_a >= 0.0 && config.hybrid_a <= 1.0))
        throw ValidationError("hybrid weight must lie in [0,1]");

    const int n = land.size();
    const int N = config.N;
    Density rho0 = config.rho0;
    if (rho0.size() == 0) rho0 = uniform_density(n);
    validate_density(land, rho0);
    Vector m0 = rho0.cwiseProduct(land.ell);

    std::vector<double> snaps = config.snapshot_times;
    if (snaps.empty()) snaps = {0.0, config.horizon};
    std::sort(snaps.begin(), snaps.end());

    Rng rng(config.seed);
    std::vector<int> positions(static_cast<std::size_t>(N));
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(n));
    std::vector<int> slot(static_cast<std::size_t>(N));
    for (int l = 0; l < N; ++l) {
        const int x = detail::draw_state(rng, m0);
        positions[static_cast<std::size_t>(l)] = x;
        ++counts[static_cast<std::size_t>(x)];
        slot[static_cast<std::size_t>(l)] = static_cast<int>(buckets[static_cast<std::size_t>(x)].size());
        buckets[static_cast<std::size_t>(x)].push_back(l);
    }

    SwarmResult result;
    const auto record = [&](double at, const Density& smoothed) {
        result.snapshot_times.push_back(at);
        Vector mass(n);
        for (int x = 0; x < n; ++x)
            mass[x] = static_cast<double>(counts[static_cast<std::size_t>(x)]) / N;
        result.empirical_mass.push_back(mass);
        result.empirical_rho.push_back(mass.cwiseQuotient(land.ell));
        result.smoothed_rho.push_back(smoothed);
        result.snapshot_jumps.push_back(result.total_jumps);
    };

    double t = 0.0;
    std::size_t snap_idx = 0;
    const double kind_a = config.kind == GeneratorKind::descent     ? 1.0
                          : config.kind == GeneratorKind::exploration ? 0.0
                                                                      : config.hybrid_a;

    while (true) {
        const Density rho = detail::smooth_counts(land, counts, N, config.smoothing_eps);
        const auto pairs =
            detail::build_pair_rates(land, fam, rho, config.kind, kind_a, counts);

        double T;
        int winner = -1;
        if (!config.literal_race) {
            const double target = rng.exponential();
            T = detail::swarm_jump_time(pairs, counts, config.schedule, t, target,
                                        config.horizon);
        } else {
            // Literal construction: every particle carries its own clock.
            T = std::numeric_limits<double>::infinity();
            std::vector<int> one(static_cast<std::size_t>(n), 0);
            for (int l = 0; l < N; ++l) {
                const double target = rng.exponential();
                std::fill(one.begin(), one.end(), 0);
                one[static_cast<std::size_t>(positions[static_cast<std::size_t>(l)])] = 1;
                const double Tl = detail::swarm_jump_time(pairs, one, config.schedule, t, target,
                                                          config.horizon);
                if (Tl < T) {
                    T = Tl;
                    winner = l;
                }
            }
        }

        while (snap_idx < snaps.size() && snaps[snap_idx] <= std::min(T, config.horizon)) {
            record(snaps[snap_idx], rho);
            ++snap_idx;
        }
        if (!(T < config.horizon)) break;

        // Jump target drawn at the realized time with the frozen density.
        const double beta_T = config.schedule.beta(T);
        int from, to;
        if (!config.literal_race) {
            std::vector<double> w(pairs.size());
            double total = 0.0;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                w[i] = counts[static_cast<std::size_t>(pairs[i].x)] * pairs[i].at(beta_T);
                total += w[i];
            }
            const auto& pr = pairs[static_cast<std::size_t>(rng.pick(w, total))];
            from = pr.x;
            to = pr.y;
            auto& bucket = buckets[static_cast<std::size_t>(from)];
            std::vector<double> uw(bucket.size(), 1.0);
            winner = bucket[static_cast<std::size_t>(
                rng.pick(uw, static_cast<double>(bucket.size())))];
        } else {
            from = positions[static_cast<std::size_t>(winner)];
            std::vector<double> w;
            std::vector<int> targets;
            double total = 0.0;
            for (const auto& pr : pairs) {
                if (pr.x != from) continue;
                w.push_back(pr.at(beta_T));
                targets.push_back(pr.y);
                total += w.back();
            }
            to = targets[static_cast<std::size_t>(rng.pick(w, total))];
        }

        // Apply the move: swap-remove from the source bucket.
        auto& src = buckets[static_cast<std::size_t>(from)];
        const int s = slot[static_cast<std::size_t>(winner)];
        const int moved = src.back();
        src[static_cast<std::size_t>(s)] = moved;
        slot[static_cast<std::size_t>(moved)] = s;
        src.pop_back();
        auto& dst = buckets[static_cast<std::size_t>(to)];
        slot[static_cast<std::size_t>(winner)] = static_cast<int>(dst.size());
        dst.push_back(winner);
        positions[static_cast<std::size_t>(winner)] = to;
        --counts[static_cast<std::size_t>(from)];
        ++counts[static_cast<std::size_t>(to)];

        t = T;
        ++result.total_jumps;
        if (result.events.size() < config.max_logged_events)
            result.events.push_back({t, winner, from, to});
        else
            result.events_truncated = true;
    }

    result.final_positions = positions;
    return result;
}

struct AgreementReport {
    std::vector<double> times;
    std::vector<double> distances; // L2(ell) distance of densities
    double mc_scale = 0.0;         // 1/sqrt(N)
    double worst = 0.0;
    bool pass = false;
};

// Empirical swarm marginals against the deterministic trajectory at its
// snapshot times.
inline AgreementReport marginal_agreement(const EnergyLandscape& land, const EntropyFamily& fam,
                                          const SwarmConfig& config, const Trajectory& ode) {
    SwarmConfig cfg = config;
    cfg.snapshot_times.clear();
    for (const auto& s : ode.snapshots) cfg.snapshot_times.push_back(s.t);
    const SwarmResult run = simulate_swarm(land, fam, cfg);
    if (run.snapshot_times.size() != ode.snapshots.size())
        throw DomainError("swarm snapshots did not cover the trajectory grid");

    AgreementReport report;
    report.mc_scale = 1.0 / std::sqrt(static_cast<double>(cfg.N));
    for (std::size_t i = 0; i < run.snapshot_times.size(); ++i) {
        const Density diff = run.empirical_rho[i] - ode.snapshots[i].rho;
        const double d = norm_l2(land.ell, diff);
        report.times.push_back(run.snapshot_times[i]);
        report.distances.push_back(d);
        report.worst = std::max(report.worst, d);
    }
    report.pass = report.worst <= 5.0 * report.mc_scale;
    return report;
}

} // namespace swarm
