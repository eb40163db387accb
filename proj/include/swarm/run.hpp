#pragma once

// Experiment orchestration: executes a validated RunConfig, writes the CSV
// artifacts plus one machine-readable JSON summary per run, and returns a
// process exit status. Also the builtin ring demonstration combining the
// deterministic ramp flow with particle runs.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarm/analysis.hpp"
#include "swarm/config.hpp"
#include "swarm/csv.hpp"
#include "swarm/entropy.hpp"
#include "swarm/flow.hpp"
#include "swarm/functionals.hpp"
#include "swarm/generators.hpp"
#include "swarm/landscape.hpp"
#include "swarm/metropolis.hpp"
#include "swarm/particles.hpp"
#include "swarm/rng.hpp"
#include "swarm/stationary.hpp"

namespace swarm {

inline std::filesystem::path resolve_output_dir(const RunConfig& cfg) {
    std::filesystem::path dir;
    if (!cfg.output_dir.empty()) {
        dir = cfg.output_dir;
    } else if (const char* env = std::getenv("SWARM_OUTPUT_DIR"); env && *env) {
        dir = env;
    } else {
        dir = ".";
    }
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::vector<double> geometric_grid(double first, double ratio, double horizon) {
    std::vector<double> g{0.0};
    for (double s = first; s < horizon * (1.0 - 1e-12); s *= ratio) g.push_back(s);
    g.push_back(horizon);
    return g;
}

namespace detail {

// Printed numerics are mirrored here so every number also lands in a CSV.
class Summary {
  public:
    void add(const std::string& key, double v) { add_raw(key, format_double(v)); }
    void add(const std::string& key, std::uint64_t v) { add_raw(key, std::to_string(v)); }
    void add(const std::string& key, int v) { add_raw(key, std::to_string(v)); }
    void add(const std::string& key, bool v) { add_raw(key, v ? "true" : "false"); }
    void add(const std::string& key, const std::string& v) { add_raw(key, v); }

    void write(const std::filesystem::path& dir, const RunConfig& cfg) const {
        CsvWriter csv((dir / "summary.csv").string());
        csv.field("key").field("value");
        csv.end_row();
        for (const auto& [k, v] : rows_) {
            csv.field(k).field(v);
            csv.end_row();
        }
        nlohmann::json j;
        for (const auto& [k, v] : rows_) j[k] = v;
        j["warnings"] = cfg.warnings;
        std::ofstream out(dir / "summary.json", std::ios::binary);
        out << j.dump(2) << '\n';
    }

    void print() const {
        for (const auto& [k, v] : rows_) std::cout << k << " = " << v << '\n';
    }

  private:
    void add_raw(const std::string& key, std::string value) {
        rows_.emplace_back(key, std::move(value));
    }
    std::vector<std::pair<std::string, std::string>> rows_;
};

inline Density random_density(Rng& rng, const EnergyLandscape& land) {
    Vector mass(land.size());
    for (int i = 0; i < land.size(); ++i) mass[i] = rng.exponential();
    mass /= mass.sum();
    return mass.cwiseQuotient(land.ell);
}

inline GeneratorKind kind_from_string(const std::string& s) {
    if (s == "descent") return GeneratorKind::descent;
    if (s == "exploration") return GeneratorKind::exploration;
    return GeneratorKind::hybrid;
}

inline void write_flow_csv(const std::filesystem::path& path, const Trajectory& traj,
                           bool densities) {
    CsvWriter csv(path.string());
    csv.field("t").field("beta_t").field("cost").field("gap_I").field("gap_G")
        .field("mass_on_MU").field("rho_min");
    if (densities && !traj.snapshots.empty())
        for (int x = 0; x < traj.snapshots.front().rho.size(); ++x)
            csv.field("rho_" + std::to_string(x));
    csv.end_row();
    for (const auto& s : traj.snapshots) {
        csv.field(s.t).field(s.beta).field(s.cost).field(s.gap_I).field(s.gap_G)
            .field(s.mass_on_min).field(s.rho_min);
        if (densities)
            for (int x = 0; x < s.rho.size(); ++x) csv.field(s.rho[x]);
        csv.end_row();
    }
}

struct VerifyRow {
    std::string suite, check;
    double value = 0.0, threshold = 0.0;
    bool pass = false;
};

inline void verify_chi(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                       std::vector<VerifyRow>& rows) {
    const auto report = estimate_chi(land, fam, beta);
    rows.push_back({"chi", "estimate_positive", report.chi_estimate, 0.0,
                    report.chi_estimate > 0.0});
    rows.push_back({"chi", "estimate_below_spectral_ceiling",
                    report.chi_estimate - report.lambda_linearized, 1e-6,
                    report.chi_estimate <= report.lambda_linearized + 1e-6});
}

inline void verify_comparison(const EnergyLandscape& land, int trials, std::uint64_t seed,
                              std::vector<VerifyRow>& rows) {
    Rng rng(seed);
    const double ms[] = {-0.5, -1.0, -2.0};
    int violations = 0;
    double worst_upper = 0.0, worst_lower = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const EntropyFamily fam = EntropyFamily::spliced(ms[trial % 3]);
        const Density rho = random_density(rng, land);
        const Density ref = random_density(rng, land);
        const auto rep = comparison_inequality_check(land, fam, rho, ref);
        if (!rep.pass) ++violations;
        worst_upper = std::min(worst_upper, rep.slack_upper);
        worst_lower = std::min(worst_lower, rep.slack_lower);
    }
    rows.push_back({"comparison", "violations", static_cast<double>(violations), 0.0,
                    violations == 0});
    rows.push_back({"comparison", "worst_upper_slack", worst_upper, 0.0, violations == 0});
    rows.push_back({"comparison", "worst_lower_slack", worst_lower, 0.0, violations == 0});
}

inline void verify_decay(const EnergyLandscape& land, const EntropyFamily& fam, double beta,
                         double horizon, std::vector<VerifyRow>& rows) {
    const auto chi_report = estimate_chi(land, fam, beta);
    const auto traj = integrate_homogeneous(land, fam, beta, uniform_density(land.size()),
                                            horizon);
    const auto cert = decay_certificate(traj, chi_report.chi_estimate);
    rows.push_back({"decay", "lyapunov_monotone", traj.max_cost_increase, 1e-10,
                    traj.lyapunov_ok});
    rows.push_back({"decay", "grid_rate_positive", cert.chi_tilde, 0.0, cert.chi_tilde > 0.0});
}

inline void verify_representation(const EnergyLandscape& land, const EntropyFamily& fam,
                                  double beta, int trials, std::uint64_t seed,
                                  std::vector<VerifyRow>& rows) {
    Rng rng(seed);
    double worst = 0.0;
    const int n = land.size();
    for (int trial = 0; trial < trials; ++trial) {
        const Density rho = random_density(rng, land);
        const Vector field = rhs(land, fam, beta, rho);
        for (const GeneratorKind kind : {GeneratorKind::descent, GeneratorKind::exploration}) {
            const Matrix gen = make_generator(land, fam, beta, rho, kind);
            for (int z = 0; z < n; ++z) {
                double lhs = 0.0;
                for (int x = 0; x < n; ++x) lhs += rho[x] * land.ell[x] * gen(x, z);
                worst = std::max(worst, std::abs(lhs - land.ell[z] * field[z]));
            }
        }
    }
    rows.push_back({"representation", "max_residual", worst, 1e-9, worst <= 1e-9});
}

inline void verify_metropolis(const EnergyLandscape& land, int trials, std::uint64_t seed,
                              std::vector<VerifyRow>& rows) {
    Rng rng(seed);
    Vector pi(land.size());
    for (int i = 0; i < land.size(); ++i) pi[i] = 0.2 + rng.uniform();
    pi /= pi.sum();
    const auto setup = make_metropolis_setup(land, pi);

    const EntropyFamily variants[] = {EntropyFamily::xlogx(), EntropyFamily::spliced(-0.5),
                                      EntropyFamily::spliced(-1.0), EntropyFamily::spliced(-2.0)};
    double worst = 0.0;
    const int per = std::max(1, trials / 4);
    for (std::size_t v = 0; v < 4; ++v) {
        const auto rep = verify_prop_A3(setup, variants[v], per, seed + v + 1);
        worst = std::max(worst, rep.max_residual);
    }
    rows.push_back({"metropolis", "max_field_residual", worst, 1e-10, worst <= 1e-10});

    Vector mu0(land.size());
    for (int i = 0; i < land.size(); ++i) mu0[i] = rng.exponential();
    mu0 /= mu0.sum();
    const auto path_rep = metropolis_pathwise_check(setup, EntropyFamily::spliced(-1.0), mu0);
    rows.push_back({"metropolis", "pathwise_sup_distance", path_rep.sup_distance, 1e-8,
                    path_rep.pass});
}

} // namespace detail

inline int run(RunConfig cfg) {
    const auto dir = resolve_output_dir(cfg);
    EnergyLandscape land = landscape_from_config(cfg);
    const EntropyFamily fam = entropy_from_config(cfg);
    detail::Summary summary;
    const auto mins = minimizer_set(land, 0.0);
    int status = 0;

    switch (cfg.mode) {
    case Mode::stationary: {
        const auto prof = solve_eta(land, fam, *cfg.beta);
        CsvWriter csv((dir / "stationary.csv").string());
        csv.field("x").field("U").field("eta").field("zeta");
        csv.end_row();
        for (int x = 0; x < land.size(); ++x) {
            csv.field(x).field(land.U[x]).field(prof.eta[x]).field(prof.zeta[x]);
            csv.end_row();
        }
        double min_mass = 0.0;
        for (int x : mins) min_mass += prof.zeta[x];
        summary.add("beta", prof.beta);
        summary.add("c", prof.c);
        summary.add("zeta_mass_on_MU", min_mass);
        break;
    }
    case Mode::flow_homogeneous:
    case Mode::flow_annealed: {
        FlowControls controls;
        controls.snapshot_first = cfg.snapshot_first;
        controls.snapshot_ratio = cfg.snapshot_ratio;
        controls.snapshot_times = cfg.snapshot_times;
        Trajectory traj;
        if (cfg.mode == Mode::flow_homogeneous) {
            traj = integrate_homogeneous(land, fam, *cfg.beta, uniform_density(land.size()),
                                         cfg.horizon, controls);
            summary.add("lyapunov_ok", traj.lyapunov_ok);
            summary.add("max_cost_increase", traj.max_cost_increase);
        } else {
            traj = integrate_annealed(land, fam, schedule_from_config(cfg),
                                      uniform_density(land.size()), cfg.horizon, controls);
            try {
                const auto fit = convergence_rate_fit(traj, cfg.horizon / 1000.0, cfg.horizon);
                summary.add("slope_gap", fit.slope_gap);
                summary.add("target_gap", fit.target_gap);
                summary.add("slope_mass_deficit", fit.slope_mass_deficit);
                summary.add("target_mass_deficit", fit.target_mass_deficit);
            } catch (const WindowTooShort&) {
                summary.add("rate_fit", std::string("window too short"));
            }
        }
        detail::write_flow_csv(dir / "flow.csv", traj, cfg.densities_in_csv);
        const auto& last = traj.snapshots.back();
        summary.add("final_t", last.t);
        summary.add("final_gap_I", last.gap_I);
        summary.add("final_mass_on_MU", last.mass_on_min);
        summary.add("accepted_steps", static_cast<std::uint64_t>(traj.accepted));
        summary.add("rejected_steps", static_cast<std::uint64_t>(traj.rejected));
        break;
    }
    case Mode::simulate: {
        SwarmConfig sc;
        sc.N = cfg.particles;
        sc.kind = detail::kind_from_string(cfg.kind);
        sc.hybrid_a = cfg.hybrid_a;
        sc.schedule = cfg.beta ? Schedule::constant(*cfg.beta) : schedule_from_config(cfg);
        sc.horizon = cfg.horizon;
        sc.seed = *cfg.seed;
        sc.smoothing_eps = cfg.smoothing_eps;
        sc.max_logged_events = cfg.max_logged_events;
        sc.snapshot_times = cfg.snapshot_times.empty()
                                ? geometric_grid(cfg.snapshot_first, cfg.snapshot_ratio,
                                                 cfg.horizon)
                                : cfg.snapshot_times;
        const auto result = simulate_swarm(land, fam, sc);

        CsvWriter snaps((dir / "snapshots.csv").string());
        snaps.field("snapshot_t").field("state").field("empirical_mass");
        snaps.end_row();
        for (std::size_t i = 0; i < result.snapshot_times.size(); ++i)
            for (int x = 0; x < land.size(); ++x) {
                snaps.field(result.snapshot_times[i]).field(x).field(result.empirical_mass[i][x]);
                snaps.end_row();
            }
        CsvWriter events((dir / "events.csv").string());
        events.field("event_index").field("t").field("particle").field("from").field("to");
        events.end_row();
        for (std::size_t i = 0; i < result.events.size(); ++i) {
            const auto& e = result.events[i];
            events.field(static_cast<std::uint64_t>(i)).field(e.t).field(e.particle)
                .field(e.from).field(e.to);
            events.end_row();
        }
        double min_mass = 0.0;
        for (int x : mins) min_mass += result.empirical_mass.back()[x];
        summary.add("total_jumps", result.total_jumps);
        summary.add("events_logged", static_cast<std::uint64_t>(result.events.size()));
        summary.add("final_empirical_mass_on_MU", min_mass);
        summary.add("seed", *cfg.seed);
        break;
    }
    case Mode::verify: {
        std::vector<detail::VerifyRow> rows;
        const double beta = cfg.beta.value_or(5.0);
        const std::uint64_t seed = cfg.seed.value_or(8261);
        const bool all = cfg.suite == "all";
        if (all || cfg.suite == "chi") detail::verify_chi(land, fam, beta, rows);
        if (all || cfg.suite == "comparison")
            detail::verify_comparison(land, cfg.trials, seed, rows);
        if (all || cfg.suite == "decay")
            detail::verify_decay(land, fam, beta, std::min(cfg.horizon, 200.0), rows);
        if (all || cfg.suite == "representation")
            detail::verify_representation(land, fam, beta, cfg.trials, seed + 17, rows);
        if (all || cfg.suite == "metropolis")
            detail::verify_metropolis(land, cfg.trials, seed + 34, rows);
        if (rows.empty())
            throw ValidationError("config field 'suite' must be all, chi, comparison, decay, "
                                  "representation or metropolis");

        CsvWriter csv((dir / "verify.csv").string());
        csv.field("suite").field("check").field("value").field("threshold").field("pass");
        csv.end_row();
        int failures = 0;
        for (const auto& r : rows) {
            csv.field(r.suite).field(r.check).field(r.value).field(r.threshold)
                .field(r.pass ? "true" : "false");
            csv.end_row();
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.suite << "." << r.check
                      << " value=" << format_double(r.value) << '\n';
            if (!r.pass) ++failures;
        }
        summary.add("checks", static_cast<int>(rows.size()));
        summary.add("failures", failures);
        if (failures > 0) status = 1;
        break;
    }
    }

    summary.write(dir, cfg);
    summary.print();
    for (const auto& w : cfg.warnings) std::cout << "warning: " << w << '\n';
    return status;
}

struct RingDemoOptions {
    double horizon = 10000.0;
    std::uint64_t seed = 42;
    int particles = 50;
    std::string output_dir;
};

// The builtin ring experiment: ramp flow plus particle runs of both kinds,
// with histogram snapshots and distance-versus-transition-count series.
inline int ring_demo(const RingDemoOptions& opt) {
    RunConfig cfg;
    cfg.builtin = "ring20";
    cfg.output_dir = opt.output_dir;
    const auto dir = resolve_output_dir(cfg);

    const EnergyLandscape land = ring20();
    const EntropyFamily fam = EntropyFamily::spliced(-1.0);
    const Schedule schedule = Schedule::power(1.0, 0.25);
    const auto mins = minimizer_set(land, 0.0);

    std::vector<double> hist_times;
    for (int k = 0; k < 16; ++k) hist_times.push_back(std::pow(opt.horizon, k / 15.0));
    std::vector<double> grid = geometric_grid(0.01, std::pow(10.0, 0.125), opt.horizon);
    grid.insert(grid.end(), hist_times.begin(), hist_times.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    FlowControls controls;
    controls.snapshot_times = grid;
    const Trajectory traj =
        integrate_annealed(land, fam, schedule, uniform_density(land.size()), opt.horizon,
                           controls);
    detail::write_flow_csv(dir / "ring_flow.csv", traj, true);

    detail::Summary summary;
    summary.add("flow_final_mass_on_MU", traj.snapshots.back().mass_on_min);

    const std::set<double> hist_set(hist_times.begin(), hist_times.end());
    for (const GeneratorKind kind : {GeneratorKind::descent, GeneratorKind::exploration}) {
        const std::string name = kind == GeneratorKind::descent ? "descent" : "exploration";
        SwarmConfig sc;
        sc.N = opt.particles;
        sc.kind = kind;
        sc.schedule = schedule;
        sc.horizon = opt.horizon;
        sc.seed = opt.seed;
        sc.snapshot_times = grid;
        const auto result = simulate_swarm(land, fam, sc);

        CsvWriter series((dir / ("ring_swarm_" + name + ".csv")).string());
        series.field("snapshot_t").field("transitions").field("dist_to_flow")
            .field("dist_to_minimizer").field("empirical_mass_on_MU");
        series.end_row();
        CsvWriter hist((dir / ("ring_hist_" + name + ".csv")).string());
        hist.field("snapshot_t").field("state").field("empirical_mass");
        hist.end_row();

        for (std::size_t i = 0; i < result.snapshot_times.size(); ++i) {
            const auto& s = traj.snapshots[i];
            const double dist_flow = norm_l2(land.ell, result.empirical_rho[i] - s.rho);
            const double dist_nu = norm_l2(land.ell, result.empirical_rho[i] - s.nu);
            double min_mass = 0.0;
            for (int x : mins) min_mass += result.empirical_mass[i][x];
            series.field(result.snapshot_times[i]).field(result.snapshot_jumps[i])
                .field(dist_flow).field(dist_nu).field(min_mass);
            series.end_row();
            if (hist_set.count(result.snapshot_times[i]))
                for (int x = 0; x < land.size(); ++x) {
                    hist.field(result.snapshot_times[i]).field(x)
                        .field(result.empirical_mass[i][x]);
                    hist.end_row();
                }
        }
        double final_min_mass = 0.0;
        for (int x : mins) final_min_mass += result.empirical_mass.back()[x];
        summary.add(name + "_total_jumps", result.total_jumps);
        summary.add(name + "_final_mass_on_MU", final_min_mass);
    }

    summary.write(dir, cfg);
    summary.print();
    return 0;
}

} // namespace swarm
