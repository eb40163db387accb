// Command line front end. Subcommands map one-to-one onto run modes; flags
// override values loaded from --config.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <swarm/swarm.hpp>

namespace {

struct CommonFlags {
    std::string config_path;
    std::string builtin;
    std::string output_dir;
    std::optional<double> m;
    std::optional<std::string> entropy_variant;
    std::optional<double> beta;
    std::optional<std::string> schedule; // "t0,alpha"
    std::optional<double> horizon;
    std::optional<int> particles;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> kind;
    std::optional<double> hybrid_a;
    std::optional<int> trials;
    std::optional<std::string> suite;
    bool densities = false;
    bool annealed = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--builtin", f.builtin, "builtin landscape name (ring20)");
    cmd->add_option("--output", f.output_dir, "output directory");
    cmd->add_option("--m", f.m, "entropy exponent, negative");
    cmd->add_option("--entropy", f.entropy_variant, "spliced|power|shifted_log|xlogx");
}

void parse_schedule(const std::string& text, swarm::RunConfig& cfg) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw swarm::ValidationError("--schedule expects 't0,alpha'");
    try {
        cfg.t0 = std::stod(text.substr(0, comma));
        cfg.alpha = std::stod(text.substr(comma + 1));
    } catch (const std::exception&) {
        throw swarm::ValidationError("--schedule expects 't0,alpha'");
    }
    cfg.schedule_given = true;
}

swarm::RunConfig assemble(const CommonFlags& f, swarm::Mode mode) {
    swarm::RunConfig cfg;
    if (!f.config_path.empty()) cfg = swarm::load_config(f.config_path);
    cfg.mode = mode;
    // bare invocations default to the builtin ring
    if (cfg.builtin.empty() && !cfg.from_matrix && !cfg.from_edges && f.builtin.empty())
        cfg.builtin = "ring20";
    if (!f.builtin.empty()) {
        cfg.builtin = f.builtin;
        cfg.from_matrix = cfg.from_edges = false;
    }
    if (!f.output_dir.empty()) cfg.output_dir = f.output_dir;
    if (f.m) cfg.m = *f.m;
    if (f.entropy_variant) cfg.entropy_variant = *f.entropy_variant;
    if (f.beta) cfg.beta = *f.beta;
    if (f.schedule) parse_schedule(*f.schedule, cfg);
    if (f.horizon) cfg.horizon = *f.horizon;
    if (f.particles) cfg.particles = *f.particles;
    if (f.seed) cfg.seed = *f.seed;
    if (f.kind) cfg.kind = *f.kind;
    if (f.hybrid_a) cfg.hybrid_a = *f.hybrid_a;
    if (f.trials) cfg.trials = *f.trials;
    if (f.suite) cfg.suite = *f.suite;
    if (f.densities) cfg.densities_in_csv = true;
    // An explicit ramp overrides any beta a config file may have carried.
    if (f.schedule && (mode == swarm::Mode::flow_annealed || mode == swarm::Mode::simulate))
        cfg.beta.reset();
    swarm::validate_config(cfg);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy-penalized swarm optimization on finite sets"};
    app.require_subcommand(1);

    CommonFlags stationary_f, flow_f, simulate_f, verify_f;

    auto* stationary = app.add_subcommand("stationary", "solve the penalized stationary profile");
    add_common(stationary, stationary_f);
    stationary->add_option("--beta", stationary_f.beta, "inverse temperature");

    auto* flow = app.add_subcommand("flow", "integrate the deterministic density flow");
    add_common(flow, flow_f);
    flow->add_option("--beta", flow_f.beta, "inverse temperature (homogeneous run)");
    flow->add_option("--schedule", flow_f.schedule, "ramp 't0,alpha' (annealed run)");
    flow->add_flag("--annealed", flow_f.annealed, "use the ramp schedule");
    flow->add_option("--horizon", flow_f.horizon, "final time");
    flow->add_flag("--densities", flow_f.densities, "include density columns in flow.csv");

    auto* simulate = app.add_subcommand("simulate", "run the interacting particle system");
    add_common(simulate, simulate_f);
    simulate->add_option("--beta", simulate_f.beta, "constant inverse temperature");
    simulate->add_option("--schedule", simulate_f.schedule, "ramp 't0,alpha'");
    simulate->add_option("--particles", simulate_f.particles, "particle count");
    simulate->add_option("--seed", simulate_f.seed, "RNG seed");
    simulate->add_option("--kind", simulate_f.kind, "descent|exploration|hybrid");
    simulate->add_option("--hybrid-a", simulate_f.hybrid_a, "hybrid mixing weight in [0,1]");
    simulate->add_option("--horizon", simulate_f.horizon, "final time");

    auto* verify = app.add_subcommand("verify", "run numerical certificate suites");
    add_common(verify, verify_f);
    verify->add_option("--beta", verify_f.beta, "inverse temperature for chi and decay");
    verify->add_option("--suite", verify_f.suite,
                       "all|chi|comparison|decay|representation|metropolis");
    verify->add_option("--trials", verify_f.trials, "random trials per suite");
    verify->add_option("--seed", verify_f.seed, "RNG seed");
    verify->add_option("--horizon", verify_f.horizon, "decay-run horizon");

    swarm::RingDemoOptions demo;
    auto* ring = app.add_subcommand("ring-demo", "builtin ring landscape demonstration");
    ring->add_option("--horizon", demo.horizon, "final time");
    ring->add_option("--seed", demo.seed, "RNG seed");
    ring->add_option("--particles", demo.particles, "particle count");
    ring->add_option("--output", demo.output_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ring->parsed()) return swarm::ring_demo(demo);
        if (stationary->parsed())
            return swarm::run(assemble(stationary_f, swarm::Mode::stationary));
        if (flow->parsed()) {
            // Precedence: explicit ramp flags, then --beta, then whatever the
            // config file pinned, then homogeneous.
            swarm::Mode mode = swarm::Mode::flow_homogeneous;
            if (flow_f.annealed || flow_f.schedule) {
                mode = swarm::Mode::flow_annealed;
            } else if (!flow_f.beta && !flow_f.config_path.empty()) {
                const swarm::RunConfig probe = swarm::load_config(flow_f.config_path);
                if (probe.mode == swarm::Mode::flow_annealed ||
                    (probe.schedule_given && !probe.beta))
                    mode = swarm::Mode::flow_annealed;
            }
            return swarm::run(assemble(flow_f, mode));
        }
        if (simulate->parsed()) return swarm::run(assemble(simulate_f, swarm::Mode::simulate));
        if (verify->parsed()) return swarm::run(assemble(verify_f, swarm::Mode::verify));
    } catch (const swarm::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const swarm::ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const swarm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
