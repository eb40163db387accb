#pragma once

// Run configuration: JSON file ingestion with line-numbered parse errors,
// field-named validation errors, defaults matching the builtin ring
// experiment, and builders for the landscape / entropy / schedule the run
// will use.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "swarm/entropy.hpp"
#include "swarm/errors.hpp"
#include "swarm/landscape.hpp"
#include "swarm/schedule.hpp"

namespace swarm {

enum class Mode { stationary, flow_homogeneous, flow_annealed, simulate, verify };

struct RunConfig {
    // landscape source: exactly one of builtin / matrix / edge list
    std::string builtin;
    Matrix rates;
    Vector ell, U;
    std::vector<std::tuple<int, int, double>> edge_list;
    bool from_matrix = false, from_edges = false;

    double m = -1.0;
    std::string entropy_variant = "spliced";
    Mode mode = Mode::stationary;
    std::optional<double> beta;
    double t0 = 1.0, alpha = 0.25;
    bool schedule_given = false;
    int particles = 50;
    std::string kind = "exploration";
    double hybrid_a = 0.5;
    std::optional<std::uint64_t> seed;
    double horizon = 100.0;
    std::vector<double> snapshot_times;
    double snapshot_first = 0.01;
    double snapshot_ratio = std::pow(10.0, 0.125);
    std::string output_dir;
    int trials = 1000;
    std::string suite = "all";
    bool densities_in_csv = false;
    double smoothing_eps = 0.5;
    std::uint64_t max_logged_events = 1000000;
    std::vector<std::string> warnings;
};

namespace detail {

template <typename T>
T config_field(const nlohmann::json& j, const std::string& name, const T& fallback) {
    if (!j.contains(name)) return fallback;
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError("config field '" + name + "' has the wrong type");
    }
}

inline Mode mode_from_string(const std::string& s) {
    if (s == "stationary") return Mode::stationary;
    if (s == "flow-homogeneous") return Mode::flow_homogeneous;
    if (s == "flow-annealed") return Mode::flow_annealed;
    if (s == "simulate") return Mode::simulate;
    if (s == "verify") return Mode::verify;
    throw ValidationError("config field 'mode' must be one of stationary, flow-homogeneous, "
                          "flow-annealed, simulate, verify");
}

inline Vector vector_field(const nlohmann::json& j, const std::string& name) {
    const auto raw = config_field<std::vector<double>>(j, name, {});
    Vector v(static_cast<int>(raw.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) v[static_cast<int>(i)] = raw[i];
    return v;
}

} // namespace detail

inline void validate_config(RunConfig& cfg) {
    const int sources = (cfg.builtin.empty() ? 0 : 1) + (cfg.from_matrix ? 1 : 0) +
                        (cfg.from_edges ? 1 : 0);
    if (sources != 1)
        throw ValidationError("config field 'landscape' must give exactly one of builtin, "
                              "rates, edges");
    if (!cfg.builtin.empty() && cfg.builtin != "ring20")
        throw ValidationError("config field 'landscape.builtin' only supports ring20");

    const bool needs_negative_m =
        cfg.entropy_variant == "spliced" || cfg.entropy_variant == "power";
    if (cfg.entropy_variant != "spliced" && cfg.entropy_variant != "power" &&
        cfg.entropy_variant != "shifted_log" && cfg.entropy_variant != "xlogx")
        throw ValidationError("config field 'entropy' must be spliced, power, shifted_log "
                              "or xlogx");
    if (needs_negative_m && !(cfg.m < 0.0))
        throw ValidationError("config field 'm' must be negative");

    if (cfg.kind != "descent" && cfg.kind != "exploration" && cfg.kind != "hybrid")
        throw ValidationError("config field 'kind' must be descent, exploration or hybrid");
    if (!(cfg.hybrid_a >= 0.0 && cfg.hybrid_a <= 1.0))
        throw ValidationError("config field 'hybrid_a' must lie in [0,1]");
    if (cfg.particles < 1) throw ValidationError("config field 'particles' must be >= 1");
    if (!(cfg.horizon > 0.0)) throw ValidationError("config field 'horizon' must be positive");
    if (!(cfg.t0 >= 1.0)) throw ValidationError("config field 'schedule.t0' must be >= 1");
    if (!(cfg.alpha > 0.0)) throw ValidationError("config field 'schedule.alpha' must be positive");
    if (cfg.trials < 1) throw ValidationError("config field 'trials' must be >= 1");
    if (!(cfg.smoothing_eps > 0.0))
        throw ValidationError("config field 'smoothing_eps' must be positive");
    if (cfg.beta && !(*cfg.beta >= 0.0))
        throw ValidationError("config field 'beta' must be nonnegative");

    if ((cfg.mode == Mode::stationary || cfg.mode == Mode::flow_homogeneous) && !cfg.beta)
        throw ValidationError("config field 'beta' is required for this mode");
    if (cfg.mode == Mode::simulate && !cfg.seed)
        throw ValidationError("config field 'seed' is required for simulate mode");

    if (needs_negative_m && cfg.alpha > kappa(cfg.m) + 1e-15 &&
        (cfg.mode == Mode::flow_annealed ||
         (cfg.mode == Mode::simulate && (cfg.schedule_given || !cfg.beta))))
        cfg.warnings.push_back("schedule alpha=" + std::to_string(cfg.alpha) +
                               " outside guaranteed regime (kappa(m)=" +
                               std::to_string(kappa(cfg.m)) + ")");
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    if (j.contains("landscape")) {
        const auto& land = j.at("landscape");
        if (!land.is_object()) throw ValidationError("config field 'landscape' must be an object");
        cfg.builtin = detail::config_field<std::string>(land, "builtin", "");
        if (land.contains("rates")) {
            const auto rows =
                detail::config_field<std::vector<std::vector<double>>>(land, "rates", {});
            const int n = static_cast<int>(rows.size());
            cfg.rates = Matrix::Zero(n, n);
            for (int x = 0; x < n; ++x) {
                if (static_cast<int>(rows[static_cast<std::size_t>(x)].size()) != n)
                    throw ValidationError("config field 'landscape.rates' must be square");
                for (int y = 0; y < n; ++y)
                    cfg.rates(x, y) = rows[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
            }
            cfg.from_matrix = true;
        }
        if (land.contains("edges")) {
            const auto rows =
                detail::config_field<std::vector<std::vector<double>>>(land, "edges", {});
            for (const auto& r : rows) {
                if (r.size() != 3)
                    throw ValidationError("config field 'landscape.edges' entries must be "
                                          "[x, y, rate]");
                cfg.edge_list.emplace_back(static_cast<int>(r[0]), static_cast<int>(r[1]), r[2]);
            }
            cfg.from_edges = true;
        }
        if (cfg.from_matrix || cfg.from_edges) {
            cfg.ell = detail::vector_field(land, "ell");
            cfg.U = detail::vector_field(land, "U");
            if (cfg.ell.size() == 0)
                throw ValidationError("config field 'landscape.ell' is required");
            if (cfg.U.size() == 0) throw ValidationError("config field 'landscape.U' is required");
        }
    } else {
        cfg.builtin = "ring20";
    }

    cfg.m = detail::config_field<double>(j, "m", cfg.m);
    cfg.entropy_variant = detail::config_field<std::string>(j, "entropy", cfg.entropy_variant);
    cfg.mode = detail::mode_from_string(
        detail::config_field<std::string>(j, "mode", "stationary"));
    if (j.contains("beta")) cfg.beta = detail::config_field<double>(j, "beta", 0.0);
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        if (!s.is_object())
            throw ValidationError("config field 'schedule' must be an object with t0, alpha");
        cfg.t0 = detail::config_field<double>(s, "t0", cfg.t0);
        cfg.alpha = detail::config_field<double>(s, "alpha", cfg.alpha);
        cfg.schedule_given = true;
    }
    cfg.particles = detail::config_field<int>(j, "particles", cfg.particles);
    cfg.kind = detail::config_field<std::string>(j, "kind", cfg.kind);
    cfg.hybrid_a = detail::config_field<double>(j, "hybrid_a", cfg.hybrid_a);
    if (j.contains("seed"))
        cfg.seed = detail::config_field<std::uint64_t>(j, "seed", 0);
    cfg.horizon = detail::config_field<double>(j, "horizon", cfg.horizon);
    if (j.contains("snapshots")) {
        const auto& s = j.at("snapshots");
        if (s.is_array()) {
            cfg.snapshot_times = detail::config_field<std::vector<double>>(j, "snapshots", {});
        } else if (s.is_object()) {
            cfg.snapshot_first = detail::config_field<double>(s, "first", cfg.snapshot_first);
            cfg.snapshot_ratio = detail::config_field<double>(s, "ratio", cfg.snapshot_ratio);
            if (!(cfg.snapshot_first > 0.0) || !(cfg.snapshot_ratio > 1.0))
                throw ValidationError("config field 'snapshots' needs first > 0 and ratio > 1");
        } else {
            throw ValidationError("config field 'snapshots' must be a list or {first, ratio}");
        }
    }
    cfg.output_dir = detail::config_field<std::string>(j, "output_dir", cfg.output_dir);
    cfg.trials = detail::config_field<int>(j, "trials", cfg.trials);
    cfg.suite = detail::config_field<std::string>(j, "suite", cfg.suite);
    cfg.densities_in_csv = detail::config_field<bool>(j, "densities", cfg.densities_in_csv);
    cfg.smoothing_eps = detail::config_field<double>(j, "smoothing_eps", cfg.smoothing_eps);
    cfg.max_logged_events =
        detail::config_field<std::uint64_t>(j, "max_logged_events", cfg.max_logged_events);

    validate_config(cfg);
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open config file: " + path);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw ParseError(path + ":" + std::to_string(line) + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(path + ": config root must be a JSON object");
    return config_from_json(j);
}

inline EnergyLandscape landscape_from_config(RunConfig& cfg) {
    if (!cfg.builtin.empty()) return ring20();
    Vector ell = cfg.ell;
    const double total = ell.sum();
    if (!(total > 0.0)) throw ValidationError("config field 'landscape.ell' must be positive");
    if (std::abs(total - 1.0) > tol::mass) {
        ell /= total;
        cfg.warnings.push_back("landscape.ell normalized to unit mass");
    }
    if (cfg.from_edges) return build_landscape(cfg.edge_list, ell, cfg.U);
    return build_landscape(cfg.rates, ell, cfg.U);
}

inline EntropyFamily entropy_from_config(const RunConfig& cfg) {
    if (cfg.entropy_variant == "spliced") return EntropyFamily::spliced(cfg.m);
    if (cfg.entropy_variant == "power") return EntropyFamily::power(cfg.m);
    if (cfg.entropy_variant == "shifted_log") return EntropyFamily::shifted_log();
    return EntropyFamily::xlogx();
}

inline Schedule schedule_from_config(const RunConfig& cfg) {
    return Schedule::power(cfg.t0, cfg.alpha);
}

} // namespace swarm
