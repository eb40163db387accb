#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#ifndef SWARM_CLI_PATH
#error "SWARM_CLI_PATH must point at the built binary"
#endif

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int status = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "swarm-cli-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliRun cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "_stdout.txt";
    const fs::path err = dir / "_stderr.txt";
    const std::string cmd = std::string(SWARM_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int rc = std::system(cmd.c_str());
    CliRun r;
    r.status = rc == -1 ? -1 : WEXITSTATUS(rc);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

nlohmann::json summary_of(const fs::path& dir) {
    return nlohmann::json::parse(slurp(dir / "summary.json"));
}

double num(const nlohmann::json& j, const std::string& key) {
    return std::stod(j.at(key).get<std::string>());
}

void write_three_state_config(const fs::path& p, double beta) {
    std::ofstream out(p);
    out << R"({
  "landscape": {
    "rates": [[-1, 1, 0], [1, -2, 1], [0, 1, -1]],
    "ell": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334],
    "U": [0.0, 1.0, 2.0]
  },
  "m": -1.0,
  "beta": )" << beta
        << "\n}\n";
}

} // namespace

TEST_CASE("cli: stationary profile on the builtin ring") {
    const fs::path dir = scratch("stationary-ring");
    const auto r = cli("stationary --beta 5 --output " + dir.string(), dir);
    REQUIRE(r.status == 0);

    const std::string table = slurp(dir / "stationary.csv");
    CHECK(line_count(table) == 21); // header + 20 states
    CHECK(table.rfind("x,U,eta,zeta", 0) == 0);

    // the zeta column is the swarm distribution itself, mass per state
    std::array<double, 20> zeta{};
    {
        std::istringstream rows(table);
        std::string line;
        std::getline(rows, line); // header
        while (std::getline(rows, line)) {
            const auto a = line.find(','), b = line.find(',', a + 1), c = line.find(',', b + 1);
            zeta[static_cast<std::size_t>(std::stoi(line.substr(0, a)))] =
                std::stod(line.substr(c + 1));
        }
    }
    CHECK(std::abs(zeta[6] + zeta[7] + zeta[8] - 0.6553413017840126) <= 1e-9);

    const auto j = summary_of(dir);
    CHECK(num(j, "beta") == 5.0);
    CHECK(std::abs(num(j, "zeta_mass_on_MU") - zeta[7]) <= 1e-12);
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(r.out.find("zeta_mass_on_MU") != std::string::npos);
}

TEST_CASE("cli: config file drives the run and flags override it") {
    const fs::path dir = scratch("config-file");
    const fs::path cfg = dir / "three.json";
    write_three_state_config(cfg, 2.0);

    const auto r = cli("stationary --config " + cfg.string() + " --output " + dir.string(), dir);
    REQUIRE(r.status == 0);
    auto j = summary_of(dir);
    CHECK(num(j, "beta") == 2.0);
    CHECK(std::abs(num(j, "c") - 1.0357376094875623) <= 1e-10);

    const fs::path dir2 = scratch("config-file-override");
    const auto r2 =
        cli("stationary --config " + cfg.string() + " --beta 7 --output " + dir2.string(), dir2);
    REQUIRE(r2.status == 0);
    CHECK(num(summary_of(dir2), "beta") == 7.0);
}

TEST_CASE("cli: bad input exits with code 2") {
    const fs::path dir = scratch("bad-input");

    SECTION("malformed json") {
        const fs::path cfg = dir / "broken.json";
        std::ofstream(cfg) << "{ not json";
        const auto r = cli("stationary --config " + cfg.string(), dir);
        CHECK(r.status == 2);
        CHECK(r.err.find("config error") != std::string::npos);
    }

    SECTION("invalid field value") {
        const auto r = cli("stationary --beta 5 --m 0.5 --output " + dir.string(), dir);
        CHECK(r.status == 2);
        CHECK(r.err.find("invalid configuration") != std::string::npos);
        CHECK(r.err.find("'m'") != std::string::npos);
    }

    SECTION("stationary needs beta from somewhere") {
        const auto r = cli("stationary --output " + dir.string(), dir);
        CHECK(r.status == 2);
        CHECK(r.err.find("beta") != std::string::npos);
    }

    SECTION("unknown builtin") {
        const auto r = cli("stationary --beta 1 --builtin torus --output " + dir.string(), dir);
        CHECK(r.status == 2);
    }

    SECTION("unknown verify suite") {
        const auto r = cli("verify --suite nonsense --trials 5 --output " + dir.string(), dir);
        CHECK(r.status == 2);
    }

    SECTION("missing subcommand or unparsable flag") {
        CHECK(cli("", dir).status != 0);
        CHECK(cli("flow --beta notanumber", dir).status != 0);
    }
}

TEST_CASE("cli: homogeneous flow run") {
    const fs::path dir = scratch("flow-homogeneous");
    const auto r = cli("flow --beta 5 --horizon 5 --output " + dir.string(), dir);
    REQUIRE(r.status == 0);

    const std::string table = slurp(dir / "flow.csv");
    CHECK(table.rfind("t,beta_t,cost,gap_I,gap_G,mass_on_MU,rho_min", 0) == 0);
    CHECK(table.find("rho_0") == std::string::npos);

    const auto j = summary_of(dir);
    CHECK(j.at("lyapunov_ok").get<std::string>() == "true");
    CHECK(num(j, "final_t") == 5.0);
    CHECK(num(j, "final_gap_I") >= 0.0);

    const fs::path dir2 = scratch("flow-densities");
    const auto r2 = cli("flow --beta 5 --horizon 1 --densities --output " + dir2.string(), dir2);
    REQUIRE(r2.status == 0);
    CHECK(slurp(dir2 / "flow.csv").find("rho_0") != std::string::npos);
}

TEST_CASE("cli: annealed flow run") {
    const fs::path dir = scratch("flow-annealed");
    const auto r = cli("flow --schedule 1,0.25 --horizon 10 --output " + dir.string(), dir);
    REQUIRE(r.status == 0);
    CHECK(fs::exists(dir / "flow.csv"));
    const auto j = summary_of(dir);
    CHECK(num(j, "final_t") == 10.0);

    // a config file pinning the annealed mode works without flags
    const fs::path dir2 = scratch("flow-annealed-config");
    const fs::path cfg = dir2 / "ramp.json";
    std::ofstream(cfg) << R"({"mode": "flow-annealed", "schedule": {"t0": 1.0, "alpha": 0.25},
                             "horizon": 5.0})";
    const auto r2 = cli("flow --config " + cfg.string() + " --output " + dir2.string(), dir2);
    REQUIRE(r2.status == 0);
    CHECK(num(summary_of(dir2), "final_t") == 5.0);
}

TEST_CASE("cli: simulate is reproducible by seed") {
    const fs::path a = scratch("simulate-a");
    const fs::path b = scratch("simulate-b");
    const fs::path c = scratch("simulate-c");
    const std::string base = "simulate --beta 3 --particles 20 --horizon 2 ";

    REQUIRE(cli(base + "--seed 7 --output " + a.string(), a).status == 0);
    REQUIRE(cli(base + "--seed 7 --output " + b.string(), b).status == 0);
    REQUIRE(cli(base + "--seed 8 --output " + c.string(), c).status == 0);

    CHECK(slurp(a / "events.csv") == slurp(b / "events.csv"));
    CHECK(slurp(a / "snapshots.csv") == slurp(b / "snapshots.csv"));
    CHECK(slurp(a / "events.csv") != slurp(c / "events.csv"));

    const auto j = summary_of(a);
    CHECK(j.at("seed").get<std::string>() == "7");
    CHECK(num(j, "total_jumps") > 0.0);

    SECTION("seed is mandatory") {
        const auto r = cli("simulate --beta 3 --output " + a.string(), a);
        CHECK(r.status == 2);
        CHECK(r.err.find("seed") != std::string::npos);
    }
}

TEST_CASE("cli: verify suite") {
    const fs::path dir = scratch("verify-representation");
    const auto r =
        cli("verify --suite representation --trials 25 --seed 5 --output " + dir.string(), dir);
    REQUIRE(r.status == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);

    const std::string table = slurp(dir / "verify.csv");
    CHECK(table.rfind("suite,check,value,threshold,pass", 0) == 0);
    CHECK(table.find("representation") != std::string::npos);
    CHECK(table.find("false") == std::string::npos);

    const auto j = summary_of(dir);
    CHECK(num(j, "failures") == 0.0);
}

TEST_CASE("cli: ring demo produces the full file set") {
    const fs::path dir = scratch("ring-demo");
    const auto r = cli("ring-demo --horizon 50 --particles 10 --seed 3 --output " + dir.string(),
                       dir);
    REQUIRE(r.status == 0);
    for (const char* name : {"ring_flow.csv", "ring_swarm_descent.csv",
                             "ring_swarm_exploration.csv", "ring_hist_descent.csv",
                             "ring_hist_exploration.csv", "summary.json"})
        CHECK(fs::exists(dir / name));

    const auto j = summary_of(dir);
    const double mass = num(j, "flow_final_mass_on_MU");
    CHECK(mass >= 0.0);
    CHECK(mass <= 1.0);
}
