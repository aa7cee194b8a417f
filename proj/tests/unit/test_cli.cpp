#include "doctest.h"

#include "btc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace btc;
using namespace btc::cli;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string> kNoEnv;

RunConfig parse(std::vector<std::string> args, const std::map<std::string, std::string>& env = kNoEnv) {
    args.insert(args.begin(), "btc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_config(static_cast<int>(argv.size()), argv.data(), &env);
}

int run_cli(std::vector<std::string> args, std::string* err_out = nullptr) {
    args.insert(args.begin(), "btc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_out) *err_out = err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("btc_cli_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& s) const { return (path / s).string(); }
};

}  // namespace

TEST_CASE("flags") {
    const RunConfig c = parse({"--omega", "2", "--gamma", "1", "--nbeta", "1", "--nspins", "40", "lindblad"});
    CHECK(c.command == Command::lindblad);
    CHECK(c.params.omega_rabi == 2.0);
    CHECK(c.params.gamma == 1.0);
    CHECK(c.params.n_beta == 1.0);
    CHECK(c.params.n_spins == 40);
    CHECK(c.origin.at("omega").find("flag") == 0);
    CHECK(c.origin.at("dt") == "default");
    CHECK(parse({"--t-max", "3", "meanfield"}).t_max == 3.0);
    CHECK(parse({"--t_max", "4", "meanfield"}).t_max == 4.0);
}

TEST_CASE("precedence: flag > env > file > default") {
    TempDir dir("prec");
    {
        std::ofstream f(dir / "run.cfg");
        f << "# comment\nnspins = 10\nomega = 0.5\ngamma=1.0\n";
    }
    CHECK(parse({"--config", dir / "run.cfg", "steady"}).params.n_spins == 10);
    CHECK(parse({"--config", dir / "run.cfg", "--nspins", "20", "steady"}).params.n_spins == 20);
    const std::map<std::string, std::string> env = {{"BTC_NSPINS", "15"}, {"BTC_OMEGA", "0.7"}};
    const RunConfig c = parse({"--config", dir / "run.cfg", "steady"}, env);
    CHECK(c.params.n_spins == 15);
    CHECK(c.params.omega_rabi == 0.7);
    CHECK(parse({"--config", dir / "run.cfg", "--nspins", "20", "steady"}, env).params.n_spins == 20);
    const std::map<std::string, std::string> env_cfg = {{"BTC_CONFIG", dir / "run.cfg"}};
    CHECK(parse({"steady"}, env_cfg).params.omega_rabi == 0.5);
}

TEST_CASE("errors name what is wrong") {
    auto message = [](std::vector<std::string> args, const std::map<std::string, std::string>& env = kNoEnv) {
        try {
            parse(std::move(args), env);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message({"--nbeta", "-1", "lindblad"}).find("n_beta >= 0") != std::string::npos);
    CHECK(message({"--omega", "two", "lindblad"}).find("omega") != std::string::npos);
    CHECK(message({"--bogus", "1", "lindblad"}) != "");
    CHECK(message({"frobnicate"}).find("frobnicate") != std::string::npos);
    CHECK(message({}).find("command") != std::string::npos);
    CHECK(message({"lindblad"}, {{"BTC_OMEGAA", "2"}}).find("BTC_OMEGAA") != std::string::npos);

    TempDir dir("err");
    {
        std::ofstream f(dir / "bad.cfg");
        f << "nspins = 4\n\nomgea = 2\n";
    }
    const std::string m = message({"--config", dir / "bad.cfg", "lindblad"});
    CHECK(m.find(":3") != std::string::npos);
    CHECK(m.find("omgea") != std::string::npos);
}

TEST_CASE("beta and nbeta") {
    const RunConfig c = parse({"--beta", std::to_string(std::log(2.0)), "lindblad"});
    CHECK(c.params.n_beta == doctest::Approx(1.0));
    CHECK_THROWS_AS(parse({"--beta", "1", "--nbeta", "2", "lindblad"}), ConfigError);
}

TEST_CASE("meanfield run: artifacts, manifest and determinism") {
    TempDir dir("mf");
    const std::string out = dir / "mf";
    REQUIRE(run_cli({"meanfield", "--omega", "2", "--t-max", "5", "--output", out}) == kOk);
    const std::string csv1 = slurp(fs::path(out) / "meanfield.csv");
    CHECK(csv1.rfind("t,", 0) == 0);
    CHECK(fs::exists(fs::path(out) / "meanfield_power.csv"));
    const std::string manifest = slurp(fs::path(out) / "manifest");
    for (const char* key : {"command = meanfield", "omega = 2", "code_version = ", "wall_time_s = ", "exit_status = 0",
                            "origin.omega = flag"})
        CHECK(manifest.find(key) != std::string::npos);

    std::string err;
    CHECK(run_cli({"meanfield", "--omega", "2", "--t-max", "5", "--output", out}, &err) == kConfig);
    CHECK(err.find("overwrite") != std::string::npos);
    REQUIRE(run_cli({"meanfield", "--omega", "2", "--t-max", "5", "--output", out, "--overwrite"}) == kOk);
    CHECK(slurp(fs::path(out) / "meanfield.csv") == csv1);
}

TEST_CASE("integrator aborts map to their own exit code") {
    TempDir dir("abort");
    CHECK(run_cli({"meanfield", "--omega", "2", "--dt", "0.5", "--t-max", "100", "--output", dir / "x"}) == kIntegrator);
}

TEST_CASE("sweep output does not depend on the number of workers") {
    TempDir dir("sweep");
    const std::vector<std::string> base = {"sweep-power", "--omega-min", "0.5", "--omega-max", "1.5", "--omega-step", "0.25",
                                           "--t-max", "50"};
    auto with = [&](const std::string& jobs, const std::string& out) {
        std::vector<std::string> a = base;
        a.insert(a.end(), {"--jobs", jobs, "--output", out});
        return run_cli(a);
    };
    REQUIRE(with("1", dir / "j1") == kOk);
    REQUIRE(with("3", dir / "j3") == kOk);
    CHECK(slurp(dir.path / "j1" / "sweep_power.csv") == slurp(dir.path / "j3" / "sweep_power.csv"));
}

TEST_CASE("remaining commands produce their files") {
    TempDir dir("cmds");
    CHECK(run_cli({"steady", "--nspins", "4", "--omega", "1", "--output", dir / "steady"}) == kOk);
    CHECK(fs::exists(dir.path / "steady" / "steady.csv"));
    CHECK(run_cli({"lindblad", "--nspins", "3", "--t-max", "1", "--output", dir / "lb"}) == kOk);
    CHECK(fs::exists(dir.path / "lb" / "thermo.csv"));
    CHECK(run_cli({"fluct", "--t-max", "2", "--output", dir / "fl"}) == kOk);
    CHECK(fs::exists(dir.path / "fl" / "fluct.csv"));
    CHECK(run_cli({"ep-dist", "--nspins", "2", "--omega", "2", "--output", dir / "ep"}) == kOk);
    CHECK(fs::exists(dir.path / "ep" / "summary.json"));
    CHECK(fs::exists(dir.path / "ep" / "crooks.csv"));
    CHECK(run_cli({"ep-dist", "--nspins", "2", "--nbeta", "0", "--output", dir / "ep0"}) == kConfig);
    CHECK(run_cli({"collision-check", "--nspins", "1", "--t-max", "0.2", "--delta-ts", "4e-3,2e-3", "--output", dir / "cc"}) == kOk);
    CHECK(fs::exists(dir.path / "cc" / "convergence.csv"));
    CHECK(run_cli({"entropy-compare", "--nspins-list", "4,6", "--omega-min", "0.5", "--omega-max", "1.0", "--omega-step", "0.5",
                   "--t-max", "20", "--output", dir / "ec"}) == kOk);
    CHECK(fs::exists(dir.path / "ec" / "entropy_compare.csv"));
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
}
