// cli.hpp — configuration, dispatch and CSV output for the btc command-line tool.
//
// Every setting is a key. Sources, highest precedence first: command-line flags (--key value),
// environment variables (BTC_KEY), the config file (--config path; `key = value` lines with
// `#` comments), then per-command defaults. Unknown keys are rejected from every source.

#pragma once

#include "btc/core.hpp"
#include "btc/params.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace btc::cli {

enum class Command { meanfield, fluct, lindblad, steady, sweep_power, collision_check, ep_dist, entropy_compare };

enum class InitialState { ground_h, ground_vz, coherent, thermal_ladder };

/// Bad configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kIntegrator = 3, kNumerical = 4 };

struct RunConfig {
    Command command = Command::meanfield;
    SystemParams params;

    double t_max = 0.0;
    double dt = 0.0;
    double dt_channel = 0.0;
    int n_max = 0;  // 0 selects the thermal-tail default
    double bin_tol = 0.0;
    int store_every = 1;
    double t_prep = 0.0;  // ep-dist: evolve the initial state this long before the channel

    InitialState initial = InitialState::ground_h;
    double theta = 0.0;
    double phi = 0.0;

    double omega_min = 0.0, omega_max = 0.0, omega_step = 0.0;
    std::vector<double> delta_ts;
    std::vector<int> nspins_list;
    bool fluct_correction = false;

    std::string output;
    bool overwrite = false;
    int jobs = 1;

    /// Effective key → value after precedence resolution, echoed into the manifest.
    std::map<std::string, std::string> effective;
    /// Key → source ("flag", "env", "file:<path>:<line>", "default").
    std::map<std::string, std::string> origin;
};

const std::vector<std::string>& known_keys();
std::string command_name(Command c);
Command parse_command(const std::string& s);

/// Parses argv (argv[0] ignored), the environment and an optional config file.
/// `env` replaces the process environment when non-null (used by tests).
/// Throws ConfigError naming the offending key, flag, line or constraint.
RunConfig parse_config(int argc, const char* const* argv, const std::map<std::string, std::string>* env = nullptr);

/// Runs the configured command and writes its artifacts. Returns an ExitCode; diagnostics go to `log`.
int run(const RunConfig& config, std::ostream& log);

/// parse_config + run with exception-to-exit-code mapping; `--help` prints usage.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// %.17g formatting used for every CSV number.
std::string format_number(double x);

}  // namespace btc::cli
