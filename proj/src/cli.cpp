#include "btc/cli.hpp"

#include "btc/collision.hpp"
#include "btc/dicke.hpp"
#include "btc/fluctuations.hpp"
#include "btc/liouville.hpp"
#include "btc/meanfield.hpp"
#include "btc/stochastic.hpp"
#include "btc/thermo.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#ifndef BTC_VERSION
#define BTC_VERSION "unknown"
#endif

extern char** environ;

namespace btc::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<Command, std::string>>& command_table() {
    static const std::vector<std::pair<Command, std::string>> t = {
        {Command::meanfield, "meanfield"},         {Command::fluct, "fluct"},
        {Command::lindblad, "lindblad"},           {Command::steady, "steady"},
        {Command::sweep_power, "sweep-power"},     {Command::collision_check, "collision-check"},
        {Command::ep_dist, "ep-dist"},             {Command::entropy_compare, "entropy-compare"},
    };
    return t;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_known(const std::string& key) {
    const auto& k = known_keys();
    return std::find(k.begin(), k.end(), key) != k.end();
}

// Per-command defaults; the lowest-precedence layer.
std::map<std::string, std::string> defaults_for(Command c) {
    std::map<std::string, std::string> d = {
        {"nspins", "10"},        {"omega", "2"},          {"gamma", "1"},
        {"omega_bath", "1"},     {"nbeta", "1"},          {"t_max", "100"},
        {"dt", "0.001"},         {"dt_channel", "0.1"},   {"n_max", "0"},
        {"bin_tol", "1e-10"},    {"store_every", "10"},   {"t_prep", "1"},
        {"initial", "ground-H"}, {"theta", "1.5707963267948966"}, {"phi", "3.1415926535897931"},
        {"omega_min", "0.1"},    {"omega_max", "2"},      {"omega_step", "0.05"},
        {"delta_ts", "0.004,0.002,0.001"}, {"nspins_list", "10,20,40"},
        {"fluct_correction", "false"}, {"output", "btc_out"}, {"overwrite", "false"}, {"jobs", "1"},
    };
    switch (c) {
        case Command::lindblad: d["t_max"] = "20"; break;
        case Command::sweep_power: d["t_max"] = "200"; break;
        case Command::collision_check:
            d["nspins"] = "4";
            d["t_max"] = "1";
            break;
        case Command::entropy_compare:
            d["t_max"] = "200";
            d["omega_step"] = "0.1";
            break;
        default: break;
    }
    return d;
}

double to_double(const std::string& key, const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse value '" + v + "' for key '" + key + "' (" + where + "): expected a number");
    }
}

int to_int(const std::string& key, const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse value '" + v + "' for key '" + key + "' (" + where + "): expected an integer");
    }
}

bool to_bool(const std::string& key, const std::string& v, const std::string& where) {
    const std::string s = lower(v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("cannot parse value '" + v + "' for key '" + key + "' (" + where + "): expected true/false");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Layer {
    std::map<std::string, std::string> values;
    std::map<std::string, std::string> where;
};

Layer read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Layer layer;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "file " + path + ":" + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!is_known(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": missing value for key '" + key + "'");
        layer.values[key] = value;
        layer.where[key] = where;
    }
    return layer;
}

Layer read_environment(const std::map<std::string, std::string>* env, std::string* config_path) {
    std::map<std::string, std::string> vars;
    if (env != nullptr) {
        vars = *env;
    } else {
        for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
            const std::string kv(*e);
            const auto eq = kv.find('=');
            if (eq != std::string::npos) vars[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
    }
    Layer layer;
    for (const auto& [name, value] : vars) {
        if (name.rfind("BTC_", 0) != 0) continue;
        const std::string key = lower(name.substr(4));
        if (key == "config") {
            *config_path = value;
            continue;
        }
        if (!is_known(key)) throw ConfigError("environment variable " + name + ": unknown key '" + key + "'");
        layer.values[key] = value;
        layer.where[key] = "env " + name;
    }
    return layer;
}

Operator finite_initial_state(const RunConfig& c) {
    const int n = c.params.n_spins;
    switch (c.initial) {
        case InitialState::ground_h: return coherent_state(n, std::numbers::pi / 2.0, std::numbers::pi);
        case InitialState::ground_vz: return coherent_state(n, std::numbers::pi, 0.0);
        case InitialState::coherent: return coherent_state(n, c.theta, c.phi);
        case InitialState::thermal_ladder: {
            // Detailed-balance populations: weight r^{N−k} with r = n_β/(n_β+1), k = 0 the top level.
            const Eigen::Index d = sector_dim(n);
            const double r = c.params.n_beta / (c.params.n_beta + 1.0);
            Eigen::VectorXd p(d);
            for (Eigen::Index k = 0; k < d; ++k) p(k) = std::pow(r, static_cast<double>(n - k));
            p /= p.sum();
            return p.cast<cplx>().asDiagonal();
        }
    }
    throw ConfigError("unknown initial state");
}

MeanFieldState mf_initial_state(const RunConfig& c) {
    switch (c.initial) {
        case InitialState::ground_h: return mf_ground_state_h();
        case InitialState::ground_vz:
        case InitialState::thermal_ladder: return mf_ground_state_vz();
        case InitialState::coherent:
            return MeanFieldState(std::sin(c.theta) * std::cos(c.phi), std::sin(c.theta) * std::sin(c.phi),
                                  std::cos(c.theta)) /
                   kSqrt2;
    }
    throw ConfigError("unknown initial state");
}

Mat3 mf_initial_covariance(const RunConfig& c, const MeanFieldState& m0) {
    if (c.initial == InitialState::thermal_ladder) {
        Mat3 g = Mat3::Zero();
        g(0, 0) = g(1, 1) = c.params.n_beta + 0.5;
        return g;
    }
    return coherent_covariance(m0);
}

// ---- output ---------------------------------------------------------------------------

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path), path_(path) {
        if (!out_) throw ConfigError("cannot write " + path.string());
        for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
        out_ << '\n';
    }
    void row(const std::vector<double>& values) {
        for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << format_number(values[k]);
        out_ << '\n';
    }
    const fs::path& path() const { return path_; }

private:
    std::ofstream out_;
    fs::path path_;
};

struct Output {
    fs::path dir;
    std::vector<std::string> files;
    std::vector<std::pair<std::string, std::string>> extra;  // manifest results

    fs::path file(const std::string& name) {
        files.push_back(name);
        return dir / name;
    }
    void note(const std::string& key, double v) { extra.emplace_back(key, format_number(v)); }
    void note(const std::string& key, const std::string& v) { extra.emplace_back(key, v); }
};

fs::path prepare_output(const RunConfig& c) {
    const fs::path dir(c.output);
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec)) throw ConfigError("output path '" + c.output + "' is not a directory");
        if (fs::exists(dir / "manifest", ec) && !c.overwrite)
            throw ConfigError("output directory '" + c.output + "' already holds a run; pass --overwrite to replace it");
    } else if (!fs::create_directories(dir, ec) || ec) {
        throw ConfigError("cannot create output directory '" + c.output + "'");
    }
    const fs::path probe = dir / ".write_probe";
    {
        std::ofstream p(probe);
        if (!p) throw ConfigError("output directory '" + c.output + "' is not writable");
    }
    fs::remove(probe, ec);
    return dir;
}

void write_manifest(const RunConfig& c, const Output& o, double wall_seconds, int status) {
    std::ofstream m(o.dir / "manifest");
    if (!m) throw ConfigError("cannot write manifest");
    for (const auto& [k, v] : c.effective) m << k << " = " << v << '\n';
    for (const auto& [k, v] : c.origin) m << "origin." << k << " = " << v << '\n';
    m << "code_version = " << BTC_VERSION << '\n';
    m << "wall_time_s = " << format_number(wall_seconds) << '\n';
    m << "exit_status = " << status << '\n';
    for (const auto& f : o.files) m << "output = " << f << '\n';
    for (const auto& [k, v] : o.extra) m << "result." << k << " = " << v << '\n';
}

// Runs f(0..n−1) on up to `jobs` threads; callers store results by index so order is fixed.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
    const std::size_t workers = std::min<std::size_t>(std::max(1, jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> omega_grid(const RunConfig& c) {
    const long count = std::lround((c.omega_max - c.omega_min) / c.omega_step) + 1;
    std::vector<double> g;
    for (long k = 0; k < count; ++k) g.push_back(c.omega_min + static_cast<double>(k) * c.omega_step);
    return g;
}

// ---- commands -------------------------------------------------------------------------

void cmd_meanfield(const RunConfig& c, Output& o) {
    const MeanFieldState m0 = mf_initial_state(c);
    std::vector<double> t, q, u, w;
    std::vector<MeanFieldState> ms;
    std::vector<double> cs;
    if (c.fluct_correction) {
        JointOptions jo;
        jo.dt = c.dt;
        jo.store_every = c.store_every;
        for (const auto& s : joint_integrate(c.params, m0, mf_initial_covariance(c, m0), c.t_max, jo)) {
            const MeanFieldPower pw = mf_power(c.params, s.m, &s.G);
            t.push_back(s.t);
            ms.push_back(s.m);
            cs.push_back(std::abs(s.m.y() - c_pole(c.params)) > 1e-12 ? conserved_c(c.params, s.m) : NAN);
            q.push_back(pw.q_dot);
            u.push_back(pw.u_dot);
            w.push_back(pw.w_dot);
        }
    } else {
        MeanFieldOptions mo;
        mo.dt = c.dt;
        mo.store_every = c.store_every;
        const MeanFieldTrajectory tr = mf_integrate(c.params, m0, c.t_max, mo);
        t = tr.times;
        ms = tr.states;
        cs = tr.c_values;
        for (const auto& m : ms) {
            const MeanFieldPower pw = mf_power(c.params, m);
            q.push_back(pw.q_dot);
            u.push_back(pw.u_dot);
            w.push_back(pw.w_dot);
        }
    }
    Csv traj(o.file("meanfield.csv"), {"t", "mx", "my", "mz", "c"});
    for (std::size_t k = 0; k < t.size(); ++k) traj.row({t[k], ms[k].x(), ms[k].y(), ms[k].z(), cs[k]});
    const std::vector<double> wbar = cumulative_time_average(t, w);
    const std::vector<double> qbar = cumulative_time_average(t, q);
    Csv pw(o.file("meanfield_power.csv"), {"t", "qdot", "udot", "wdot", "wbar", "qbar"});
    for (std::size_t k = 0; k < t.size(); ++k) pw.row({t[k], q[k], u[k], w[k], wbar[k], qbar[k]});
    o.note("wbar_final", wbar.back());
    o.note("qbar_final", qbar.back());
}

void cmd_fluct(const RunConfig& c, Output& o) {
    const MeanFieldState m0 = mf_initial_state(c);
    JointOptions jo;
    jo.dt = c.dt;
    jo.store_every = c.store_every;
    Csv csv(o.file("fluct.csv"), {"t", "mx", "my", "mz", "Gxx", "Gxy", "Gxz", "Gyy", "Gyz", "Gzz", "lambda", "S"});
    double last_s = 0.0;
    joint_integrate_observe(c.params, m0, mf_initial_covariance(c, m0), c.t_max, jo, [&](const FluctuationSample& s) {
        csv.row({s.t, s.m.x(), s.m.y(), s.m.z(), s.G(0, 0), s.G(0, 1), s.G(0, 2), s.G(1, 1), s.G(1, 2), s.G(2, 2),
                 s.lambda, s.entropy});
        last_s = s.entropy;
    });
    o.note("S_final", last_s);
    o.note("S_beta", thermal_entropy(c.params.n_beta));
}

void cmd_lindblad(const RunConfig& c, Output& o) {
    const LindbladGenerator gen(c.params);
    EvolveOptions eo;
    eo.dt = c.dt;
    eo.store_every = c.store_every;
    const Trajectory tr = evolve(gen, finite_initial_state(c), c.t_max, eo);
    Csv traj(o.file("trajectory.csv"), {"t", "mx", "my", "mz"});
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const Vec3& m = tr.magnetization[k];
        traj.row({tr.times[k], m.x(), m.y(), m.z()});
    }
    const auto rec = thermo_records(gen, tr);
    Csv th(o.file("thermo.csv"), {"t", "qdot", "udot", "wdot", "S", "Sdot", "phidot", "sigmadot", "bdot"});
    double min_sigma = INFINITY, min_gap = INFINITY;
    for (const auto& r : rec) {
        th.row({r.t, r.q_dot, r.u_dot, r.w_dot, r.S, r.S_dot, r.phi_dot, r.sigma_dot, r.b_dot});
        min_sigma = std::min(min_sigma, r.sigma_dot);
        min_gap = std::min(min_gap, r.S_dot - r.b_dot);
    }
    o.note("min_sigma_dot", min_sigma);
    o.note("min_Sdot_minus_Bdot", min_gap);
}

void cmd_steady(const RunConfig& c, Output& o) {
    const LindbladGenerator gen(c.params);
    const SteadyState ss = solve_steady_state(gen);
    const Vec3 m = magnetization(ss.rho);
    const double n = c.params.n_spins;
    Csv csv(o.file("steady.csv"),
            {"nspins", "omega", "nbeta", "S", "S_beta", "qdot", "udot", "wdot", "mx", "my", "mz", "residual"});
    csv.row({n, c.params.omega_rabi, c.params.n_beta, vn_entropy(ss.rho), thermal_entropy(c.params.n_beta),
             heat_current(c.params, ss.rho) / n, internal_energy_rate(c.params, ss.rho) / n,
             work_power(c.params, ss.rho) / n, m.x(), m.y(), m.z(), ss.residual});
    Csv pop(o.file("steady_populations.csv"), {"k", "m", "p"});
    for (Eigen::Index k = 0; k < ss.rho.rows(); ++k)
        pop.row({static_cast<double>(k), n / 2.0 - static_cast<double>(k), ss.rho(k, k).real()});
    const char* method = ss.method == SteadyStateMethod::svd           ? "svd"
                         : ss.method == SteadyStateMethod::bordered_lu ? "bordered_lu"
                                                                       : "evolution";
    o.note("steady_method", method);
}

void cmd_sweep_power(const RunConfig& c, Output& o) {
    const std::vector<double> grid = omega_grid(c);
    std::vector<AsymptoticPower> res(grid.size());
    AsymptoticOptions ao;
    ao.dt = c.dt;
    ao.t_settle = c.t_max;
    ao.t_average = c.t_max;
    const MeanFieldState m0 = mf_initial_state(c);
    parallel_for(grid.size(), c.jobs, [&](std::size_t i) {
        SystemParams p = c.params;
        p.omega_rabi = grid[i];
        res[i] = asymptotic_power(p, m0, ao);
    });
    Csv csv(o.file("sweep_power.csv"), {"omega", "wbar_stationary", "qbar", "period", "wbar_analytic"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SystemParams p = c.params;
        p.omega_rabi = grid[i];
        const double analytic = std::abs(grid[i]) <= p.gamma ? stationary_power(p) : NAN;
        csv.row({grid[i], res[i].w_bar, res[i].q_bar, res[i].period, analytic});
    }
    // One-sided slopes on either side of Ω = Γ, for the cusp diagnostic.
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (std::abs(grid[i] - c.params.gamma) < 1e-9) {
            o.note("slope_left", (res[i].w_bar - res[i - 1].w_bar) / (grid[i] - grid[i - 1]));
            o.note("slope_right", (res[i + 1].w_bar - res[i].w_bar) / (grid[i + 1] - grid[i]));
        }
    }
}

void cmd_collision_check(const RunConfig& c, Output& o) {
    const Operator rho0 = finite_initial_state(c);
    Csv conv(o.file("convergence.csv"),
             {"delta_t", "trace_distance", "heat_collision", "heat_lindblad", "heat_relative_error"});
    std::vector<CollisionComparisonRow> finest;
    std::vector<ConvergencePoint> pts;
    for (double dt : c.delta_ts) {
        CollisionConfig cfg;
        cfg.delta_t = dt;
        cfg.n_collisions = static_cast<int>(std::llround(c.t_max / dt));
        auto rows = compare_with_lindblad(rho0, c.params, cfg, c.n_max);
        const auto& last = rows.back();
        const double rel = std::abs(last.heat_cumulative - last.heat_lindblad_cumulative) /
                           std::abs(last.heat_lindblad_cumulative);
        pts.push_back({dt, last.trace_distance, last.heat_cumulative, last.heat_lindblad_cumulative, rel});
        conv.row({dt, last.trace_distance, last.heat_cumulative, last.heat_lindblad_cumulative, rel});
        finest = std::move(rows);
    }
    Csv traj(o.file("collision.csv"),
             {"k", "t", "trace_distance_to_lindblad", "heat_cumulative", "heat_lindblad_cumulative"});
    for (const auto& r : finest)
        traj.row({static_cast<double>(r.k), r.t, r.trace_distance, r.heat_cumulative, r.heat_lindblad_cumulative});
    for (std::size_t k = 1; k < pts.size(); ++k) {
        o.note("distance_ratio_" + std::to_string(k), pts[k - 1].trace_distance / pts[k].trace_distance);
        o.note("heat_error_ratio_" + std::to_string(k), pts[k - 1].heat_relative_error / pts[k].heat_relative_error);
    }
}

void cmd_ep_dist(const RunConfig& c, Output& o) {
    if (c.params.zero_temperature()) throw ConfigError("ep-dist requires nbeta > 0 (full-rank steady state)");
    const LindbladGenerator gen(c.params);
    const Operator pi = steady_state(gen);
    Operator rho = finite_initial_state(c);
    if (c.t_prep > 0.0) {
        const Eigen::MatrixXcd prop = expm(cplx(c.t_prep) * gen.superoperator());
        rho = hermitian_part(unvec(prop * vec(rho), gen.dim()));
    }
    const QuantumChannel ch = channel_from_generator(gen, c.dt_channel);
    StochasticOptions so;
    so.bin_tol = c.bin_tol;
    const FluctuationSummary fs = fluctuation_summary(ch, rho, pi, so);
    Csv fwd(o.file("ep_forward.csv"), {"sigma", "weight"});
    for (const Atom& a : fs.forward.atoms) fwd.row({a.sigma, a.weight});
    Csv bwd(o.file("ep_backward.csv"), {"sigma", "weight"});
    for (const Atom& a : fs.backward.atoms) bwd.row({a.sigma, a.weight});
    Csv cr(o.file("crooks.csv"), {"sigma", "residual"});
    for (const auto& e : fs.crooks.entries) cr.row({e.sigma, e.residual});

    nlohmann::ordered_json j;
    j["negativity"] = fs.forward.negativity;
    j["integral_ft"] = fs.integral_ft;
    j["max_crooks_residual"] = fs.crooks.max_residual;
    j["unmatched_atoms"] = fs.crooks.unmatched.size();
    j["raw_min_real"] = fs.forward.raw.min_real;
    j["raw_negative_sum"] = fs.forward.raw.negative_sum;
    j["min_sigma"] = fs.min_sigma;
    j["total_weight"] = fs.forward.total_weight();
    j["n_atoms"] = fs.forward.atoms.size();
    j["kraus_rank"] = ch.kraus.size();
    std::ofstream js(o.file("summary.json"));
    js << j.dump(2) << '\n';
    o.note("integral_ft", fs.integral_ft);
    o.note("max_crooks_residual", fs.crooks.max_residual);
}

void cmd_entropy_compare(const RunConfig& c, Output& o) {
    const std::vector<double> grid = omega_grid(c);
    const std::size_t nn = c.nspins_list.size();
    std::vector<double> gauss(grid.size());
    std::vector<double> finite(grid.size() * nn);
    const MeanFieldState m0 = mf_initial_state(c);
    const Mat3 g0 = mf_initial_covariance(c, m0);
    parallel_for(grid.size() * (nn + 1), c.jobs, [&](std::size_t task) {
        const std::size_t i = task / (nn + 1);
        const std::size_t which = task % (nn + 1);
        SystemParams p = c.params;
        p.omega_rabi = grid[i];
        if (which == 0) {
            if (classify_phase(p) == Phase::stationary) {
                const MeanFieldState fp = stationary_fixed_point(p);
                gauss[i] = gaussian_entropy({stationary_covariance(p, fp), fp});
            } else {
                JointOptions jo;
                jo.dt = c.dt;
                jo.store_every = std::max(1, static_cast<int>(std::llround(c.t_max / c.dt)));
                gauss[i] = joint_integrate(p, m0, g0, c.t_max, jo).back().entropy;
            }
        } else {
            p.n_spins = c.nspins_list[which - 1];
            finite[i * nn + which - 1] = vn_entropy(steady_state(LindbladGenerator(p)));
        }
    });
    std::vector<std::string> header = {"omega", "S_gaussian", "S_beta"};
    for (int n : c.nspins_list) header.push_back("S_N" + std::to_string(n));
    Csv csv(o.file("entropy_compare.csv"), header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row = {grid[i], gauss[i], thermal_entropy(c.params.n_beta)};
        for (std::size_t k = 0; k < nn; ++k) row.push_back(finite[i * nn + k]);
        csv.row(row);
    }
}

class HelpRequested : public std::runtime_error {
public:
    explicit HelpRequested(std::string text) : std::runtime_error("help"), text_(std::move(text)) {}
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

}  // namespace

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> k = {
        "command",   "nspins",     "omega",      "gamma",       "omega_bath",  "nbeta",   "beta",
        "t_max",     "dt",         "dt_channel", "n_max",       "bin_tol",     "store_every",
        "t_prep",    "initial",    "theta",      "phi",         "omega_min",   "omega_max",
        "omega_step", "delta_ts",  "nspins_list", "fluct_correction", "output", "overwrite", "jobs",
    };
    return k;
}

std::string command_name(Command c) {
    for (const auto& [cmd, name] : command_table())
        if (cmd == c) return name;
    return "?";
}

Command parse_command(const std::string& s) {
    for (const auto& [cmd, name] : command_table())
        if (name == s) return cmd;
    std::string all;
    for (const auto& [cmd, name] : command_table()) all += (all.empty() ? "" : ", ") + name;
    throw ConfigError("unknown command '" + s + "' (expected one of: " + all + ")");
}

RunConfig parse_config(int argc, const char* const* argv, const std::map<std::string, std::string>* env) {
    CLI::App app{"btc: boundary time-crystal thermodynamics simulator"};
    app.allow_extras(false);
    std::map<std::string, std::string> flag_values;
    std::map<std::string, CLI::Option*> flag_opts;
    std::string command_arg, config_path;
    app.add_option("command", command_arg, "meanfield | fluct | lindblad | steady | sweep-power | collision-check | ep-dist | entropy-compare");
    app.add_option("--config", config_path, "line-oriented key = value config file");
    bool overwrite_flag = false, fluct_flag = false;
    auto* ow = app.add_flag("--overwrite", overwrite_flag, "replace results in an existing output directory");
    auto* fc = app.add_flag("--fluct-correction,--fluct_correction", fluct_flag, "add O(1/N) Gaussian corrections to mean-field powers");
    for (const std::string& key : known_keys()) {
        if (key == "command" || key == "overwrite" || key == "fluct_correction") continue;
        std::string names = "--" + key;
        std::string dashed = key;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        if (dashed != key) names += ",--" + dashed;
        flag_opts[key] = app.add_option(names, flag_values[key]);
    }
    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("command line: ") + e.what());
    }

    std::string env_config;
    const Layer env_layer = read_environment(env, &env_config);
    if (config_path.empty()) config_path = env_config;
    const Layer file_layer = config_path.empty() ? Layer{} : read_config_file(config_path);

    Layer flag_layer;
    for (const auto& [key, opt] : flag_opts)
        if (opt->count() > 0) {
            flag_layer.values[key] = flag_values[key];
            flag_layer.where[key] = "flag --" + key;
        }
    if (ow->count() > 0) {
        flag_layer.values["overwrite"] = overwrite_flag ? "true" : "false";
        flag_layer.where["overwrite"] = "flag --overwrite";
    }
    if (fc->count() > 0) {
        flag_layer.values["fluct_correction"] = fluct_flag ? "true" : "false";
        flag_layer.where["fluct_correction"] = "flag --fluct-correction";
    }
    if (!command_arg.empty()) {
        flag_layer.values["command"] = command_arg;
        flag_layer.where["command"] = "argument";
    }

    // Resolve: flags > env > file > defaults.
    const std::array<const Layer*, 3> layers = {&flag_layer, &env_layer, &file_layer};
    auto lookup = [&](const std::string& key, std::string* where) -> const std::string* {
        for (const Layer* l : layers) {
            auto it = l->values.find(key);
            if (it != l->values.end()) {
                if (where) *where = l->where.at(key);
                return &it->second;
            }
        }
        return nullptr;
    };
    std::string where;
    const std::string* cmd = lookup("command", &where);
    if (cmd == nullptr) throw ConfigError("missing required field 'command'");
    RunConfig c;
    c.command = parse_command(*cmd);
    const std::string command_origin = where;

    const auto defaults = defaults_for(c.command);
    std::map<std::string, std::string> eff;
    for (const std::string& key : known_keys()) {
        if (key == "command") continue;
        if (const std::string* v = lookup(key, &where)) {
            eff[key] = *v;
            c.origin[key] = where;
        } else if (auto it = defaults.find(key); it != defaults.end()) {
            eff[key] = it->second;
            c.origin[key] = "default";
        }
    }
    auto dbl = [&](const std::string& k) { return to_double(k, eff.at(k), c.origin.at(k)); };
    auto integer = [&](const std::string& k) { return to_int(k, eff.at(k), c.origin.at(k)); };

    c.params.n_spins = integer("nspins");
    c.params.omega_rabi = dbl("omega");
    c.params.gamma = dbl("gamma");
    c.params.omega_bath = dbl("omega_bath");
    c.params.n_beta = dbl("nbeta");
    if (eff.count("beta")) {
        // beta wins over nbeta only when it comes from an equal-or-higher source than nbeta.
        auto rank = [](const std::string& o) {
            if (o.rfind("flag", 0) == 0) return 3;
            if (o.rfind("env", 0) == 0) return 2;
            if (o.rfind("file", 0) == 0) return 1;
            return 0;
        };
        const int rb = rank(c.origin["beta"]);
        const int rn = rank(c.origin["nbeta"]);
        if (rb == rn) throw ConfigError("both 'beta' and 'nbeta' given (" + c.origin["beta"] + "); specify only one");
        if (rb > rn) {
            const double b = dbl("beta");
            if (!(b > 0.0)) throw ConfigError("beta must satisfy beta > 0 (" + c.origin["beta"] + ")");
            c.params.set_beta(b);
            eff["nbeta"] = format_number(c.params.n_beta);
            c.origin["nbeta"] = "derived from beta";
        }
    }
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }

    c.t_max = dbl("t_max");
    c.dt = dbl("dt");
    c.dt_channel = dbl("dt_channel");
    c.n_max = integer("n_max");
    c.bin_tol = dbl("bin_tol");
    c.store_every = integer("store_every");
    c.t_prep = dbl("t_prep");
    c.theta = dbl("theta");
    c.phi = dbl("phi");
    c.omega_min = dbl("omega_min");
    c.omega_max = dbl("omega_max");
    c.omega_step = dbl("omega_step");
    c.jobs = integer("jobs");
    c.output = eff.at("output");
    c.overwrite = to_bool("overwrite", eff.at("overwrite"), c.origin.at("overwrite"));
    c.fluct_correction = to_bool("fluct_correction", eff.at("fluct_correction"), c.origin.at("fluct_correction"));
    for (const auto& s : split_list(eff.at("delta_ts"))) c.delta_ts.push_back(to_double("delta_ts", s, c.origin.at("delta_ts")));
    for (const auto& s : split_list(eff.at("nspins_list"))) c.nspins_list.push_back(to_int("nspins_list", s, c.origin.at("nspins_list")));

    const std::string init = lower(eff.at("initial"));
    if (init == "ground-h") c.initial = InitialState::ground_h;
    else if (init == "ground-vz") c.initial = InitialState::ground_vz;
    else if (init == "coherent") c.initial = InitialState::coherent;
    else if (init == "thermal-ladder") c.initial = InitialState::thermal_ladder;
    else throw ConfigError("invalid initial '" + eff.at("initial") + "' (" + c.origin.at("initial") + "): expected ground-H, ground-Vz, coherent or thermal-ladder");

    auto positive = [&](const std::string& k, double v) {
        if (!(v > 0.0)) throw ConfigError(k + " must satisfy " + k + " > 0 (" + c.origin.at(k) + ")");
    };
    positive("t_max", c.t_max);
    positive("dt", c.dt);
    positive("bin_tol", c.bin_tol);
    positive("omega_step", c.omega_step);
    if (c.dt_channel < 0.0) throw ConfigError("dt_channel must satisfy dt_channel >= 0 (" + c.origin.at("dt_channel") + ")");
    if (c.t_prep < 0.0) throw ConfigError("t_prep must satisfy t_prep >= 0 (" + c.origin.at("t_prep") + ")");
    if (c.n_max < 0) throw ConfigError("n_max must satisfy n_max >= 0 (" + c.origin.at("n_max") + ")");
    if (c.store_every < 1) throw ConfigError("store_every must satisfy store_every >= 1 (" + c.origin.at("store_every") + ")");
    if (c.jobs < 1) throw ConfigError("jobs must satisfy jobs >= 1 (" + c.origin.at("jobs") + ")");
    if (c.omega_max < c.omega_min) throw ConfigError("omega_max must satisfy omega_max >= omega_min");
    if (c.delta_ts.empty()) throw ConfigError("delta_ts must list at least one collision duration");
    for (double d : c.delta_ts) if (!(d > 0.0)) throw ConfigError("delta_ts entries must be > 0");
    for (int n : c.nspins_list) if (n < 1) throw ConfigError("nspins_list entries must be >= 1");
    if (c.output.empty()) throw ConfigError("missing required field 'output'");

    c.effective = std::move(eff);
    c.effective["command"] = command_name(c.command);
    c.origin["command"] = command_origin;
    return c;
}

int run(const RunConfig& config, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    Output out;
    out.dir = prepare_output(config);
    int status = kOk;
    std::string failure;
    try {
        switch (config.command) {
            case Command::meanfield: cmd_meanfield(config, out); break;
            case Command::fluct: cmd_fluct(config, out); break;
            case Command::lindblad: cmd_lindblad(config, out); break;
            case Command::steady: cmd_steady(config, out); break;
            case Command::sweep_power: cmd_sweep_power(config, out); break;
            case Command::collision_check: cmd_collision_check(config, out); break;
            case Command::ep_dist: cmd_ep_dist(config, out); break;
            case Command::entropy_compare: cmd_entropy_compare(config, out); break;
        }
    } catch (const ConfigError& e) {
        status = kConfig;
        failure = std::string("configuration error: ") + e.what();
    } catch (const IntegratorError& e) {
        status = kIntegrator;
        failure = std::string("integrator abort: ") + e.what();
    } catch (const NumericalError& e) {
        status = kNumerical;
        failure = std::string("numerical error: ") + e.what();
    } catch (const std::domain_error& e) {
        status = kNumerical;
        failure = std::string("numerical error: ") + e.what();
    } catch (const std::invalid_argument& e) {
        status = kConfig;
        failure = std::string("configuration error: ") + e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (status != kOk) out.note("failure", failure);
    write_manifest(config, out, wall, status);
    if (status != kOk) {
        log << "btc " << command_name(config.command) << ": " << failure << '\n';
    } else {
        log << "btc " << command_name(config.command) << ": wrote " << out.files.size() << " file(s) to "
            << out.dir.string() << '\n';
    }
    return status;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        const RunConfig c = parse_config(argc, argv);
        return run(c, out);
    } catch (const HelpRequested& h) {
        out << h.text();
        return kOk;
    } catch (const ConfigError& e) {
        err << "btc: configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        err << "btc: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace btc::cli
