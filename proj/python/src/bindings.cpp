// Python bindings for the btc core. Operators cross as complex numpy arrays.

#include "btc/cli.hpp"
#include "btc/collision.hpp"
#include "btc/dicke.hpp"
#include "btc/fluctuations.hpp"
#include "btc/liouville.hpp"
#include "btc/meanfield.hpp"
#include "btc/stochastic.hpp"
#include "btc/thermo.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <sstream>

namespace py = pybind11;
using namespace btc;

namespace {

SystemParams make_params(int n_spins, double omega, double gamma, double omega_bath, double n_beta) {
    SystemParams p;
    p.n_spins = n_spins;
    p.omega_rabi = omega;
    p.gamma = gamma;
    p.omega_bath = omega_bath;
    p.n_beta = n_beta;
    p.validate(SystemParams::kDefaultMaxSpins, true);
    return p;
}

py::dict trajectory_dict(const Trajectory& tr) {
    py::dict d;
    d["times"] = tr.times;
    d["states"] = tr.states;
    std::vector<Vec3> m = tr.magnetization;
    d["magnetization"] = m;
    return d;
}

py::list atoms_list(const std::vector<Atom>& atoms) {
    py::list out;
    for (const auto& a : atoms) out.append(py::make_tuple(a.sigma, a.weight));
    return out;
}

}  // namespace

PYBIND11_MODULE(_btc, m) {
    m.doc() = "Quantum thermodynamics of the boundary time crystal (C++ core)";

    py::register_exception<IntegratorError>(m, "IntegratorError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init(&make_params), py::arg("n_spins") = 1, py::arg("omega") = 0.0, py::arg("gamma") = 1.0,
             py::arg("omega_bath") = 1.0, py::arg("n_beta") = 0.0)
        .def_readwrite("n_spins", &SystemParams::n_spins)
        .def_readwrite("omega", &SystemParams::omega_rabi)
        .def_readwrite("gamma", &SystemParams::gamma)
        .def_readwrite("omega_bath", &SystemParams::omega_bath)
        .def_readwrite("n_beta", &SystemParams::n_beta)
        .def_property("beta", &SystemParams::beta, &SystemParams::set_beta)
        .def("__repr__", [](const SystemParams& p) {
            std::ostringstream os;
            os << "SystemParams(n_spins=" << p.n_spins << ", omega=" << p.omega_rabi << ", gamma=" << p.gamma
               << ", omega_bath=" << p.omega_bath << ", n_beta=" << p.n_beta << ")";
            return os.str();
        });

    // dicke
    py::enum_<Axis>(m, "Axis")
        .value("x", Axis::x)
        .value("y", Axis::y)
        .value("z", Axis::z)
        .value("plus", Axis::plus)
        .value("minus", Axis::minus);
    m.def("collective_op", py::overload_cast<int, Axis>(&collective_op), py::arg("n_spins"), py::arg("axis"));
    m.def("hamiltonian", &hamiltonian);
    m.def("coherent_state", py::overload_cast<int, double, double>(&coherent_state), py::arg("n_spins"),
          py::arg("theta"), py::arg("phi"));
    m.def("casimir_check", &casimir_check);
    m.def("magnetization", &magnetization);

    // liouville
    py::class_<LindbladGenerator>(m, "LindbladGenerator")
        .def(py::init<const SystemParams&>())
        .def_property_readonly("params", &LindbladGenerator::params)
        .def_property_readonly("dim", &LindbladGenerator::dim)
        .def("apply", &LindbladGenerator::apply)
        .def("apply_adjoint", &LindbladGenerator::apply_adjoint)
        .def("superoperator", &LindbladGenerator::superoperator);
    m.def(
        "evolve",
        [](const LindbladGenerator& gen, const Operator& rho0, double t_max, double dt, int store_every) {
            EvolveOptions o;
            o.dt = dt;
            o.store_every = store_every;
            Trajectory tr;
            {
                py::gil_scoped_release release;
                tr = evolve(gen, rho0, t_max, o);
            }
            return trajectory_dict(tr);
        },
        py::arg("gen"), py::arg("rho0"), py::arg("t_max"), py::arg("dt") = 1e-3, py::arg("store_every") = 1);
    m.def("steady_state", [](const LindbladGenerator& gen) { return steady_state(gen); });

    // meanfield
    m.def("mf_rhs", &mf_rhs);
    m.def("conserved_c", &conserved_c);
    m.def(
        "mf_integrate",
        [](const SystemParams& p, const Vec3& m0, double t_max, double dt, int store_every) {
            MeanFieldOptions o;
            o.dt = dt;
            o.store_every = store_every;
            const MeanFieldTrajectory tr = mf_integrate(p, m0, t_max, o);
            py::dict d;
            d["times"] = tr.times;
            d["states"] = tr.states;
            d["c"] = tr.c_values;
            return d;
        },
        py::arg("params"), py::arg("m0"), py::arg("t_max"), py::arg("dt") = 1e-3, py::arg("store_every") = 1);
    m.def("stationary_fixed_point", &stationary_fixed_point);
    m.def("mf_period", [](const SystemParams& p, const Vec3& m0) { return mf_period(p, m0); });
    m.def("mf_ground_state_h", &mf_ground_state_h);
    m.def("mf_ground_state_vz", &mf_ground_state_vz);

    // fluctuations
    m.def("symplectic", &symplectic);
    m.def("drift_matrix", &drift_matrix);
    m.def("gaussian_entropy", [](const Mat3& G, const Vec3& m) { return gaussian_entropy({G, m}); }, py::arg("G"),
          py::arg("m"));
    m.def("thermal_entropy", &thermal_entropy);
    m.def("coherent_covariance", &coherent_covariance);
    m.def("stationary_covariance", &stationary_covariance);
    m.def(
        "joint_integrate",
        [](const SystemParams& p, const Vec3& m0, const Mat3& G0, double t_max, double dt, int store_every) {
            JointOptions o;
            o.dt = dt;
            o.store_every = store_every;
            py::dict d;
            std::vector<double> t, s, lam;
            std::vector<Vec3> ms;
            std::vector<Mat3> gs;
            joint_integrate_observe(p, m0, G0, t_max, o, [&](const FluctuationSample& x) {
                t.push_back(x.t);
                ms.push_back(x.m);
                gs.push_back(x.G);
                lam.push_back(x.lambda);
                s.push_back(x.entropy);
            });
            d["times"] = t;
            d["m"] = ms;
            d["G"] = gs;
            d["lambda"] = lam;
            d["entropy"] = s;
            return d;
        },
        py::arg("params"), py::arg("m0"), py::arg("G0"), py::arg("t_max"), py::arg("dt") = 1e-3,
        py::arg("store_every") = 1);

    // thermo
    m.def("heat_current", &heat_current);
    m.def("internal_energy_rate", &internal_energy_rate);
    m.def("work_power", &work_power);
    m.def("entropy_flux_rate", &entropy_flux_rate);
    m.def("vn_entropy", &vn_entropy);
    m.def("spohn_bound", py::overload_cast<const LindbladGenerator&, const Operator&, const Operator&>(&spohn_bound));
    m.def("stationary_power", &stationary_power);
    m.def(
        "asymptotic_power",
        [](const SystemParams& p, const Vec3& m0) {
            const AsymptoticPower a = asymptotic_power(p, m0);
            py::dict d;
            d["w_bar"] = a.w_bar;
            d["q_bar"] = a.q_bar;
            d["period"] = a.period;
            return d;
        },
        py::arg("params"), py::arg("m0"));

    // collision
    m.def(
        "collide_once",
        [](const Operator& rho, const SystemParams& p, double delta_t, int n_max) {
            CollisionConfig cfg;
            cfg.delta_t = delta_t;
            const CollisionStep st = collide_once(rho, p, cfg, OscillatorAncilla(p.n_beta, p.omega_bath, n_max));
            py::dict d;
            d["rho_next"] = st.rho_next;
            d["heat"] = st.heat;
            d["work"] = st.work;
            d["top_population"] = st.top_population;
            return d;
        },
        py::arg("rho"), py::arg("params"), py::arg("delta_t") = 1e-3, py::arg("n_max") = 0);
    m.def(
        "collision_convergence",
        [](const Operator& rho0, const SystemParams& p, double t_final, const std::vector<double>& dts) {
            ConvergenceStudy cs;
            {
                py::gil_scoped_release release;
                cs = collision_convergence(rho0, p, t_final, dts);
            }
            py::dict d;
            std::vector<double> dist, herr;
            for (const auto& pt : cs.points) {
                dist.push_back(pt.trace_distance);
                herr.push_back(pt.heat_relative_error);
            }
            d["trace_distance"] = dist;
            d["heat_relative_error"] = herr;
            d["distance_ratios"] = cs.distance_ratios;
            d["heat_error_ratios"] = cs.heat_error_ratios;
            return d;
        },
        py::arg("rho0"), py::arg("params"), py::arg("t_final"), py::arg("delta_ts"));

    // stochastic
    py::class_<QuantumChannel>(m, "QuantumChannel")
        .def_readonly("kraus", &QuantumChannel::kraus)
        .def_readonly("dt_channel", &QuantumChannel::dt_channel)
        .def("apply", &QuantumChannel::apply)
        .def("completeness_error", &QuantumChannel::completeness_error);
    m.def("channel_from_generator", &channel_from_generator);
    m.def("reversal_map", &reversal_map);
    m.def(
        "fluctuation_summary",
        [](const QuantumChannel& ch, const Operator& rho, const Operator& pi) {
            FluctuationSummary s;
            {
                py::gil_scoped_release release;
                s = fluctuation_summary(ch, rho, pi);
            }
            py::dict d;
            d["forward"] = atoms_list(s.forward.atoms);
            d["backward"] = atoms_list(s.backward.atoms);
            d["integral_ft"] = s.integral_ft;
            d["crooks_max_residual"] = s.crooks.max_residual;
            d["min_sigma"] = s.min_sigma;
            d["raw_min_weight"] = s.forward.raw.min_real;
            d["negativity"] = s.forward.negativity;
            return d;
        },
        py::arg("channel"), py::arg("rho"), py::arg("pi"));

    // cli
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> full = {"btc"};
            full.insert(full.end(), args.begin(), args.end());
            std::vector<const char*> argv;
            for (const auto& a : full) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
